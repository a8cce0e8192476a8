//! Exact normal-ordered two-mode ladder-operator algebra.
//!
//! Operators are finite sums of monomials `(a†)^p (b†)^q a^r b^s` with
//! complex coefficients. Products are normal-ordered through the canonical
//! commutators `[a, a†] = [b, b†] = 1`; matrix elements in the occupation
//! basis are evaluated as products of square roots of integers, never via
//! factorials.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::Result;
use crate::fock::{StateVector, SubspaceSpec};

/// A normal-ordered monomial `(a†)^adag (b†)^bdag a^a b^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderMonomial {
    pub adag: u32,
    pub bdag: u32,
    pub a: u32,
    pub b: u32,
}

impl LadderMonomial {
    pub fn new(adag: u32, bdag: u32, a: u32, b: u32) -> Self {
        LadderMonomial { adag, bdag, a, b }
    }

    pub fn identity() -> Self {
        LadderMonomial::new(0, 0, 0, 0)
    }

    /// True if the monomial maps an N-particle sector to itself.
    pub fn conserves_number(&self) -> bool {
        self.adag + self.bdag == self.a + self.b
    }

    /// Change of the Fock index l when acting on `|l>`; meaningful for
    /// number-conserving monomials.
    pub fn index_shift(&self) -> i64 {
        self.adag as i64 - self.a as i64
    }

    /// Formal adjoint: creators and annihilators swap.
    pub fn adjoint(&self) -> Self {
        LadderMonomial::new(self.a, self.b, self.adag, self.bdag)
    }

    /// `<l1| monomial |l2>` in the N-particle sector. Zero when occupations
    /// cannot be matched. Indices must lie in the full sector.
    pub fn matrix_element(&self, spec: &SubspaceSpec, l1: i64, l2: i64) -> Result<f64> {
        let (na1, nb1) = spec.occupations(l1)?;
        let (na2, nb2) = spec.occupations(l2)?;
        Ok(self.element_from_occupations(na1, nb1, na2, nb2))
    }

    fn element_from_occupations(&self, na1: u64, nb1: u64, na2: u64, nb2: u64) -> f64 {
        if self.a as u64 > na2 || self.b as u64 > nb2 {
            return 0.0;
        }
        if na2 - self.a as u64 + self.adag as u64 != na1
            || nb2 - self.b as u64 + self.bdag as u64 != nb1
        {
            return 0.0;
        }
        mode_factor(na2, self.a, self.adag) * mode_factor(nb2, self.b, self.bdag)
    }
}

/// Falling factorial m (m-1) ... (m-j+1) as f64; exact below 2^53.
fn falling(m: u64, j: u32) -> f64 {
    let mut acc = 1.0;
    for step in 0..j as u64 {
        if step >= m {
            return 0.0;
        }
        acc *= (m - step) as f64;
    }
    acc
}

/// Amplitude factor of one mode: annihilate `ann` quanta from occupation
/// `occ`, then create `cre`. Equal exponents give an exact integer product;
/// the general case is a square root of an integer product.
fn mode_factor(occ: u64, ann: u32, cre: u32) -> f64 {
    if ann as u64 > occ {
        return 0.0;
    }
    if ann == cre {
        falling(occ, ann)
    } else {
        (falling(occ, ann) * falling(occ - ann as u64 + cre as u64, cre)).sqrt()
    }
}

/// Finite complex combination of normal-ordered ladder monomials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorPoly {
    terms: BTreeMap<LadderMonomial, Complex64>,
}

impl OperatorPoly {
    pub fn zero() -> Self {
        OperatorPoly::default()
    }

    pub fn identity() -> Self {
        OperatorPoly::from_term(LadderMonomial::identity(), Complex64::ONE)
    }

    pub fn from_term(mono: LadderMonomial, coeff: Complex64) -> Self {
        let mut p = OperatorPoly::zero();
        p.add_term(mono, coeff);
        p
    }

    /// Number operator of mode a, `a† a`.
    pub fn number_a() -> Self {
        OperatorPoly::from_term(LadderMonomial::new(1, 0, 1, 0), Complex64::ONE)
    }

    /// Number operator of mode b, `b† b`.
    pub fn number_b() -> Self {
        OperatorPoly::from_term(LadderMonomial::new(0, 1, 0, 1), Complex64::ONE)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LadderMonomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mono: &LadderMonomial) -> Complex64 {
        self.terms.get(mono).copied().unwrap_or(Complex64::ZERO)
    }

    /// Add `coeff * mono`, dropping the entry if the total cancels.
    pub fn add_term(&mut self, mono: LadderMonomial, coeff: Complex64) {
        if coeff == Complex64::ZERO {
            return;
        }
        let slot = self.terms.entry(mono).or_insert(Complex64::ZERO);
        *slot += coeff;
        if *slot == Complex64::ZERO {
            self.terms.remove(&mono);
        }
    }

    pub fn add_assign(&mut self, other: &OperatorPoly) {
        for (m, c) in other.terms() {
            self.add_term(*m, *c);
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = OperatorPoly::zero();
        for (m, c) in self.terms() {
            out.add_term(*m, *c * factor);
        }
        out
    }

    /// Formal adjoint: conjugate coefficients on adjoint monomials.
    pub fn adjoint(&self) -> Self {
        let mut out = OperatorPoly::zero();
        for (m, c) in self.terms() {
            out.add_term(m.adjoint(), c.conj());
        }
        out
    }

    /// True if the polynomial equals its formal adjoint within `tol` on
    /// every coefficient.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        let adj = self.adjoint();
        let mut keys: std::collections::BTreeSet<LadderMonomial> =
            self.terms.keys().copied().collect();
        keys.extend(adj.terms.keys().copied());
        keys.iter()
            .all(|k| (self.coefficient(k) - adj.coefficient(k)).norm() <= tol)
    }

    pub fn conserves_number(&self) -> bool {
        self.terms.keys().all(|m| m.conserves_number())
    }

    /// Exact normal-ordered product. Each cross pairing
    /// `a^r (a†)^p = sum_j C(r,j) C(p,j) j! (a†)^(p-j) a^(r-j)` (same for b)
    /// is expanded with exact integer coefficients.
    pub fn multiply(&self, other: &OperatorPoly) -> OperatorPoly {
        let mut out = OperatorPoly::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                let coeff = c1 * c2;
                for (ja, wa) in reorder_weights(m1.a, m2.adag) {
                    for (jb, wb) in reorder_weights(m1.b, m2.bdag) {
                        let mono = LadderMonomial::new(
                            m1.adag + m2.adag - ja,
                            m1.bdag + m2.bdag - jb,
                            m1.a + m2.a - ja,
                            m1.b + m2.b - jb,
                        );
                        out.add_term(mono, coeff * wa * wb);
                    }
                }
            }
        }
        out
    }

    /// `<l1| P |l2>` in the N-particle sector.
    pub fn matrix_element(&self, spec: &SubspaceSpec, l1: i64, l2: i64) -> Result<Complex64> {
        let (na1, nb1) = spec.occupations(l1)?;
        let (na2, nb2) = spec.occupations(l2)?;
        let mut acc = Complex64::ZERO;
        for (m, c) in self.terms() {
            let v = m.element_from_occupations(na1, nb1, na2, nb2);
            if v != 0.0 {
                acc += c * v;
            }
        }
        Ok(acc)
    }

    /// Expectation on a subspace state, as a Rayleigh quotient so that a
    /// global phase or rounding of the stored norm cannot leak in.
    pub fn expectation(&self, state: &StateVector) -> Result<Complex64> {
        let op = SectorOp::new(self, &state.spec())?;
        Ok(op.expectation(state.coeffs()))
    }
}

/// Weights of `a^r (a†)^p = sum_j C(r,j) C(p,j) j! (a†)^(p-j) a^(r-j)`.
fn reorder_weights(r: u32, p: u32) -> Vec<(u32, f64)> {
    let jmax = r.min(p);
    let mut out = Vec::with_capacity(jmax as usize + 1);
    for j in 0..=jmax {
        let mut w = 1.0;
        for i in 0..j {
            // C(r,j) C(p,j) j! accumulated as (r-i)(p-i)/(i+1)
            w *= (r - i) as f64 * (p - i) as f64 / (i + 1) as f64;
        }
        out.push((j, w));
    }
    out
}

/// A number-conserving polynomial compiled onto the sampling subspace:
/// per index shift d, the amplitudes `<l+d| P |l>` for every l with both
/// ends inside the window. This is the hot path for expectations and
/// window traces.
#[derive(Debug, Clone)]
pub struct SectorOp {
    dim: usize,
    /// (shift, coefficients indexed by the ket offset)
    bands: Vec<(i64, Vec<Complex64>)>,
}

impl SectorOp {
    pub fn new(poly: &OperatorPoly, spec: &SubspaceSpec) -> Result<Self> {
        let n = spec.dim() as usize;
        let mut by_shift: BTreeMap<i64, Vec<(LadderMonomial, Complex64)>> = BTreeMap::new();
        for (m, c) in poly.terms() {
            if !m.conserves_number() {
                // off-sector monomials have no matrix elements inside one sector
                continue;
            }
            by_shift.entry(m.index_shift()).or_default().push((*m, *c));
        }
        let mut bands = Vec::with_capacity(by_shift.len());
        for (shift, monos) in by_shift {
            let mut coeffs = vec![Complex64::ZERO; n];
            let mut any = false;
            for (i, ell) in spec.indices().enumerate() {
                let bra = ell + shift;
                if bra.abs() > spec.max_index() {
                    continue;
                }
                let mut acc = Complex64::ZERO;
                for (m, c) in &monos {
                    let v = m.matrix_element(spec, bra, ell)?;
                    if v != 0.0 {
                        acc += c * v;
                    }
                }
                if acc != Complex64::ZERO {
                    any = true;
                }
                coeffs[i] = acc;
            }
            if any {
                bands.push((shift, coeffs));
            }
        }
        Ok(SectorOp { dim: n, bands })
    }

    /// Rayleigh quotient `<z|P|z> / <z|z>`.
    pub fn expectation(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.dim);
        if self.dim == 1 {
            // one-dimensional window: the quotient is the diagonal value
            // itself, independent of the amplitude
            return self
                .bands
                .iter()
                .find(|(d, _)| *d == 0)
                .map(|(_, c)| c[0])
                .unwrap_or(Complex64::ZERO);
        }
        let norm2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let mut acc = Complex64::ZERO;
        for (shift, coeffs) in &self.bands {
            let d = *shift;
            for (i, c) in coeffs.iter().enumerate() {
                if *c == Complex64::ZERO {
                    continue;
                }
                let bra = i as i64 + d;
                if bra < 0 || bra >= self.dim as i64 {
                    continue;
                }
                acc += z[bra as usize].conj() * z[i] * c;
            }
        }
        acc / norm2
    }

    /// Window average `(1/n) sum_l <l|P|l>`.
    pub fn window_mean(&self) -> Complex64 {
        let diag = self
            .bands
            .iter()
            .find(|(d, _)| *d == 0)
            .map(|(_, c)| c.iter().sum::<Complex64>())
            .unwrap_or(Complex64::ZERO);
        diag / self.dim as f64
    }

    /// Double window trace `sum_{l1,l2} <l1|A|l2><l2|B|l1>`, exploiting the
    /// band structure: only shift pairs (d, -d) contribute.
    pub fn pair_trace(a: &SectorOp, b: &SectorOp) -> Complex64 {
        debug_assert_eq!(a.dim, b.dim);
        let mut acc = Complex64::ZERO;
        for (da, ca) in &a.bands {
            for (db, cb) in &b.bands {
                if da + db != 0 {
                    continue;
                }
                // A_{l+d, l} pairs with B_{l, l+d}
                for (i, va) in ca.iter().enumerate() {
                    let bra = i as i64 + da;
                    if bra < 0 || bra >= a.dim as i64 {
                        continue;
                    }
                    acc += va * cb[bra as usize];
                }
            }
        }
        acc
    }
}
