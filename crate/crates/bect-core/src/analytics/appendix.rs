//! Shorthand kernel combinations and the five fluctuation kernels
//! F40, F31, F22, F30, F21 that weight the moment sums in the averaged
//! quantum covariance. All are symmetric under exchange of their two
//! momentum arguments.

use num_complex::Complex64;

use crate::models::{Mode, ModeKernel, Momentum};

/// Evaluator for the shorthand combinations of one kernel.
#[derive(Debug, Clone, Copy)]
pub struct KernelCombos<'a> {
    kernel: &'a ModeKernel,
}

impl<'a> KernelCombos<'a> {
    pub fn new(kernel: &'a ModeKernel) -> Self {
        KernelCombos { kernel }
    }

    fn f(&self, x: Mode, y: Mode, q: &Momentum) -> Complex64 {
        self.kernel.eval(x, y, q)
    }

    /// I(k) = F_aa(k) + F_bb(k).
    pub fn i(&self, k: &Momentum) -> Complex64 {
        self.f(Mode::A, Mode::A, k) + self.f(Mode::B, Mode::B, k)
    }

    /// F(k1, k2) = F_ab(k1) F_ba(k2) + F_ba(k1) F_ab(k2).
    pub fn fcomb(&self, k1: &Momentum, k2: &Momentum) -> Complex64 {
        self.f(Mode::A, Mode::B, k1) * self.f(Mode::B, Mode::A, k2)
            + self.f(Mode::B, Mode::A, k1) * self.f(Mode::A, Mode::B, k2)
    }

    /// G(k1, k2) = F(k1, k2 - k1) + F(-k1, k2 + k1).
    pub fn g(&self, k1: &Momentum, k2: &Momentum) -> Complex64 {
        self.fcomb(k1, &k2.sub(k1)) + self.fcomb(&k1.neg(), &k2.add(k1))
    }

    /// S(k1, k2) = F_aa(k1) F_aa(k2) + F_bb(k1) F_bb(k2).
    pub fn s(&self, k1: &Momentum, k2: &Momentum) -> Complex64 {
        self.f(Mode::A, Mode::A, k1) * self.f(Mode::A, Mode::A, k2)
            + self.f(Mode::B, Mode::B, k1) * self.f(Mode::B, Mode::B, k2)
    }

    /// T(k1, k2) = F_aa(k1) F_bb(k2) + F_bb(k1) F_aa(k2).
    pub fn t(&self, k1: &Momentum, k2: &Momentum) -> Complex64 {
        self.f(Mode::A, Mode::A, k1) * self.f(Mode::B, Mode::B, k2)
            + self.f(Mode::B, Mode::B, k1) * self.f(Mode::A, Mode::A, k2)
    }

    /// Two-argument R(k1, k2) = T(k1, k2) + F(k1, k2).
    pub fn r2(&self, k1: &Momentum, k2: &Momentum) -> Complex64 {
        self.t(k1, k2) + self.fcomb(k1, k2)
    }

    /// One-argument R(k) = R(k, -k).
    pub fn r1(&self, k: &Momentum) -> Complex64 {
        self.r2(k, &k.neg())
    }

    /// U(k1, k2) = F_aa(k1) F_aa(k2) F_bb(k1+k2) + (a <-> b).
    pub fn u(&self, k1: &Momentum, k2: &Momentum) -> Complex64 {
        let sum = k1.add(k2);
        self.f(Mode::A, Mode::A, k1) * self.f(Mode::A, Mode::A, k2) * self.f(Mode::B, Mode::B, &sum)
            + self.f(Mode::B, Mode::B, k1)
                * self.f(Mode::B, Mode::B, k2)
                * self.f(Mode::A, Mode::A, &sum)
    }

    /// V(k1, k2) = F_aa(k1) F_aa(k2) F_aa(k1+k2) + (a -> b).
    pub fn v(&self, k1: &Momentum, k2: &Momentum) -> Complex64 {
        let sum = k1.add(k2);
        self.f(Mode::A, Mode::A, k1) * self.f(Mode::A, Mode::A, k2) * self.f(Mode::A, Mode::A, &sum)
            + self.f(Mode::B, Mode::B, k1)
                * self.f(Mode::B, Mode::B, k2)
                * self.f(Mode::B, Mode::B, &sum)
    }
}

/// The five fluctuation kernels at a momentum pair, plus samples of the
/// shorthand combinations at the same arguments.
#[derive(Debug, Clone, Copy)]
pub struct FluctuationKernels {
    pub f40: Complex64,
    pub f31: Complex64,
    pub f22: Complex64,
    pub f30: Complex64,
    pub f21: Complex64,
    pub i_k: Complex64,
    pub i_k2: Complex64,
    pub fcomb: Complex64,
    pub g: Complex64,
    pub s: Complex64,
    pub t: Complex64,
    pub r_k: Complex64,
    pub r_k2: Complex64,
    pub u: Complex64,
    pub v: Complex64,
}

/// Evaluate every displayed combination at (k, k2).
pub fn appendix_functions(kernel: &ModeKernel, k: &Momentum, k2: &Momentum) -> FluctuationKernels {
    let c = KernelCombos::new(kernel);
    let mk = k.neg();
    let mk2 = k2.neg();
    let faa = |q: &Momentum| kernel.eval(Mode::A, Mode::A, q);
    let fbb = |q: &Momentum| kernel.eval(Mode::B, Mode::B, q);
    let fab = |q: &Momentum| kernel.eval(Mode::A, Mode::B, q);
    let fba = |q: &Momentum| kernel.eval(Mode::B, Mode::A, q);

    let f40 = Complex64::new(
        (faa(k) * faa(k2)).norm_sqr() + (fbb(k) * fbb(k2)).norm_sqr(),
        0.0,
    );

    let f31 = c.r1(k) * c.s(k2, &mk2)
        + c.s(k, &mk) * c.r1(k2)
        + c.s(k, k2) * c.fcomb(&mk, &mk2)
        + c.s(&mk, k2) * c.fcomb(k, &mk2)
        + c.s(k, &mk2) * c.fcomb(&mk, k2)
        + c.s(&mk, &mk2) * c.fcomb(k, k2);

    let f22 = Complex64::new(
        (faa(k) * fbb(k2)).norm_sqr() + (fbb(k) * faa(k2)).norm_sqr(),
        0.0,
    ) + c.r1(k) * c.r1(k2)
        + c.t(k, k2) * c.fcomb(&mk, &mk2)
        + c.t(k, &mk2) * c.fcomb(&mk, k2)
        + c.t(&mk, k2) * c.fcomb(k, &mk2)
        + c.t(&mk, &mk2) * c.fcomb(k, k2)
        + fab(k) * fab(&mk) * fba(k2) * fba(&mk2)
        + fba(k) * fba(&mk) * fab(k2) * fab(&mk2);

    let f30 = c.v(k, k2) + c.v(k, &mk2) + c.v(&mk, k2) + c.v(&mk, &mk2);

    let f21 = c.i(k) * c.g(k2, &mk)
        + c.i(&mk) * c.g(k2, k)
        + c.i(k2) * c.g(k, &mk2)
        + c.i(&mk2) * c.g(k, k2)
        + c.i(&k.add(k2)) * c.r2(&mk, &mk2)
        + c.i(&k.sub(k2)) * c.r2(k, &mk2)
        + c.i(&k2.sub(k)) * c.r2(&mk, k2)
        + c.i(&k.add(k2).neg()) * c.r2(k, k2)
        + c.u(k, k2)
        + c.u(k, &mk2)
        + c.u(&mk, k2)
        + c.u(&mk, &mk2);

    FluctuationKernels {
        f40,
        f31,
        f22,
        f30,
        f21,
        i_k: c.i(k),
        i_k2: c.i(k2),
        fcomb: c.fcomb(k, k2),
        g: c.g(k, k2),
        s: c.s(k, k2),
        t: c.t(k, k2),
        r_k: c.r1(k),
        r_k2: c.r1(k2),
        u: c.u(k, k2),
        v: c.v(k, k2),
    }
}
