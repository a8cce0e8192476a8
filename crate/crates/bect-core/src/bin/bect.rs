//! Command-line front end: named experiments with JSON + CSV artifacts.
//!
//! Units follow the library conventions: lengths in the Gaussian mode
//! width, times in m sigma^2/hbar, continuous momenta in inverse widths;
//! plane-wave momenta are integer lattice vectors on the unit box. Every
//! stochastic command requires an explicit seed. Exit status: 0 on
//! success, 1 on usage or configuration errors, 2 when a built-in
//! comparison fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use bect_core::analytics::{
    self, covariance::Provenance, gaussian as gauss, rat_to_f64,
};
use bect_core::error::Error;
use bect_core::fock::{self, EnsembleSampler, SubspaceSpec};
use bect_core::models::{GaussianModel, ModeKernel, Momentum, PlaneWaveModel};
use bect_core::report::{
    fmt_g12, report_json, write_atomic, Check, ParamValue, Report, RunManifest, Table,
};
use bect_core::runner::{
    self, average_pattern, compare_reports, scaling_scan, CompareTolerances, DimRule,
    ExperimentConfig, ScanConfig, StatReport,
};

#[derive(Parser)]
#[command(
    name = "bect",
    version,
    about = "Two-mode condensate interference statistics: sampling, exact traces, closed forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample states and test coefficient moments against the uniform law
    Moments(MomentsArgs),
    /// Window moment sums, direct summation against the closed forms
    Sums(SumsArgs),
    /// Plane-wave statistics: Monte Carlo, exact trace, and closed forms
    PlaneWave(PlaneWaveArgs),
    /// Expanding-Gaussian statistics on a momentum grid
    Gaussian(GaussianArgs),
    /// Single-run fringe patterns and their flat average
    Pattern(PatternArgs),
    /// Scaling of the relative fringe fluctuation with particle count
    Scan(ScanArgs),
    /// Mean of R over momentum for the expanding-Gaussian pair
    Fig1(Fig1Args),
    /// Dominant variance contribution in a chosen regime
    Fig2(Fig2Args),
    /// Compare two stat-report artifacts
    Compare(CompareArgs),
}

#[derive(Args)]
struct SpecArgs {
    /// Total particle count (even, >= 2)
    #[arg(long = "N", value_name = "N")]
    particles: u64,
    /// Sampling window dimension (odd, 1 <= n <= N+1)
    #[arg(long = "n", value_name = "n")]
    dim: u64,
}

impl SpecArgs {
    fn build(&self) -> Result<SubspaceSpec, Error> {
        SubspaceSpec::new(self.particles, self.dim)
    }
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    batches: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SumsArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlaneWaveArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Lattice wavevector of mode a: "j" or "jx,jy,jz"
    #[arg(long, value_name = "K0")]
    k0: String,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// Grid covers j * k0 for |j| <= kmax
    #[arg(long, default_value_t = 4)]
    kmax: i64,
    #[arg(long, default_value_t = 32)]
    batches: usize,
    #[arg(long = "tol-se", default_value_t = 5.0)]
    tol_se: f64,
    #[arg(long = "band-coeff", default_value_t = 2.0)]
    band_coeff: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GaussianArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Half distance between the packet centers, in widths
    #[arg(long)]
    alpha: f64,
    /// Expansion time in m sigma^2 / hbar
    #[arg(long)]
    t: f64,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long = "grid-points", default_value_t = 2048)]
    grid_points: usize,
    #[arg(long, default_value_t = 32)]
    batches: usize,
    #[arg(long = "tol-se", default_value_t = 5.0)]
    tol_se: f64,
    #[arg(long = "band-coeff", default_value_t = 2.0)]
    band_coeff: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PatternArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Fringe half-wavevector of the emitted pattern
    #[arg(long)]
    k0: f64,
    /// Number of reconstructed runs
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    points: usize,
    /// Position span; default four fringe periods
    #[arg(long)]
    span: Option<f64>,
    #[arg(long, default_value_t = 32)]
    batches: usize,
    #[arg(long = "tol-se", default_value_t = 5.0)]
    tol_se: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// Window growth exponent: n = floor(N^gamma) rounded to odd
    #[arg(long, conflicts_with = "fixed_n")]
    gamma: Option<f64>,
    /// Fixed window dimension
    #[arg(long = "fixed-n")]
    fixed_n: Option<u64>,
    /// Smallest particle count as a power of two
    #[arg(long = "min-exp", default_value_t = 8)]
    min_exp: u32,
    /// Largest particle count as a power of two
    #[arg(long = "max-exp", default_value_t = 14)]
    max_exp: u32,
    /// Optional asserted slope of the dominant-regime decay
    #[arg(long = "expect-slope")]
    expect_slope: Option<f64>,
    #[arg(long = "slope-tol", default_value_t = 0.05)]
    slope_tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Fig1Args {
    #[arg(long, default_value_t = 5.0)]
    alpha: f64,
    #[arg(long, default_value_t = 50.0)]
    t: f64,
    #[arg(long = "grid-points", default_value_t = 2048)]
    grid_points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Fig2Args {
    /// Regime: "quantum" (n << N^(3/4)) or "statistical" (n >> N^(3/4))
    #[arg(long)]
    regime: String,
    #[arg(long, default_value_t = 5.0)]
    alpha: f64,
    #[arg(long, default_value_t = 50.0)]
    t: f64,
    #[arg(long = "N", default_value_t = 1000)]
    particles: u64,
    /// Window dimension; default 11 (quantum) or 501 (statistical)
    #[arg(long = "n")]
    dim: Option<u64>,
    #[arg(long = "grid-points", default_value_t = 2048)]
    grid_points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// First report JSON
    #[arg(long)]
    a: PathBuf,
    /// Second report JSON
    #[arg(long)]
    b: PathBuf,
    #[arg(long = "tol-se", default_value_t = 5.0)]
    tol_se: f64,
    #[arg(long = "band-coeff", default_value_t = 2.0)]
    band_coeff: f64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("BECT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version requests are not errors
            use clap::error::ErrorKind;
            let kind = err.kind();
            let _ = err.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let started = Instant::now();
    let outcome = match cli.command {
        Command::Moments(args) => run_moments(args),
        Command::Sums(args) => run_sums(args),
        Command::PlaneWave(args) => run_plane_wave(args),
        Command::Gaussian(args) => run_gaussian(args),
        Command::Pattern(args) => run_pattern(args),
        Command::Scan(args) => run_scan(args),
        Command::Fig1(args) => run_fig1(args),
        Command::Fig2(args) => run_fig2(args),
        Command::Compare(args) => run_compare(args),
    };
    match outcome {
        Ok((report, out)) => match finalize(&report, &out, started) {
            Ok(()) => {
                if report.all_passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(2)
                }
            }
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(1)
            }
        },
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

/// Strip a known extension to get the artifact base path.
fn artifact_base(out: &Path) -> PathBuf {
    match out.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("csv") => out.with_extension(""),
        _ => out.to_path_buf(),
    }
}

/// Write {base}.json, one CSV per table, and {base}.manifest.json; print
/// the one-line summary.
fn finalize(report: &Report, out: &Path, started: Instant) -> Result<(), Error> {
    let base = artifact_base(out);
    let json_path = base.with_extension("json");
    let mut artifacts = vec![json_path.display().to_string()];
    write_atomic(&json_path, report_json(report).as_bytes())?;
    for (i, table) in report.tables.iter().enumerate() {
        let csv_path = if i == 0 {
            base.with_extension("csv")
        } else {
            base.with_file_name(format!(
                "{}_{}.csv",
                base.file_name().unwrap_or_default().to_string_lossy(),
                table.name
            ))
        };
        write_atomic(&csv_path, table.to_csv().as_bytes())?;
        artifacts.push(csv_path.display().to_string());
    }
    let manifest = RunManifest {
        command: report.command.clone(),
        argv: std::env::args().collect(),
        params: report.params.clone(),
        seed: report.seed,
        artifacts: artifacts.clone(),
        duration_ms: started.elapsed().as_millis() as u64,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let manifest_path = base.with_file_name(format!(
        "{}.manifest.json",
        base.file_name().unwrap_or_default().to_string_lossy()
    ));
    write_atomic(
        &manifest_path,
        serde_json::to_string_pretty(&manifest)
            .expect("manifest serialization")
            .as_bytes(),
    )?;
    println!("{}", report.summary);
    Ok(())
}

fn parse_k0(text: &str) -> Result<[i64; 3], Error> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| -> Result<i64, Error> {
        s.trim().parse().map_err(|_| Error::ZeroFringeMomentum)
    };
    match parts.as_slice() {
        [x] => Ok([parse(x)?, 0, 0]),
        [x, y, z] => Ok([parse(x)?, parse(y)?, parse(z)?]),
        _ => Err(Error::ZeroFringeMomentum),
    }
}

fn spec_params(report: &mut Report, spec: &SubspaceSpec) {
    report.set_param("N", spec.particles());
    report.set_param("n", spec.dim());
}

/// Columns shared by every stat-report table.
const STAT_COLUMNS: [&str; 10] = [
    "j", "k1", "k2", "k3", "mean", "mean_se", "ens_cov", "ens_cov_se", "qvar", "qvar_se",
];

fn stat_table(name: &str, report: &StatReport, labels: &[f64]) -> Table {
    let mut t = Table::new(name, &STAT_COLUMNS);
    for (i, p) in report.points.iter().enumerate() {
        let c = p.momentum.as_components();
        t.push(vec![
            labels.get(i).copied().unwrap_or(i as f64),
            c[0],
            c[1],
            c[2],
            p.mean.value,
            p.mean.se,
            p.ensemble_cov.value,
            p.ensemble_cov.se,
            p.quantum_cov_avg.value,
            p.quantum_cov_avg.se,
        ]);
    }
    t
}

fn stat_report_from_table(table: &Table, particles: u64, dim: u64, provenance: Provenance) -> StatReport {
    let lattice = provenance_is_lattice(table);
    let points = table
        .rows
        .iter()
        .map(|row| {
            let momentum = if lattice {
                Momentum::Lattice([row[1] as i64, row[2] as i64, row[3] as i64])
            } else {
                Momentum::Real(row[1])
            };
            runner::KPointStats {
                momentum,
                mean: runner::Estimate {
                    value: row[4],
                    se: row[5],
                },
                ensemble_cov: runner::Estimate {
                    value: row[6],
                    se: row[7],
                },
                quantum_cov_avg: runner::Estimate {
                    value: row[8],
                    se: row[9],
                },
            }
        })
        .collect();
    StatReport {
        particles,
        dim,
        provenance,
        points,
    }
}

fn provenance_is_lattice(table: &Table) -> bool {
    table
        .rows
        .iter()
        .all(|r| r[1].fract() == 0.0 && r[2].fract() == 0.0 && r[3].fract() == 0.0)
}

fn comparison_checks(
    checks: &mut Vec<Check>,
    prefix: &str,
    comparison: &runner::Comparison,
) {
    // one check per compared quantity, worst point across the grid
    for quantity in ["mean", "ensemble_cov", "quantum_cov_avg"] {
        let worst = comparison
            .rows
            .iter()
            .filter(|r| r.quantity == quantity)
            .max_by(|x, y| x.severity.total_cmp(&y.severity));
        if let Some(row) = worst {
            checks.push(Check {
                name: format!("{prefix}_{quantity}"),
                passed: comparison
                    .rows
                    .iter()
                    .filter(|r| r.quantity == quantity)
                    .all(|r| r.passed),
                measured: row.deviation,
                expected: 0.0,
                tolerance: row.allowance,
            });
        }
    }
}

fn run_moments(args: MomentsArgs) -> Result<(Report, PathBuf), Error> {
    let spec = args.spec.build()?;
    let sampler = EnsembleSampler::new(spec, args.seed);
    let mut report = Report::new("moments", Some(args.seed));
    spec_params(&mut report, &spec);
    report.set_param("samples", args.samples as u64);
    report.set_param("batches", args.batches as u64);

    let table = fock::pair_moment_table(&sampler, args.samples, args.batches)?;
    let n = spec.dim() as usize;
    let mut pair_table = Table::new(
        "pair_moments",
        &["l1", "l2", "mean_re", "mean_im", "se", "expected", "dev_se"],
    );
    let mut worst_pair = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let l1 = spec.index_at(i);
            let l2 = spec.index_at(j);
            let mean = table.mean[i * n + j];
            let se = table.standard_error[i * n + j];
            let expected = if i == j { 1.0 / n as f64 } else { 0.0 };
            let dev = (mean - num_complex::Complex64::new(expected, 0.0)).norm();
            let dev_se = if se > 0.0 { dev / se } else { 0.0 };
            worst_pair = worst_pair.max(dev_se);
            pair_table.push(vec![
                l1 as f64, l2 as f64, mean.re, mean.im, se, expected, dev_se,
            ]);
        }
    }

    let tuples = quartic_battery(&spec);
    let estimates = fock::quartic_moments(&sampler, &tuples, args.samples, args.batches)?;
    let mut quartic_table = Table::new(
        "quartic_moments",
        &[
            "l1", "l2", "l3", "l4", "mean_re", "mean_im", "se", "expected", "dev_se",
        ],
    );
    let mut worst_quartic = 0.0f64;
    for (t, e) in tuples.iter().zip(&estimates) {
        let expected =
            fock::MomentIndices::Quartic(t.0, t.1, t.2, t.3).expected(&spec);
        let dev_se = e.deviation_se(num_complex::Complex64::new(expected, 0.0));
        let dev_se = if dev_se.is_finite() { dev_se } else { 0.0 };
        worst_quartic = worst_quartic.max(dev_se);
        quartic_table.push(vec![
            t.0 as f64,
            t.1 as f64,
            t.2 as f64,
            t.3 as f64,
            e.value.re,
            e.value.im,
            e.standard_error,
            expected,
            dev_se,
        ]);
    }

    report.tables.push(pair_table);
    report.tables.push(quartic_table);
    report.checks.push(Check {
        name: "pair_moments_within_5se".into(),
        passed: worst_pair <= 5.0,
        measured: worst_pair,
        expected: 0.0,
        tolerance: 5.0,
    });
    report.checks.push(Check {
        name: "quartic_moments_within_5se".into(),
        passed: worst_quartic <= 5.0,
        measured: worst_quartic,
        expected: 0.0,
        tolerance: 5.0,
    });
    report.summary = format!(
        "moments N={} n={} M={}: worst pair {:.2} se, worst quartic {:.2} se -> {}",
        spec.particles(),
        spec.dim(),
        args.samples,
        worst_pair,
        worst_quartic,
        if report.all_passed() { "pass" } else { "FAIL" }
    );
    Ok((report, args.out))
}

fn quartic_battery(spec: &SubspaceSpec) -> Vec<(i64, i64, i64, i64)> {
    let m = spec.max_index();
    let mut tuples = vec![(0, 0, 0, 0)];
    if m >= 1 {
        tuples.push((0, m, 0, m));
        tuples.push((0, m, m, 0));
        tuples.push((m, m, 0, 0));
        tuples.push((m, -m, m, -m));
        tuples.push((0, 1, 0, 1));
        tuples.push((1, 0, 0, 1));
        tuples.push((-1, 1, 1, -1));
    }
    tuples
}

fn run_sums(args: SumsArgs) -> Result<(Report, PathBuf), Error> {
    let spec = args.spec.build()?;
    let exact = analytics::s_sums_exact(&spec);
    let closed = analytics::s_sums_closed(&spec);
    let mut report = Report::new("sums", None);
    spec_params(&mut report, &spec);
    let mut table = Table::new(
        "sums",
        &["closed", "S20", "S11", "S40", "S31", "S22", "S30", "S21"],
    );
    let mut row = vec![0.0];
    row.extend(exact.values_f64());
    table.push(row);
    let mut row = vec![1.0];
    row.extend(closed.values_f64());
    table.push(row);
    report.tables.push(table);
    for (name, e, c) in [
        ("S20", exact.s20, closed.s20),
        ("S11", exact.s11, closed.s11),
    ] {
        report.checks.push(Check {
            name: format!("{name}_closed_is_exact"),
            passed: e == c,
            measured: rat_to_f64(c - e),
            expected: 0.0,
            tolerance: 0.0,
        });
    }
    report.summary = format!(
        "sums N={} n={}: S20={} S11={} (exact) -> {}",
        spec.particles(),
        spec.dim(),
        fmt_g12(rat_to_f64(exact.s20)),
        fmt_g12(rat_to_f64(exact.s11)),
        if report.all_passed() { "pass" } else { "FAIL" }
    );
    Ok((report, args.out))
}

fn run_plane_wave(args: PlaneWaveArgs) -> Result<(Report, PathBuf), Error> {
    let spec = args.spec.build()?;
    let k0 = parse_k0(&args.k0)?;
    let model = PlaneWaveModel::new(k0)?;
    let kernel = ModeKernel::plane_wave(model);
    let labels: Vec<f64> = (-args.kmax..=args.kmax).map(|j| j as f64).collect();
    let grid: Vec<Momentum> = (-args.kmax..=args.kmax)
        .map(|j| Momentum::Lattice([j * k0[0], j * k0[1], j * k0[2]]))
        .collect();

    let config = ExperimentConfig::new(spec, kernel, grid.clone(), args.samples, args.seed)?
        .with_batches(args.batches);
    let mc = runner::run_ensemble(&config)?;
    let exact = runner::exact_report(&spec, &kernel, &grid)?;
    let closed = runner::closed_report(&spec, &kernel, &grid)?;

    let mut report = Report::new("plane-wave", Some(args.seed));
    spec_params(&mut report, &spec);
    report.set_param("k0", args.k0.as_str());
    report.set_param("samples", args.samples as u64);
    report.set_param("kmax", args.kmax as i64);
    report.set_param("tol_se", args.tol_se);
    report.set_param("band_coeff", args.band_coeff);
    report
        .tables
        .push(stat_table("stat_report_montecarlo", &mc, &labels));
    report
        .tables
        .push(stat_table("stat_report_exact", &exact, &labels));
    report
        .tables
        .push(stat_table("stat_report_closed", &closed, &labels));

    let tol = CompareTolerances {
        se_units: args.tol_se,
        band_coeff: args.band_coeff,
    };
    let mc_vs_exact = compare_reports(&mc, &exact, &tol)?;
    comparison_checks(&mut report.checks, "mc_vs_exact", &mc_vs_exact);
    let closed_vs_exact = compare_reports(&closed, &exact, &tol)?;
    comparison_checks(&mut report.checks, "closed_vs_exact", &closed_vs_exact);

    report.summary = format!(
        "plane-wave N={} n={} k0={} M={}: {} checks -> {}",
        spec.particles(),
        spec.dim(),
        args.k0,
        args.samples,
        report.checks.len(),
        if report.all_passed() { "pass" } else { "FAIL" }
    );
    Ok((report, args.out))
}

fn run_gaussian(args: GaussianArgs) -> Result<(Report, PathBuf), Error> {
    let spec = args.spec.build()?;
    let model = GaussianModel::new(args.alpha, args.t)?;
    let kernel = ModeKernel::gaussian(model);
    let k0 = model.k0_of_t();

    let mut report = Report::new("gaussian", Some(args.seed));
    spec_params(&mut report, &spec);
    report.set_param("alpha", args.alpha);
    report.set_param("t", args.t);
    report.set_param("samples", args.samples as u64);
    report.set_param("k0_t", k0);
    report.set_param("overlap", model.orthogonality_report());

    // closed curves on the dense grid, both evaluation paths
    let grid = gauss::default_grid(&model, args.grid_points);
    let exact_path = gauss::gaussian_closed_set(&spec, &model, &grid, gauss::GaussianPath::ExactKernel);
    let late_path = gauss::gaussian_closed_set(&spec, &model, &grid, gauss::GaussianPath::LargeTime);
    let mut curve = Table::new(
        "closed_curve",
        &[
            "k",
            "mean",
            "ens_cov",
            "qvar",
            "mean_large_t",
            "ens_cov_large_t",
            "qvar_large_t",
            "c30",
            "c12",
            "c04",
            "c03",
        ],
    );
    for ((k, a), b) in grid.iter().zip(&exact_path).zip(&late_path) {
        let c = a.c_coefficients.unwrap_or([0.0; 4]);
        curve.push(vec![
            *k,
            a.mean,
            a.ensemble_cov,
            a.quantum_cov_avg,
            b.mean,
            b.ensemble_cov,
            b.quantum_cov_avg,
            c[0],
            c[1],
            c[2],
            c[3],
        ]);
    }
    report.tables.push(curve);

    // sparse check grid: Monte Carlo and exact traces
    let check: Vec<Momentum> = [0.0, k0, 2.0 * k0, -2.0 * k0, 3.0 * k0]
        .iter()
        .map(|&k| Momentum::Real(k))
        .collect();
    let labels: Vec<f64> = (0..check.len()).map(|i| i as f64).collect();
    let config = ExperimentConfig::new(spec, kernel, check.clone(), args.samples, args.seed)?
        .with_batches(args.batches);
    let mc = runner::run_ensemble(&config)?;
    let exact = runner::exact_report(&spec, &kernel, &check)?;
    let closed = runner::closed_report(&spec, &kernel, &check)?;
    report
        .tables
        .push(stat_table("stat_report_montecarlo", &mc, &labels));
    report
        .tables
        .push(stat_table("stat_report_exact", &exact, &labels));
    report
        .tables
        .push(stat_table("stat_report_closed", &closed, &labels));
    let tol = CompareTolerances {
        se_units: args.tol_se,
        band_coeff: args.band_coeff,
    };
    let mc_vs_exact = compare_reports(&mc, &exact, &tol)?;
    comparison_checks(&mut report.checks, "mc_vs_exact", &mc_vs_exact);
    let closed_vs_exact = compare_reports(&closed, &exact, &tol)?;
    comparison_checks(&mut report.checks, "closed_vs_exact", &closed_vs_exact);

    let ortho_note = if model.is_quasi_orthogonal(bect_core::models::ORTHOGONALITY_TOL) {
        String::new()
    } else {
        format!(
            " [warning: mode overlap {:.3e} above {:.0e}]",
            model.orthogonality_report(),
            bect_core::models::ORTHOGONALITY_TOL
        )
    };
    report.summary = format!(
        "gaussian N={} n={} alpha={} t={}: 2k0(t)={} -> {}{}",
        spec.particles(),
        spec.dim(),
        args.alpha,
        args.t,
        fmt_g12(2.0 * k0),
        if report.all_passed() { "pass" } else { "FAIL" },
        ortho_note
    );
    Ok((report, args.out))
}

fn run_pattern(args: PatternArgs) -> Result<(Report, PathBuf), Error> {
    let spec = args.spec.build()?;
    if args.k0 == 0.0 || !args.k0.is_finite() {
        return Err(Error::ZeroFringeMomentum);
    }
    let kernel = ModeKernel::plane_wave(PlaneWaveModel::new_1d(1)?);
    let span = args
        .span
        .unwrap_or(4.0 * std::f64::consts::PI / args.k0.abs());
    let positions: Vec<f64> = (0..args.points)
        .map(|i| span * i as f64 / args.points as f64)
        .collect();

    let (mean, se) = average_pattern(
        &spec,
        &kernel,
        args.k0,
        &positions,
        args.samples,
        args.seed,
        args.batches,
    )?;
    let nf = spec.particles() as f64;
    let mut table = Table::new("average_pattern", &["r", "mean_density", "se", "dev_se"]);
    let mut worst = 0.0f64;
    for ((r, m), s) in positions.iter().zip(&mean).zip(&se) {
        let dev_se = if *s > 0.0 { (m - nf).abs() / s } else { 0.0 };
        worst = worst.max(dev_se);
        table.push(vec![*r, *m, *s, dev_se]);
    }
    report_pattern(args, spec, table, worst)
}

fn report_pattern(
    args: PatternArgs,
    spec: SubspaceSpec,
    table: Table,
    worst: f64,
) -> Result<(Report, PathBuf), Error> {
    let mut report = Report::new("pattern", Some(args.seed));
    spec_params(&mut report, &spec);
    report.set_param("k0", args.k0);
    report.set_param("samples", args.samples as u64);
    report.set_param("period", std::f64::consts::PI / args.k0.abs());

    // a few individual reconstructed runs for inspection
    let sampler = EnsembleSampler::new(spec, args.seed);
    let kernel = ModeKernel::plane_wave(PlaneWaveModel::new_1d(1)?);
    let mut runs = Table::new("runs", &["run", "phase", "amplitude", "visibility"]);
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(args.seed);
    for i in 0..args.samples.min(64) {
        let state = sampler.state(i as u64);
        let rec = bect_core::runner::single_run_pattern(
            &state,
            &kernel,
            args.k0,
            &[],
            &mut rng,
        )?;
        let vis = 2.0 * rec.amplitude / spec.particles() as f64;
        runs.push(vec![i as f64, rec.phase, rec.amplitude, vis]);
    }

    report.tables.push(table);
    report.tables.push(runs);
    report.checks.push(Check {
        name: "average_density_flat_within_5se".into(),
        passed: worst <= 5.0,
        measured: worst,
        expected: 0.0,
        tolerance: 5.0,
    });
    report.summary = format!(
        "pattern N={} n={} k0={} runs={}: worst flatness deviation {:.2} se -> {}",
        spec.particles(),
        spec.dim(),
        args.k0,
        args.samples,
        worst,
        if report.all_passed() { "pass" } else { "FAIL" }
    );
    Ok((report, args.out))
}

fn run_scan(args: ScanArgs) -> Result<(Report, PathBuf), Error> {
    let rule = match (args.gamma, args.fixed_n) {
        (Some(g), None) => DimRule::Power(g),
        (None, Some(n)) => DimRule::Fixed(n),
        _ => DimRule::Power(0.5),
    };
    if args.max_exp < args.min_exp {
        return Err(Error::ScanTooShort(0));
    }
    let particle_counts: Vec<u64> = (args.min_exp..=args.max_exp).map(|e| 1u64 << e).collect();
    let scan = scaling_scan(&ScanConfig {
        rule,
        particle_counts,
    })?;

    let mut report = Report::new("scan", None);
    match rule {
        DimRule::Power(g) => report.set_param("gamma", g),
        DimRule::Fixed(n) => report.set_param("fixed_n", n),
    }
    report.set_param("min_exp", args.min_exp as u64);
    report.set_param("max_exp", args.max_exp as u64);
    report.set_param("slope_total", scan.slope_total);
    report.set_param("slope_quantum", scan.slope_quantum);
    report.set_param("slope_statistical", scan.slope_statistical);
    report.set_param("slope_dominant", scan.slope_dominant);
    report.set_param(
        "dominant",
        match scan.dominant {
            runner::Regime::Quantum => "quantum",
            runner::Regime::Statistical => "statistical",
        },
    );
    if let Some(c) = scan.crossover {
        report.set_param("crossover_N", c.particles);
        report.set_param("crossover_n_over_N34", c.dim_over_n34);
    }

    let mut table = Table::new(
        "scan",
        &[
            "N",
            "n",
            "mean",
            "quantum_block",
            "statistical_block",
            "rel_total",
            "rel_quantum",
            "rel_statistical",
            "statistical_dominates",
        ],
    );
    for r in &scan.rows {
        table.push(vec![
            r.particles as f64,
            r.dim as f64,
            r.mean,
            r.quantum_block,
            r.statistical_block,
            r.rel_total,
            r.rel_quantum,
            r.rel_statistical,
            f64::from(r.dominant == runner::Regime::Statistical),
        ]);
    }
    report.tables.push(table);

    if let Some(expect) = args.expect_slope {
        report.checks.push(Check {
            name: "dominant_slope".into(),
            passed: (scan.slope_dominant - expect).abs() <= args.slope_tol,
            measured: scan.slope_dominant,
            expected: expect,
            tolerance: args.slope_tol,
        });
    }
    report.summary = format!(
        "scan {:?} N=2^{}..2^{}: slope total {:.3}, dominant {:.3} ({:?}) -> {}",
        rule,
        args.min_exp,
        args.max_exp,
        scan.slope_total,
        scan.slope_dominant,
        scan.dominant,
        if report.all_passed() { "pass" } else { "FAIL" }
    );
    Ok((report, args.out))
}

fn run_fig1(args: Fig1Args) -> Result<(Report, PathBuf), Error> {
    let model = GaussianModel::new(args.alpha, args.t)?;
    let grid = gauss::default_grid(&model, args.grid_points);
    let mut report = Report::new("fig1", None);
    report.set_param("alpha", args.alpha);
    report.set_param("t", args.t);
    report.set_param("k0_t", model.k0_of_t());
    report.set_param("peak_2k0", 2.0 * model.k0_of_t());
    let mut table = Table::new("fig1", &["k", "mean_ratio"]);
    for &k in &grid {
        table.push(vec![k, gauss::mean_ratio_exact_kernel(&model, k)]);
    }
    report.tables.push(table);
    report.summary = format!(
        "fig1 alpha={} t={}: three-peak mean ratio on {} points, side peaks at +-{}",
        args.alpha,
        args.t,
        grid.len(),
        fmt_g12(2.0 * model.k0_of_t())
    );
    Ok((report, args.out))
}

fn run_fig2(args: Fig2Args) -> Result<(Report, PathBuf), Error> {
    let model = GaussianModel::new(args.alpha, args.t)?;
    let (dim, quantum) = match args.regime.as_str() {
        "quantum" => (args.dim.unwrap_or(11), true),
        "statistical" => (args.dim.unwrap_or(501), false),
        other => return Err(Error::BadRegime(other.to_string())),
    };
    let spec = SubspaceSpec::new(args.particles, dim)?;
    let grid = gauss::default_grid(&model, args.grid_points);
    let nf = spec.particles() as f64;
    let n = spec.dim() as f64;

    let mut report = Report::new("fig2", None);
    spec_params(&mut report, &spec);
    report.set_param("alpha", args.alpha);
    report.set_param("t", args.t);
    report.set_param("regime", args.regime.as_str());
    report.set_param("peak_2k0", 2.0 * model.k0_of_t());
    let mut table = Table::new("fig2", &["k", "variance_slice"]);
    for &k in &grid {
        let v = if quantum {
            gauss::c30(&model, k, k) * nf.powi(3)
        } else {
            gauss::c04(&model, k, k) * n.powi(4)
        };
        table.push(vec![k, v]);
    }
    report.tables.push(table);
    report.summary = format!(
        "fig2 regime={} N={} n={}: dominant variance slice ({}) on {} points",
        args.regime,
        spec.particles(),
        spec.dim(),
        if quantum { "C30 N^3" } else { "C04 n^4" },
        grid.len()
    );
    Ok((report, args.out))
}

fn run_compare(args: CompareArgs) -> Result<(Report, PathBuf), Error> {
    let ra = Report::load(&args.a)?;
    let rb = Report::load(&args.b)?;
    let load_stat = |r: &Report, path: &Path| -> Result<StatReport, Error> {
        let table = r
            .tables
            .iter()
            .find(|t| t.name.starts_with("stat_report"))
            .ok_or_else(|| Error::MalformedReport {
                path: path.display().to_string(),
                message: "no stat_report table".into(),
            })?;
        let particles = match r.params.get("N") {
            Some(ParamValue::Int(v)) => *v as u64,
            _ => 0,
        };
        let dim = match r.params.get("n") {
            Some(ParamValue::Int(v)) => *v as u64,
            _ => 0,
        };
        let provenance = if table.name.ends_with("montecarlo") {
            Provenance::MonteCarlo
        } else if table.name.ends_with("closed") {
            Provenance::Closed
        } else {
            Provenance::Exact
        };
        Ok(stat_report_from_table(table, particles, dim, provenance))
    };
    let sa = load_stat(&ra, &args.a)?;
    let sb = load_stat(&rb, &args.b)?;
    let tol = CompareTolerances {
        se_units: args.tol_se,
        band_coeff: args.band_coeff,
    };
    let comparison = compare_reports(&sa, &sb, &tol)?;

    let mut report = Report::new("compare", None);
    report.set_param("a", args.a.display().to_string().as_str());
    report.set_param("b", args.b.display().to_string().as_str());
    report.set_param("N", sa.particles);
    report.set_param("n", sa.dim);
    report.set_param("tol_se", args.tol_se);
    report.set_param("band_coeff", args.band_coeff);
    let mut table = Table::new(
        "comparison",
        &[
            "index", "quantity", "a", "b", "deviation", "allowance", "severity", "passed",
        ],
    );
    for row in &comparison.rows {
        let code = match row.quantity {
            "mean" => 0.0,
            "ensemble_cov" => 1.0,
            _ => 2.0,
        };
        table.push(vec![
            row.index as f64,
            code,
            row.a,
            row.b,
            row.deviation,
            row.allowance,
            row.severity,
            f64::from(row.passed),
        ]);
    }
    report.tables.push(table);
    comparison_checks(&mut report.checks, "compare", &comparison);
    let worst = comparison.worst.map(|i| &comparison.rows[i]);
    report.summary = format!(
        "compare {} vs {}: {} -> {}",
        args.a.display(),
        args.b.display(),
        match worst {
            Some(w) => format!(
                "worst {} at point {} (severity {:.3})",
                w.quantity, w.index, w.severity
            ),
            None => "empty".into(),
        },
        if report.all_passed() { "pass" } else { "FAIL" }
    );
    Ok((report, args.out))
}
