//! Command-line front end. The report goes to stdout as JSON, a one-line
//! summary to stderr.
//!
//! Exit codes: 0 pass, 1 violations, 2 bad input, 3 size overflow,
//! 4 infeasible request.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certificate::{epsilon_for_k, Mode};
use crate::classical::{hash_family, pairwise_permutations, seed_bound_witness, spectral_certificate, FunctionFamily};
use crate::entropy::{guess_probability_cc, h2_cond, hmin_cond, BipartiteState, StateKind};
use crate::error::{Error, Result};
use crate::formats::{parse_family, parse_state, write_function_family, write_state, write_unitary_family, FamilyFile};
use crate::harness::{sample_certified_state, verify_classical, verify_quantum, TrialRecord};
use crate::numerics::{trial_rng, CMatrix};
use crate::quantum::{
    clifford_family, design_lambda_bound, haar_moment_operator, output_swap, q_spectral_certificate,
    quantum_seed_bound_witness, shortseed_experiment, single_unitary_witness, twirl, two_design_check, ShortseedParams,
    UnitaryFamily, MAX_SUPEROP_QUBITS,
};
use crate::report::{CertificateValues, Check, ExtractorReport, Parameters};

/// RNG stream reserved for drawing Haar families, away from per-trial streams.
const FAMILY_STREAM: u64 = 1 << 62;
const EXACT_TOL: f64 = 1e-9;
const DESIGN_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(
    name = "extractorlab",
    version,
    about = "Spectral certificates for classical and quantum randomness extractors"
)]
pub struct Cli {
    /// Include wall-clock time in the report (breaks byte reproducibility).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectral certificate and the error it implies at min-entropy k.
    Certify(CertifyArgs),
    /// Monte-Carlo soundness check on states with certified min-entropy.
    Verify(VerifyArgs),
    /// Lower-bound witness state.
    Witness(WitnessArgs),
    /// Short-seed experiment with a few Haar unitaries.
    Shortseed(ShortseedArgs),
    /// Compare a family's second moment with the Haar measure.
    DesignCheck(FamilyArgs),
    /// Conditional min- and collision entropy of a state.
    Entropy(EntropyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// hash | perm | clifford | haar | file:PATH
    #[arg(long, default_value = "hash")]
    pub family: String,
    /// input qubits / bits
    #[arg(long)]
    pub n: Option<u32>,
    /// output qubits / bits
    #[arg(long)]
    pub m: Option<u32>,
    /// seed length; picks 2^d members of a Haar family, checked for the others
    #[arg(long)]
    pub d: Option<f64>,
    /// members of a Haar family
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, default_value = "strong")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// export the family (certify) or write the state (witness, entropy)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// qubits of side information (default: 1 for classical families, n for unitary ones)
    #[arg(long)]
    pub r: Option<u32>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// flat classical source on few preimages of the first function
    Prop2,
    /// flat quantum state with |S| = ceil(2^k |M| / |N|)
    Prop4,
    /// state on which the first unitary misses uniform by exactly 1
    Prop5,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    pub kind: WitnessKind,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ShortseedArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub m: u32,
    #[arg(long, default_value_t = 32)]
    pub t: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    /// state file; a random state is drawn when absent
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// cc | cq | qq, for random states
    #[arg(long, default_value = "qq")]
    pub kind: String,
    /// qubits of N, for random states
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// qubits of R, for random states
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// draw a state with certified H_min(N|R) >= k
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Family {
    Classical(FunctionFamily),
    Unitary(UnitaryFamily),
}

impl Family {
    fn parameters(&self, label: &str) -> Parameters {
        let (n, m, d, mode, seeds) = match self {
            Family::Classical(f) => (f.n(), f.m(), f.d(), f.mode(), f.seeds()),
            Family::Unitary(f) => (f.n(), f.m(), f.d(), f.mode(), f.seeds()),
        };
        Parameters { family: label.to_string(), n, m, k: None, d, mode, seeds, trials: None, r: None, kind: None }
    }
}

fn require(v: Option<u32>, flag: &str) -> Result<u32> {
    v.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for this family")))
}

fn build_family(a: &FamilyArgs) -> Result<Family> {
    let fam = match a.family.as_str() {
        "hash" => Family::Classical(hash_family(require(a.n, "n")?, require(a.m, "m")?)?),
        "perm" => Family::Classical(pairwise_permutations(require(a.n, "n")?, require(a.m, "m")?)?),
        "clifford" => {
            let n = require(a.n, "n")?;
            let f = clifford_family(n)?;
            Family::Unitary(f.with_output_qubits(a.m.unwrap_or(n))?)
        }
        "haar" => {
            let n = require(a.n, "n")?;
            let t = match (a.t, a.d) {
                (Some(t), _) => t,
                (None, Some(d)) if d >= 0.0 && d.fract() == 0.0 && d < 16.0 => 1usize << d as u32,
                (None, Some(d)) => return Err(Error::InvalidArgument(format!("--d {d} is not a small integer"))),
                (None, None) => 1usize << n,
            };
            let mut rng = trial_rng(a.seed, FAMILY_STREAM);
            Family::Unitary(UnitaryFamily::haar(n, require(a.m, "m")?, t, &mut rng)?)
        }
        other => {
            let path = other.strip_prefix("file:").ok_or_else(|| Error::Parse(format!("unknown family {other:?}")))?;
            match parse_family(&std::fs::read_to_string(path)?)? {
                FamilyFile::Classical(f) => {
                    if a.m.is_some_and(|m| m != f.m()) {
                        return Err(Error::InvalidArgument("--m differs from the file".into()));
                    }
                    Family::Classical(f)
                }
                FamilyFile::Unitary(f) => match a.m {
                    Some(m) => Family::Unitary(f.with_output_qubits(m)?),
                    None => Family::Unitary(f),
                },
            }
        }
    };
    let fam = match fam {
        Family::Classical(f) => Family::Classical(f.with_mode(a.mode)),
        Family::Unitary(f) => Family::Unitary(f.with_mode(a.mode)),
    };
    let (n, d) = match &fam {
        Family::Classical(f) => (f.n(), f.d()),
        Family::Unitary(f) => (f.n(), f.d()),
    };
    if a.n.is_some_and(|x| x != n) {
        return Err(Error::InvalidArgument(format!("--n differs from the family (n = {n})")));
    }
    if a.d.is_some_and(|x| (x - d).abs() > 1e-9) {
        return Err(Error::InvalidArgument(format!("--d differs from the family (d = {d})")));
    }
    Ok(fam)
}

fn certify(a: &CertifyArgs) -> Result<ExtractorReport> {
    let fam = build_family(&a.family)?;
    let mut p = fam.parameters(&a.family.family);
    p.k = a.k;
    let mut report = ExtractorReport::new("certify", p, a.family.seed);
    match &fam {
        Family::Classical(f) => {
            let c = spectral_certificate(f)?;
            let b = a.k.map(|k| epsilon_for_k(&c, k, f.m(), f.d()));
            report.certificate = Some(CertificateValues::new(&c, b));
            report.value("inverse_seed_count", 1.0 / f.seeds() as f64);
            if let Some(out) = &a.family.out {
                std::fs::write(out, write_function_family(f))?;
            }
        }
        Family::Unitary(f) => {
            let c = q_spectral_certificate(f)?;
            let b = a.k.map(|k| epsilon_for_k(&c, k, f.m(), f.d()));
            report.certificate = Some(CertificateValues::new(&c, b));
            report.value("design_lambda_bound", design_lambda_bound(f));
            if let Some(out) = &a.family.out {
                std::fs::write(out, write_unitary_family(f))?;
            }
        }
    }
    Ok(report)
}

fn verify(a: &VerifyArgs) -> Result<ExtractorReport> {
    let fam = build_family(&a.family)?;
    let mut p = fam.parameters(&a.family.family);
    p.k = Some(a.k);
    p.trials = Some(a.trials);
    let outcome = match &fam {
        Family::Classical(f) => {
            let r = a.r.unwrap_or(1);
            p.r = Some(r);
            verify_classical(f, a.k, a.trials, a.family.seed, 1usize << r)?
        }
        Family::Unitary(f) => {
            let r = a.r.unwrap_or(f.n());
            p.r = Some(r);
            verify_quantum(f, a.k, a.trials, a.family.seed, 1usize << r)?
        }
    };
    let mut report = ExtractorReport::new("verify", p, a.family.seed);
    report.certificate = Some(CertificateValues::new(&outcome.certificate, Some(outcome.bound)));
    report.trials = outcome.trials;
    report.violations = outcome.violations;
    Ok(report)
}

fn witness_k(a: &WitnessArgs) -> Result<f64> {
    a.k.ok_or_else(|| Error::InvalidArgument("--k is required for this witness".into()))
}

fn write_witness_state(out: &Option<PathBuf>, rho: &CMatrix, kind: StateKind) -> Result<()> {
    if let Some(path) = out {
        let s = BipartiteState::new(rho.clone(), rho.rows(), 1, kind)?;
        std::fs::write(path, write_state(&s))?;
    }
    Ok(())
}

fn witness(a: &WitnessArgs) -> Result<ExtractorReport> {
    let fam = build_family(&a.family)?;
    let mut p = fam.parameters(&a.family.family);
    p.k = a.k;
    p.kind = Some(format!("{:?}", a.kind).to_lowercase());
    let mut report = ExtractorReport::new("witness", p, a.family.seed);
    match (a.kind, &fam) {
        (WitnessKind::Prop2, Family::Classical(f)) => {
            let w = seed_bound_witness(f, witness_k(a)?)?;
            report
                .value("lambda1_diff", w.lambda1_diff)
                .value("lower_bound", w.lower_bound)
                .value("rayleigh", w.rayleigh)
                .value("support_size", w.support_size as f64)
                .value("image_support", w.image_support as f64)
                .check(Check::at_most("lower_bound_below_lambda1", w.lower_bound, w.lambda1_diff + EXACT_TOL))
                .check(Check::at_most("rayleigh_below_lambda1", w.rayleigh, w.lambda1_diff + EXACT_TOL));
            write_witness_state(&a.family.out, &w.source.to_density(), StateKind::ClassicalClassical)?;
        }
        (WitnessKind::Prop4, Family::Unitary(f)) => {
            let k = witness_k(a)?;
            let w = quantum_seed_bound_witness(f, k)?;
            report
                .value("lambda1_diff", w.lambda1_diff)
                .value("lower_bound", w.lower_bound)
                .value("rayleigh", w.rayleigh)
                .value("support_size", w.support_size as f64)
                .value("h2", w.h2)
                .check(Check::at_most("lower_bound_below_lambda1", w.lower_bound, w.lambda1_diff + EXACT_TOL))
                .check(Check::at_most("rayleigh_below_lambda1", w.rayleigh, w.lambda1_diff + EXACT_TOL))
                .check(Check::at_most("h2_deficit", k - w.h2, EXACT_TOL));
            write_witness_state(&a.family.out, &w.gamma, StateKind::QuantumQuantum)?;
        }
        (WitnessKind::Prop5, Family::Unitary(f)) => {
            let w = single_unitary_witness(f)?;
            let n = f.n() as f64;
            report
                .value("single_error", w.single_error)
                .value("family_error", w.family_error)
                .value("hmin", w.hmin)
                .check(Check::at_most("single_error_minus_one", (w.single_error - 1.0).abs(), EXACT_TOL))
                .check(Check::at_most("hmin_minus_n_minus_one", (w.hmin - (n - 1.0)).abs(), EXACT_TOL));
            if f.n() <= MAX_SUPEROP_QUBITS {
                let c = q_spectral_certificate(f)?;
                let b = epsilon_for_k(&c, n - 1.0, f.m(), f.d());
                report.certificate = Some(CertificateValues::new(&c, Some(b)));
                report.check(Check::at_most("family_error_below_bound", w.family_error, b.quantum_error + EXACT_TOL));
            }
            write_witness_state(&a.family.out, &w.gamma, StateKind::QuantumQuantum)?;
        }
        (kind, _) => {
            return Err(Error::InvalidArgument(format!(
                "{kind:?} witness needs a {} family",
                if kind == WitnessKind::Prop2 { "classical" } else { "unitary" }
            )))
        }
    }
    Ok(report)
}

fn shortseed(a: &ShortseedArgs) -> Result<ExtractorReport> {
    let params = ShortseedParams { n: a.n, k: a.k, m: a.m, t: a.t, trials: a.trials, seed: a.seed };
    let out = shortseed_experiment(&params)?;
    let p = Parameters {
        family: "haar".into(),
        n: a.n,
        m: a.m,
        k: Some(a.k),
        d: (a.t as f64).log2(),
        mode: Mode::Strong,
        seeds: a.t,
        trials: Some(a.trials),
        r: None,
        kind: None,
    };
    let mut report = ExtractorReport::new("shortseed", p, a.seed);
    report.trials = out
        .errors
        .iter()
        .zip(&out.decoupling_errors)
        .enumerate()
        .map(|(index, (&error, &dec))| TrialRecord { index, error, hmin: Some(a.k), decoupling_error: Some(dec) })
        .collect();
    report
        .value("mean_error", out.mean_error)
        .value("max_error", out.max_error)
        .value("reference_epsilon", out.reference_epsilon)
        .value("reference_error", out.reference_error)
        .value("mean_decoupling_error", out.mean_decoupling_error)
        .check(Check::at_most("mean_error_within_three_reference", out.mean_error, 3.0 * out.reference_error));
    Ok(report)
}

fn design_check(a: &FamilyArgs) -> Result<ExtractorReport> {
    let fam = match build_family(a)? {
        Family::Unitary(f) => f,
        Family::Classical(_) => return Err(Error::InvalidArgument("design-check needs a unitary family".into())),
    };
    let mut report = ExtractorReport::new("design-check", Family::Unitary(fam.clone()).parameters(&a.family), a.seed);
    let dev = two_design_check(&fam)?;
    let moment = twirl(&fam, &output_swap(fam.n(), fam.m())?)?;
    let haar = CMatrix::new(haar_moment_operator(fam.n(), fam.m())?.into_inner());
    let moment_dev = (&moment - &haar).max_abs();
    report.check(Check::at_most("two_design_deviation", dev, DESIGN_TOL)).check(Check::at_most(
        "haar_moment_deviation",
        moment_dev,
        DESIGN_TOL,
    ));
    Ok(report)
}

fn entropy(a: &EntropyArgs) -> Result<ExtractorReport> {
    let state = match &a.state {
        Some(path) => parse_state(&std::fs::read_to_string(path)?)?,
        None => {
            let kind = StateKind::from_tag(&a.kind)?;
            let (dn, dr) = (1usize << a.n, 1usize << a.r);
            let mut rng = trial_rng(a.seed, 0);
            let k = a.k.unwrap_or(-(a.n as f64));
            sample_certified_state(kind, dn, dr, k, &mut rng)?.0
        }
    };
    let (h, cert) = hmin_cond(&state)?;
    let h2 = h2_cond(&state)?.value;
    let p = Parameters {
        family: "none".into(),
        n: state.dim_n().trailing_zeros(),
        m: 0,
        k: a.k,
        d: 0.0,
        mode: Mode::Strong,
        seeds: 0,
        trials: None,
        r: Some(state.dim_r().trailing_zeros()),
        kind: Some(state.kind().tag().to_string()),
    };
    let mut report = ExtractorReport::new("entropy", p, a.seed);
    report
        .value("hmin", h)
        .value("h2", h2)
        .value("primal", cert.primal_value)
        .value("dual", cert.dual_value)
        .value("newton_steps", cert.newton_steps as f64)
        .check(Check::at_most("hmin_minus_h2", h - h2, EXACT_TOL))
        .check(Check::at_most("relative_gap", cert.relative_gap().abs(), 1e-6));
    if state.kind() == StateKind::ClassicalClassical {
        report.value("guess_probability", guess_probability_cc(&state));
    }
    if let Some(out) = &a.out {
        std::fs::write(out, write_state(&state))?;
    }
    Ok(report)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Overflow(_) => 3,
        Error::Infeasible(_) => 4,
        Error::NonConvergence(_) | Error::NotPsd(_) => 1,
        _ => 2,
    }
}

fn summary(r: &ExtractorReport) -> String {
    let mut s = format!("{}: n={} m={} d={:.3}", r.command, r.parameters.n, r.parameters.m, r.parameters.d);
    if let Some(c) = &r.certificate {
        s += &format!(" lambda1_diff={:.6e}", c.lambda1_diff);
        if let Some(e) = c.quantum_error_bound {
            s += &format!(" bound={e:.6}");
        }
    }
    if !r.trials.is_empty() {
        let max = r.trials.iter().map(|t| t.error).fold(0.0, f64::max);
        s += &format!(" trials={} max_error={max:.6}", r.trials.len());
    }
    s + &format!(" violations={}", r.violations)
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let start = Instant::now();
    let result = match &cli.command {
        Command::Certify(a) => certify(a),
        Command::Verify(a) => verify(a),
        Command::Witness(a) => witness(a),
        Command::Shortseed(a) => shortseed(a),
        Command::DesignCheck(a) => design_check(a),
        Command::Entropy(a) => entropy(a),
    };
    let mut report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if cli.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    match report.to_json() {
        Ok(json) => print!("{json}"),
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    }
    eprintln!("{}", summary(&report));
    if report.violations > 0 {
        1
    } else {
        0
    }
}

pub fn main() -> i32 {
    run(Cli::parse())
}
