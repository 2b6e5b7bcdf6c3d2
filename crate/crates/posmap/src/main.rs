//! Command-line front end: certification runs, dimension reports, witness
//! export, kernel-pair sampling and the PPT violation search.
//!
//! Exit codes: 0 when every check matches its target, 2 when a result is
//! inconclusive (under-sampled or nothing found), 1 when an invariant is
//! violated, 64 for usage errors, 74 for I/O failures.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use posmap::certify::{PPT_DETECTION_TOL, PPT_EIGEN_SLACK};
use posmap::matrix::hermitian_eigenvalues;
use posmap::sampling::{gaussian_vector, random_unit_vector, rng_from, subseed};
use posmap::{
    certificate_for_map, choi_witness, default_samples, dim_report, kernel_generic,
    kernel_orthogonal, kernel_parallel, ppt_violation_search, BlockMap, DimReport,
    ExposednessVerdict, KernelPair, MatrixJson, Verdict, C64,
};

const EX_OK: i32 = 0;
const EX_VIOLATION: i32 = 1;
const EX_INCONCLUSIVE: i32 = 2;
const EX_USAGE: i32 = 64;
const EX_IOERR: i32 = 74;

#[derive(Parser)]
#[command(
    name = "posmap",
    about = "Numerical certification of a family of positive maps and their entanglement witnesses",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Block size n (the map acts on 2n x 2n matrices).
    #[arg(long, default_value_t = 2)]
    n: usize,

    /// Seed of every randomized stage; echoed in all reports.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Acceptance tolerance used by this command's pass/fail checks.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,

    /// Emit the machine-readable JSON report on stdout.
    #[arg(long)]
    json: bool,

    /// Write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full certificate: unitality, trace preservation, positivity,
    /// irreducibility and the spanning dimensions.
    Certify {
        #[command(flatten)]
        common: CommonArgs,
        /// Sample vectors per kernel family (default 4 (2n)^3).
        #[arg(long)]
        samples: Option<usize>,
        /// Restarts of the positivity minimization.
        #[arg(long, default_value_t = 200)]
        restarts: usize,
    },
    /// Measure the numeric dimensions of the kernel-span subspaces against
    /// their closed-form targets.
    Dims {
        #[command(flatten)]
        common: CommonArgs,
        /// Sample vectors per kernel family (default 4 (2n)^3).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Export the Choi-matrix witness.
    Witness {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample kernel pairs from all constructions and report residuals.
    Kernel {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of pairs to sample.
        #[arg(long, default_value_t = 12)]
        samples: usize,
    },
    /// Search for a PPT state detected by the witness.
    Ppt {
        #[command(flatten)]
        common: CommonArgs,
        /// Gradient/projection iterations.
        #[arg(long, default_value_t = 50_000)]
        iterations: usize,
    },
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    version: &'static str,
    command: &'static str,
    n: usize,
    seed: u64,
    results: T,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EX_OK,
                _ => EX_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    match cli.command {
        Command::Certify {
            common,
            samples,
            restarts,
        } => certify_cmd(&common, samples, restarts),
        Command::Dims { common, samples } => dims_cmd(&common, samples),
        Command::Witness { common } => witness_cmd(&common),
        Command::Kernel { common, samples } => kernel_cmd(&common, samples),
        Command::Ppt { common, iterations } => ppt_cmd(&common, iterations),
    }
}

fn check_common(common: &CommonArgs) -> Option<i32> {
    if common.n < 2 {
        eprintln!("error: --n must be at least 2");
        return Some(EX_USAGE);
    }
    if common.tol <= 0.0 || common.tol.is_nan() {
        eprintln!("error: --tol must be positive");
        return Some(EX_USAGE);
    }
    None
}

/// Serializes the envelope, writes it to `--out` and/or stdout, and returns
/// an I/O exit code on failure.
fn emit<T: Serialize>(common: &CommonArgs, command: &'static str, results: T) -> std::result::Result<(), i32> {
    let envelope = Envelope {
        version: "v1",
        command,
        n: common.n,
        seed: common.seed,
        results,
    };
    let text = serde_json::to_string_pretty(&envelope).expect("report serialization");
    if let Some(path) = &common.out {
        if let Err(e) = write_file(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return Err(EX_IOERR);
        }
    }
    if common.json {
        println!("{text}");
    }
    Ok(())
}

fn write_file(path: &PathBuf, text: &str) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

fn certify_cmd(common: &CommonArgs, samples: Option<usize>, restarts: usize) -> i32 {
    if let Some(code) = check_common(common) {
        return code;
    }
    if restarts == 0 {
        eprintln!("error: --restarts must be at least 1");
        return EX_USAGE;
    }
    let samples = samples.unwrap_or_else(|| default_samples(common.n));
    if samples == 0 {
        eprintln!("error: --samples must be at least 1");
        return EX_USAGE;
    }

    let map = match BlockMap::new(common.n) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EX_USAGE;
        }
    };
    let report = match certificate_for_map(&map, common.seed, restarts, samples) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EX_VIOLATION;
        }
    };

    if !common.json {
        println!("certificate for n = {} (seed {})", report.n, report.seed);
        println!(
            "  unital:              {} (max deviation {:.3e})",
            pass(report.unital.ok),
            report.unital.max_deviation
        );
        println!(
            "  trace preserving:    {} (max deviation {:.3e})",
            pass(report.trace_preserving.ok),
            report.trace_preserving.max_deviation
        );
        println!(
            "  positivity minimum:  {:+.3e} ({} restarts)",
            report.positivity_min, report.restarts
        );
        println!("  commutant dimension: {}", report.commutant_dim);
        println!(
            "  spanning dim:        {}/{}",
            report.spanning_dim.measured, report.spanning_dim.target
        );
        println!(
            "  strong spanning dim: {}/{}",
            report.strong_spanning_dim.measured, report.strong_spanning_dim.target
        );
        println!(
            "  verdict: exposedness hypotheses {}",
            match report.exposedness_verdict {
                ExposednessVerdict::Supported => "verified numerically (supported)",
                ExposednessVerdict::Inconclusive => "NOT verified (inconclusive)",
            }
        );
    }

    let violation = !report.unital.ok
        || !report.trace_preserving.ok
        || report.positivity_min < -1e-6
        || report.commutant_dim != 1
        || report.spanning_dim.measured > report.spanning_dim.target
        || report.strong_spanning_dim.measured > report.strong_spanning_dim.target;
    let supported = report.exposedness_verdict == ExposednessVerdict::Supported
        && report.spanning_dim.measured == report.spanning_dim.target;

    if let Err(code) = emit(common, "certify", &report) {
        return code;
    }
    if violation {
        EX_VIOLATION
    } else if supported {
        EX_OK
    } else {
        EX_INCONCLUSIVE
    }
}

fn dims_cmd(common: &CommonArgs, samples: Option<usize>) -> i32 {
    if let Some(code) = check_common(common) {
        return code;
    }
    let samples = samples.unwrap_or_else(|| default_samples(common.n));
    if samples == 0 {
        eprintln!("error: --samples must be at least 1");
        return EX_USAGE;
    }
    let report = match dim_report(common.n, samples, common.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EX_USAGE;
        }
    };

    if !common.json {
        print_dim_table(&report);
    }
    if let Err(code) = emit(common, "dims", &report) {
        return code;
    }
    if report.any_overshoot() {
        EX_VIOLATION
    } else if report.all_match() {
        EX_OK
    } else {
        EX_INCONCLUSIVE
    }
}

fn print_dim_table(report: &DimReport) {
    println!(
        "dimension report for n = {} (seed {}, {} samples per family)",
        report.n, report.seed, report.samples
    );
    let m = &report.measured;
    let t = &report.targets;
    let v = &report.verdicts;
    let row = |label: &str, measured: usize, target: usize, verdict: Verdict, bound: bool| {
        println!(
            "  {:<11} {:>4}/{:<4}{} {}",
            format!("{label}:"),
            measured,
            target,
            if bound { "+" } else { " " },
            match verdict {
                Verdict::Match => "match",
                Verdict::Inconclusive => "inconclusive",
            }
        );
    };
    row("W", m.w, t.w, v.w, false);
    row("V", m.v, t.v, v.v, false);
    row("W+V", m.w_plus_v, t.w_plus_v, v.w_plus_v, true);
    row("N_Phi", m.n_phi, t.n_phi, v.n_phi, false);
    row("P_Phi", m.p_phi, t.p_phi, v.p_phi, false);
    row("W_perp", m.w_perp, t.w_perp, v.w_perp, false);
    row("V_perp", m.v_perp, t.v_perp, v.v_perp, false);
    row("perp_union", m.perp_union, t.perp_union, v.perp_union, true);
}

fn witness_cmd(common: &CommonArgs) -> i32 {
    if let Some(code) = check_common(common) {
        return code;
    }
    let witness = match choi_witness(common.n) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EX_USAGE;
        }
    };
    let matrix = witness.matrix();
    let trace = witness.trace();
    let herm_dev = posmap::matrix::max_abs_diff(matrix, &matrix.adjoint());
    let json = MatrixJson::from_matrix(matrix);

    // The matrix file is the raw interchange format, not the envelope.
    let text = serde_json::to_string_pretty(&json).expect("matrix serialization");
    if let Some(path) = &common.out {
        if let Err(e) = write_file(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EX_IOERR;
        }
    }
    if common.json {
        println!("{text}");
    } else {
        println!(
            "witness for n = {}: {}x{} Hermitian matrix",
            common.n, json.rows, json.cols
        );
        println!("  trace: {:+.12e} {:+.3e}i", trace.re, trace.im);
        println!("  hermiticity deviation: {:.3e}", herm_dev);
        if let Some(path) = &common.out {
            println!("  written to {}", path.display());
        }
    }

    let trace_ok = (trace.re - 1.0).abs() <= common.tol && trace.im.abs() <= common.tol;
    if trace_ok && herm_dev <= 1e-12 {
        EX_OK
    } else {
        EX_VIOLATION
    }
}

#[derive(Serialize)]
struct KernelPairJson {
    family: posmap::KernelFamily,
    residual: f64,
    x: Vec<[f64; 2]>,
    y: Vec<[f64; 2]>,
}

fn vector_json(v: &posmap::CVector) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

fn kernel_cmd(common: &CommonArgs, samples: usize) -> i32 {
    if let Some(code) = check_common(common) {
        return code;
    }
    if samples == 0 {
        eprintln!("error: --samples must be at least 1");
        return EX_USAGE;
    }
    let map = match BlockMap::new(common.n) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EX_USAGE;
        }
    };
    let n = common.n;

    let mut pairs: Vec<KernelPair> = Vec::new();
    let mut rng = rng_from(subseed(common.seed, 0));
    while pairs.len() < samples {
        // Round-robin over the three constructions.
        let sigma = random_unit_vector(&mut rng, 2);
        let phi = random_unit_vector(&mut rng, n);
        match kernel_parallel(&sigma, &phi) {
            Ok(batch) => pairs.extend(batch),
            Err(e) => {
                eprintln!("error: {e}");
                return EX_VIOLATION;
            }
        }
        if pairs.len() >= samples {
            break;
        }
        let u = gaussian_vector(&mut rng, n);
        let mut v = gaussian_vector(&mut rng, n);
        let overlap = u.dotc(&v) / C64::new(u.norm_squared(), 0.0);
        v -= &u * overlap;
        match kernel_orthogonal(&u, &v, C64::new(1.0, 0.3), C64::new(-0.4, 1.0)) {
            Ok(pair) => pairs.push(pair),
            Err(e) => {
                eprintln!("error: {e}");
                return EX_VIOLATION;
            }
        }
        let x = random_unit_vector(&mut rng, map.dim());
        match kernel_generic(&map, &x) {
            Ok(batch) => pairs.extend(batch),
            Err(e) => {
                eprintln!("error: {e}");
                return EX_VIOLATION;
            }
        }
    }
    pairs.truncate(samples);

    let mut worst: f64 = 0.0;
    let mut rows = Vec::with_capacity(pairs.len());
    for pair in &pairs {
        let residual = match pair.residual(&map) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return EX_VIOLATION;
            }
        };
        worst = worst.max(residual);
        rows.push(KernelPairJson {
            family: pair.family(),
            residual,
            x: vector_json(pair.x()),
            y: vector_json(pair.y()),
        });
    }

    if !common.json {
        println!(
            "{} kernel pairs for n = {} (seed {})",
            rows.len(),
            common.n,
            common.seed
        );
        for (i, row) in rows.iter().enumerate() {
            println!(
                "  pair {:>3}: {:<10} residual {:.3e}",
                i,
                format!("{:?}", row.family).to_lowercase(),
                row.residual
            );
        }
        println!("  worst residual: {:.3e} (tolerance {:.0e})", worst, common.tol);
    }
    #[derive(Serialize)]
    struct KernelResults {
        pairs: Vec<KernelPairJson>,
        worst_residual: f64,
    }
    if let Err(code) = emit(
        common,
        "kernel",
        KernelResults {
            pairs: rows,
            worst_residual: worst,
        },
    ) {
        return code;
    }
    if worst <= common.tol {
        EX_OK
    } else {
        EX_VIOLATION
    }
}

fn ppt_cmd(common: &CommonArgs, iterations: usize) -> i32 {
    if let Some(code) = check_common(common) {
        return code;
    }
    if iterations == 0 {
        eprintln!("error: --iterations must be at least 1");
        return EX_USAGE;
    }
    let witness = match choi_witness(common.n) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EX_USAGE;
        }
    };
    let result = match ppt_violation_search(witness.matrix(), iterations, common.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EX_VIOLATION;
        }
    };

    if !common.json {
        println!(
            "PPT violation search for n = {} ({} iterations, seed {})",
            common.n, iterations, common.seed
        );
        if result.found {
            println!("  found: yes");
            println!("  witness value: {:+.6e}", result.witness_value);
            println!(
                "  min eigenvalue of partial transpose: {:+.3e}",
                result.ppt_min_eigenvalue
            );
        } else {
            println!("  found: no (inconclusive; not evidence of decomposability)");
            println!("  best witness value: {:+.6e}", result.witness_value);
        }
    }

    // Contract check on a reported state.
    let mut violation = false;
    if result.found {
        if let Some(state) = &result.state {
            let trace_dev = (state.trace().re - 1.0).abs();
            let lmin = hermitian_eigenvalues(state)[0];
            violation = trace_dev > 1e-10
                || lmin < -1e-10
                || result.ppt_min_eigenvalue < PPT_EIGEN_SLACK
                || result.witness_value >= PPT_DETECTION_TOL;
        } else {
            violation = true;
        }
    }

    if let Err(code) = emit(common, "ppt", &result) {
        return code;
    }
    if violation {
        EX_VIOLATION
    } else if result.found {
        EX_OK
    } else {
        EX_INCONCLUSIVE
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}
