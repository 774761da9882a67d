//! Command-line front end: load JSON problem descriptors, run computations
//! and verification suites, emit machine-readable reports.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input/parse error.
//! Identical configurations (same seed, `--no-timestamp`) produce
//! byte-identical report bodies.

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use qsm::descriptor::{
    element_to_data, state_to_data, real_matrix_to_rows, BlockData, DistJob, InduceJob,
    ValidateInput,
};
use qsm::suites::{run_suite, SuiteOptions, SuiteReport, SUITES};
use qsm::{
    build_probes, check_prop4_density, induce_qsm, kantorovich_primal, rho, CheckItem,
    DistanceResult, InduceOptions, Method, QSMStructure, RatioOptions, ValidationReport,
    Witness,
};
use serde::Serialize;
use std::io::Read;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "qsm")]
#[command(about = "Quantum (semi-)metric structures on finite-dimensional C*-algebras")]
#[command(version)]
struct Cli {
    /// Seed for every randomized component (echoed into reports)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Linear-program pivot tolerance
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_lp: f64,

    /// Tolerance for iterative-engine comparisons
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol_iter: f64,

    /// Haar-like pure states sampled per matrix block of a probe set
    #[arg(long, global = true, default_value_t = 2)]
    probes_pure: usize,

    /// Random convex mixtures appended to a probe set
    #[arg(long, global = true, default_value_t = 2)]
    probes_mixed: usize,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Omit the timestamp field (byte-stable reports)
    #[arg(long, global = true, default_value_t = false)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Commands {
    /// Validate a descriptor (seminorm axioms, homomorphism residuals, ...)
    Validate {
        /// Path to a tagged JSON descriptor, or `-` for stdin
        path: PathBuf,
    },
    /// Distance between two states under a seminorm
    Dist {
        /// Path to a JSON job `{algebra, seminorm, states}`, or `-`
        path: PathBuf,
        /// Index of the first state
        #[arg(long, default_value_t = 0)]
        i: usize,
        /// Index of the second state
        #[arg(long, default_value_t = 1)]
        j: usize,
    },
    /// Induced structure of a quantum family on probe states of C
    Induce {
        /// Path to a JSON family descriptor (optionally with `base`), or `-`
        path: PathBuf,
    },
    /// Run a named verification suite on seeded random instances
    Verify {
        /// One of: prop1, prop2, lemma3, prop4, lemma5, theorem4, duality
        suite: String,
        /// Number of random instances
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

/// Configuration echo carried by every report.
#[derive(Serialize)]
struct ConfigEcho {
    seed: u64,
    tol_lp: f64,
    tol_iter: f64,
    probes_pure: usize,
    probes_mixed: usize,
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: String,
    config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct ValidateBody {
    passed: bool,
    checks: Vec<CheckItem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantum_metric: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
}

#[derive(Serialize)]
struct WitnessJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    element: Option<BlockData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
struct DistBody {
    value: f64,
    exact: bool,
    method: &'static str,
    residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    witness: WitnessJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    primal: Option<PrimalCross>,
}

#[derive(Serialize)]
struct PrimalCross {
    value: f64,
    residual: f64,
    agreement: f64,
}

#[derive(Serialize)]
struct InduceBody {
    probes: usize,
    probe_states: Vec<BlockData>,
    d: Vec<Vec<f64>>,
    entries_exact: bool,
    degenerate: bool,
    quantum_metric: bool,
    radius: f64,
    radius_certified: bool,
    density_rank: usize,
    density_full: bool,
    seminorm_basis_values: Vec<f64>,
    axioms: Vec<CheckItem>,
    passed: bool,
}

fn method_tag(m: Method) -> &'static str {
    match m {
        Method::LpDual => "lp_dual",
        Method::LpPrimal => "lp_primal",
        Method::RatioGrid => "ratio_grid",
    }
}

fn witness_json(w: &Witness) -> WitnessJson {
    match w {
        Witness::Element(e) => WitnessJson {
            element: Some(element_to_data(e)),
            plan: None,
        },
        Witness::Plan(p) => WitnessJson {
            element: None,
            plan: Some(real_matrix_to_rows(p)),
        },
        Witness::None => WitnessJson {
            element: None,
            plan: None,
        },
    }
}

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading stdin")?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn timestamp(cli: &Cli) -> Option<u64> {
    if cli.no_timestamp {
        None
    } else {
        Some(
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    }
}

fn config_echo(cli: &Cli) -> ConfigEcho {
    ConfigEcho {
        seed: cli.seed,
        tol_lp: cli.tol_lp,
        tol_iter: cli.tol_iter,
        probes_pure: cli.probes_pure,
        probes_mixed: cli.probes_mixed,
    }
}

fn emit<T: Serialize>(cli: &Cli, report: &Report<T>, csv: impl Fn() -> String) -> anyhow::Result<()> {
    match cli.format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(report)?);
        }
        Format::Csv => {
            print!("{}", csv());
        }
    }
    Ok(())
}

fn checks_csv(checks: &[CheckItem]) -> String {
    let mut out = String::from("id,passed,residual,detail\n");
    for c in checks {
        let residual = c
            .residual
            .map(|r| format!("{r:e}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},\"{}\"\n",
            c.id,
            c.passed,
            residual,
            c.detail.replace('"', "'")
        ));
    }
    out
}

fn cmd_validate(cli: &Cli, path: &PathBuf) -> anyhow::Result<i32> {
    let text = read_input(path)?;
    let input: ValidateInput =
        serde_json::from_str(&text).map_err(|e| anyhow!("parse error: {e}"))?;
    let ratio = RatioOptions {
        seed: cli.seed,
        ..RatioOptions::default()
    };
    let mut quantum_metric = None;
    let mut radius = None;
    let report: ValidationReport = match input {
        ValidateInput::Seminorm { seminorm } => {
            let l = seminorm.to_seminorm()?;
            let structure = QSMStructure::build(l, 16, cli.seed)?;
            quantum_metric = Some(structure.is_quantum_metric());
            radius = Some(structure.radius().value);
            structure.report().clone()
        }
        ValidateInput::Homomorphism { hom } => {
            let (_, report) = hom.to_homomorphism()?;
            report
        }
        ValidateInput::Family { family } => {
            let fam = family.to_family()?;
            let mut report = ValidationReport::new();
            report.push(CheckItem::new(
                "family.validated",
                true,
                None,
                format!(
                    "Φ: {:?} → {:?}⊗{:?} passes the homomorphism axioms",
                    fam.algebra_a().blocks(),
                    fam.algebra_b().blocks(),
                    fam.algebra_c().blocks()
                ),
            ));
            report
        }
        ValidateInput::ClassicalFamily { family } => {
            let fam = family.to_family()?;
            let qf = qsm::compile_family(&fam)?;
            let mut report = ValidationReport::new();
            report.push(CheckItem::new(
                "classical.compiled",
                qf.map().is_validated(),
                None,
                "compiled map passes the homomorphism axioms exactly",
            ));
            report
        }
        ValidateInput::State { algebra, densities } => {
            let algebra = algebra.to_algebra()?;
            let mut report = ValidationReport::new();
            match qsm::descriptor::state_from_data(&algebra, &densities) {
                Ok(_) => report.push(CheckItem::new(
                    "state.valid",
                    true,
                    None,
                    "densities are PSD with total trace 1",
                )),
                Err(e) => report.push(CheckItem::new("state.valid", false, None, format!("{e}"))),
            }
            report
        }
        ValidateInput::Semimetric { d } => {
            let mut report = ValidationReport::new();
            let n = d.len();
            let matrix = qsm::linalg::RMat::from_fn(n, n, |r, s| d[r][s]);
            match qsm::SemiMetricSpace::new(matrix) {
                Ok(space) => {
                    report.push(CheckItem::new(
                        "semimetric.valid",
                        true,
                        None,
                        format!(
                            "valid semi-metric on {n} points ({} zero pairs)",
                            space.zero_pairs().len()
                        ),
                    ));
                }
                Err(e) => {
                    report.push(CheckItem::new("semimetric.valid", false, None, format!("{e}")))
                }
            }
            report
        }
    };
    let _ = ratio;
    let passed = report.passed();
    let body = ValidateBody {
        passed,
        checks: report.checks.clone(),
        quantum_metric,
        radius,
    };
    let rep = Report {
        command: "validate".into(),
        config: config_echo(cli),
        timestamp: timestamp(cli),
        body,
    };
    emit(cli, &rep, || checks_csv(&report.checks))?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_dist(cli: &Cli, path: &PathBuf, i: usize, j: usize) -> anyhow::Result<i32> {
    let text = read_input(path)?;
    let job: DistJob = serde_json::from_str(&text).map_err(|e| anyhow!("parse error: {e}"))?;
    let (_algebra, seminorm, states) = job.load()?;
    if i >= states.len() || j >= states.len() {
        return Err(anyhow!(
            "state index out of range: {i},{j} of {}",
            states.len()
        ));
    }
    let opts = RatioOptions {
        seed: cli.seed,
        ..RatioOptions::default()
    };
    let result: DistanceResult = rho(&states[i], &states[j], &seminorm, &opts)?;
    let primal = seminorm.lipschitz_space().map(|space| {
        kantorovich_primal(&states[i], &states[j], space).map(|p| PrimalCross {
            value: p.value,
            residual: p.residual,
            agreement: (p.value - result.value).abs(),
        })
    });
    let primal = match primal {
        Some(Ok(p)) => Some(p),
        Some(Err(e)) => return Err(e.into()),
        None => None,
    };
    let body = DistBody {
        value: result.value,
        exact: result.exact,
        method: method_tag(result.method),
        residual: result.residual,
        note: result.note.clone(),
        witness: witness_json(&result.witness),
        primal,
    };
    let rep = Report {
        command: "dist".into(),
        config: config_echo(cli),
        timestamp: timestamp(cli),
        body,
    };
    emit(cli, &rep, || {
        let mut out = String::from("field,value\n");
        out.push_str(&format!("value,{}\n", result.value));
        out.push_str(&format!("exact,{}\n", result.exact));
        out.push_str(&format!("method,{}\n", method_tag(result.method)));
        out.push_str(&format!("residual,{:e}\n", result.residual));
        out
    })?;
    Ok(0)
}

fn cmd_induce(cli: &Cli, path: &PathBuf) -> anyhow::Result<i32> {
    let text = read_input(path)?;
    let job: InduceJob = serde_json::from_str(&text).map_err(|e| anyhow!("parse error: {e}"))?;
    let (fam, base_seminorm) = job.load()?;
    let base = QSMStructure::build(base_seminorm, 16, cli.seed)?;
    let probes = build_probes(
        fam.algebra_c(),
        cli.probes_pure,
        cli.probes_mixed,
        cli.seed,
    );
    let induce_opts = InduceOptions {
        seed: cli.seed,
        rho: RatioOptions {
            seed: cli.seed,
            ..RatioOptions::default()
        },
        ..InduceOptions::default()
    };
    let induced = induce_qsm(&fam, &base, &probes, &induce_opts)?;
    let mu_probes = build_probes(
        fam.algebra_b(),
        cli.probes_pure,
        cli.probes_mixed,
        cli.seed ^ 0x5bd1_e995,
    );
    let (rank, _) = check_prop4_density(&fam, &mu_probes)?;
    let basis_values: Vec<f64> = fam
        .algebra_c()
        .hermitian_basis()
        .iter()
        .map(|h| induced.seminorm().eval(h).unwrap_or(f64::INFINITY))
        .collect();
    let axioms = induced.structure.report().clone();
    let passed = induced.structure.axioms_pass();
    let body = InduceBody {
        probes: probes.len(),
        probe_states: induced.metric.probes().iter().map(state_to_data).collect(),
        d: real_matrix_to_rows(induced.metric.matrix()),
        entries_exact: induced.metric.all_exact(),
        degenerate: induced.is_degenerate(),
        quantum_metric: induced.structure.is_quantum_metric() && rank == fam.algebra_c().dim(),
        radius: induced.structure.radius().value,
        radius_certified: induced.structure.radius().certified,
        density_rank: rank,
        density_full: rank == fam.algebra_c().dim(),
        seminorm_basis_values: basis_values,
        axioms: axioms.checks.clone(),
        passed,
    };
    let rep = Report {
        command: "induce".into(),
        config: config_echo(cli),
        timestamp: timestamp(cli),
        body,
    };
    emit(cli, &rep, || {
        let mut out = String::from("i,j,d,exact\n");
        for a in 0..induced.metric.len() {
            for b in 0..induced.metric.len() {
                out.push_str(&format!(
                    "{a},{b},{},{}\n",
                    induced.metric.distance(a, b),
                    induced.metric.entry_exact(a, b)
                ));
            }
        }
        out
    })?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_verify(cli: &Cli, suite: &str, count: usize) -> anyhow::Result<i32> {
    if !SUITES.contains(&suite) {
        return Err(anyhow!("unknown suite `{suite}` (expected one of {SUITES:?})"));
    }
    let opts = SuiteOptions {
        probes_pure: cli.probes_pure,
        probes_mixed: cli.probes_mixed,
        rho: RatioOptions {
            seed: cli.seed,
            ..RatioOptions::default()
        },
    };
    let suite_report: SuiteReport = run_suite(suite, cli.seed, count, &opts)?;
    let passed = suite_report.passed;
    let rep = Report {
        command: format!("verify {suite}"),
        config: config_echo(cli),
        timestamp: timestamp(cli),
        body: suite_report.clone(),
    };
    emit(cli, &rep, || {
        let mut out = String::from("id,passed,worst_residual,instances\n");
        for c in &suite_report.checks {
            out.push_str(&format!(
                "{},{},{:e},{}\n",
                c.id, c.passed, c.worst_residual, c.instances
            ));
        }
        out
    })?;
    Ok(if passed { 0 } else { 1 })
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Commands::Validate { path } => cmd_validate(&cli, path),
        Commands::Dist { path, i, j } => cmd_dist(&cli, path, *i, *j),
        Commands::Induce { path } => cmd_induce(&cli, path),
        Commands::Verify { suite, count } => cmd_verify(&cli, suite, *count),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
