use krivine::embedding::{preprocess, VectorSolution};
use krivine::problems::{brute_force_opt, sdp_relax, ProblemInstance, RelaxConfig, RelaxOutcome};
use krivine::rounding::{rounding_expectation, PartitionPair, RoundingConfig, RoundingReport};
use krivine::series::{
    CapPolicy, CoefficientTable, KrivineScheme, SchemeConfig, TruncationConfig, DEFAULT_MAX_TERMS,
};
use krivine::validator::{mc_estimate_fk, quality_trend, verify_scheme_identity, IdentityCheck};
use krivine::{Error, Result};
use serde::Serialize;

use crate::args::{
    CoeffsArgs, Command, FkMcArgs, Format, InputArgs, ModeArgs, PipelineArgs, SchemeArgs,
    TrendArgs, TruncationArgs,
};

pub const SCHEMA: &str = "krivine-report/1";

/// What a command produces, before formatting.
pub enum Outcome {
    Json(serde_json::Value),
    Table(serde_json::Value, String),
}

/// Whether the command's own check passed; `validate` reports failures
/// through the exit code after emitting its report.
pub struct Run {
    pub outcome: Outcome,
    pub passed: bool,
}

fn usage(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

fn to_value(value: impl Serialize) -> serde_json::Value {
    serde_json::to_value(value).expect("report serializes")
}

fn truncation(args: &TruncationArgs) -> TruncationConfig {
    TruncationConfig {
        tail_tol: args.tail_tol,
        max_terms: DEFAULT_MAX_TERMS,
        cap_policy: if args.strict_tail {
            CapPolicy::Error
        } else {
            CapPolicy::Truncate
        },
    }
}

fn scheme_config(args: &ModeArgs) -> SchemeConfig {
    let mut config = SchemeConfig::new(args.mode);
    config.c_override = args.c_const;
    config.truncation = truncation(&args.truncation);
    config
}

fn csv_string<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::Io(format!("csv: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct TableSummary<'a> {
    k: u32,
    degree: usize,
    tail_bound: f64,
    tail_tol: Option<f64>,
    tail_tol_met: bool,
    coefficients: &'a [f64],
}

fn table_summary(table: &CoefficientTable) -> TableSummary<'_> {
    TableSummary {
        k: table.k(),
        degree: table.degree(),
        tail_bound: table.tail_bound(),
        tail_tol: table.tail_tol(),
        tail_tol_met: table.tail_tol_met(),
        coefficients: table.coefficients(),
    }
}

#[derive(Serialize)]
struct SchemeSummary<'a> {
    k: u32,
    mode: krivine::series::Mode,
    c: f64,
    overhead: f64,
    target: f64,
    c_const: Option<f64>,
    padding: f64,
    residual: f64,
    coefficient_degree: usize,
    tail_bound: f64,
    tail_tol_met: bool,
    inverse_degree: usize,
    inverse_requested_degree: usize,
    inverse_hit_noise_floor: bool,
    radius_estimate: f64,
    inverse_coefficients: Option<&'a [f64]>,
}

fn scheme_summary(scheme: &KrivineScheme, with_inverse: bool) -> SchemeSummary<'_> {
    let (table, inverse) = (scheme.coefficients(), scheme.inverse());
    SchemeSummary {
        k: scheme.k(),
        mode: scheme.mode(),
        c: scheme.c(),
        overhead: scheme.overhead(),
        target: scheme.target(),
        c_const: scheme.c_const(),
        padding: scheme.padding(),
        residual: scheme.residual(),
        coefficient_degree: table.degree(),
        tail_bound: table.tail_bound(),
        tail_tol_met: table.tail_tol_met(),
        inverse_degree: inverse.degree(),
        inverse_requested_degree: inverse.requested_degree(),
        inverse_hit_noise_floor: inverse.hit_noise_floor(),
        radius_estimate: inverse.radius_estimate(),
        inverse_coefficients: with_inverse.then(|| inverse.coefficients()),
    }
}

fn coeffs(args: &CoeffsArgs) -> Result<Run> {
    let table = CoefficientTable::compute(args.k, &truncation(&args.truncation))?;
    #[derive(Serialize)]
    struct Row {
        n: usize,
        a_n: f64,
    }
    let csv = csv_string(
        table
            .coefficients()
            .iter()
            .enumerate()
            .map(|(n, &a_n)| Row { n, a_n }),
    )?;
    Ok(Run {
        outcome: Outcome::Table(to_value(table_summary(&table)), csv),
        passed: true,
    })
}

fn scheme(args: &SchemeArgs) -> Result<Run> {
    let scheme = KrivineScheme::build(args.k, &scheme_config(&args.scheme))?;
    Ok(Run {
        outcome: Outcome::Json(to_value(scheme_summary(&scheme, true))),
        passed: true,
    })
}

fn trend(args: &TrendArgs) -> Result<Run> {
    let rows = quality_trend(args.k_min, args.k_max, &scheme_config(&args.scheme))?;
    let csv = csv_string(&rows)?;
    Ok(Run {
        outcome: Outcome::Table(to_value(&rows), csv),
        passed: true,
    })
}

fn fk_mc(args: &FkMcArgs) -> Result<Run> {
    let estimate = mc_estimate_fk(args.k, args.t, args.samples, args.seed)?;
    let table = CoefficientTable::compute(args.k, &TruncationConfig::default())?;
    let series = table.eval(args.t)?;
    #[derive(Serialize)]
    struct FkReport {
        estimate: krivine::validator::McEstimate,
        series_value: f64,
        series_tail_bound: f64,
        z: f64,
    }
    let z = if estimate.stderr > 0.0 {
        (estimate.value - series) / estimate.stderr
    } else {
        0.0
    };
    Ok(Run {
        outcome: Outcome::Json(to_value(FkReport {
            estimate,
            series_value: series,
            series_tail_bound: table.tail_bound(),
            z,
        })),
        passed: true,
    })
}

fn bruteforce(args: &InputArgs) -> Result<Run> {
    let instance = ProblemInstance::load(&args.input)?;
    let best = brute_force_opt(&instance)?;
    Ok(Run {
        outcome: Outcome::Json(to_value(best)),
        passed: true,
    })
}

#[derive(Serialize)]
struct RelaxSummary {
    value: f64,
    converged: bool,
    grad_norm: f64,
    iterations: usize,
    best_restart: usize,
    rank: usize,
}

struct Pipeline {
    instance: ProblemInstance,
    scheme: KrivineScheme,
    partition: PartitionPair,
    relaxed: RelaxOutcome,
    relax_summary: RelaxSummary,
    rounding: RoundingConfig,
}

fn prepare(args: &PipelineArgs) -> Result<Pipeline> {
    let instance = ProblemInstance::load(&args.input.input)?;
    let scheme = KrivineScheme::build(args.k, &scheme_config(&args.scheme))?;
    let partition = match &args.partition {
        Some(path) => PartitionPair::load(path)?,
        None if args.k == 1 => PartitionPair::sign(),
        None => {
            return Err(usage(
                "partition",
                "k > 1 needs a partition file (--partition)",
            ))
        }
    };
    let mut relax_config = RelaxConfig::for_instance(&instance, args.seed);
    relax_config.restarts = args.restarts;
    if let Some(rank) = args.rank {
        relax_config.rank = rank;
    }
    let relaxed = sdp_relax(&instance, &relax_config)?;
    let relax_summary = RelaxSummary {
        value: relaxed.value,
        converged: relaxed.converged,
        grad_norm: relaxed.grad_norm,
        iterations: relaxed.iterations,
        best_restart: relaxed.best_restart,
        rank: relax_config.rank,
    };
    Ok(Pipeline {
        instance,
        scheme,
        partition,
        relaxed,
        relax_summary,
        rounding: RoundingConfig {
            trials: args.trials,
            seed: args.seed,
        },
    })
}

fn round(args: &PipelineArgs) -> Result<Run> {
    let p = prepare(args)?;
    let original: &VectorSolution = &p.relaxed.solution;
    let preprocessed = preprocess(original, &p.scheme)?;
    let report: RoundingReport = rounding_expectation(
        &p.instance,
        original,
        &preprocessed,
        &p.scheme,
        &p.partition,
        &p.rounding,
    )?;
    #[derive(Serialize)]
    struct RoundReport<'a> {
        scheme: SchemeSummary<'a>,
        constructive: bool,
        relaxation: RelaxSummary,
        objective_z: f64,
        rounding: RoundingReport,
    }
    Ok(Run {
        outcome: Outcome::Json(to_value(RoundReport {
            scheme: scheme_summary(&p.scheme, false),
            constructive: p.partition.is_constructive(),
            relaxation: p.relax_summary,
            objective_z: report.objective_z(),
            rounding: report,
        })),
        passed: true,
    })
}

fn validate(args: &PipelineArgs) -> Result<Run> {
    let p = prepare(args)?;
    let check: IdentityCheck = verify_scheme_identity(
        &p.instance,
        &p.relaxed.solution,
        &p.scheme,
        &p.partition,
        &p.rounding,
    )?;
    let passed = check.pass != Some(false);
    #[derive(Serialize)]
    struct ValidateReport<'a> {
        scheme: SchemeSummary<'a>,
        relaxation: RelaxSummary,
        check: IdentityCheck,
    }
    Ok(Run {
        outcome: Outcome::Json(to_value(ValidateReport {
            scheme: scheme_summary(&p.scheme, false),
            relaxation: p.relax_summary,
            check,
        })),
        passed,
    })
}

pub fn run(command: &Command) -> Result<Run> {
    match command {
        Command::Coeffs(a) => coeffs(a),
        Command::Scheme(a) => scheme(a),
        Command::Trend(a) => trend(a),
        Command::FkMc(a) => fk_mc(a),
        Command::Round(a) => round(a),
        Command::Bruteforce(a) => bruteforce(a),
        Command::Validate(a) => validate(a),
    }
}

pub fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Coeffs(_) => "coeffs",
        Command::Scheme(_) => "scheme",
        Command::Trend(_) => "trend",
        Command::FkMc(_) => "fk-mc",
        Command::Round(_) => "round",
        Command::Bruteforce(_) => "bruteforce",
        Command::Validate(_) => "validate",
    }
}

/// Formats a finished run; CSV is only available for tabular commands.
pub fn render(
    format: Format,
    command: &'static str,
    config: serde_json::Value,
    outcome: Outcome,
) -> Result<String> {
    let result = match (format, outcome) {
        (Format::Csv, Outcome::Table(_, csv)) => return Ok(csv),
        (Format::Csv, Outcome::Json(_)) => {
            return Err(usage(
                "format",
                format!("csv output is available for coeffs and trend, not {command}"),
            ))
        }
        (Format::Json, Outcome::Json(v) | Outcome::Table(v, _)) => v,
    };
    #[derive(Serialize)]
    struct Envelope {
        schema: &'static str,
        version: &'static str,
        command: &'static str,
        config: serde_json::Value,
        result: serde_json::Value,
    }
    let envelope = Envelope {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&envelope).expect("report serializes");
    text.push('\n');
    Ok(text)
}
