use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use finsler::catalog;
use finsler::geodesic::geodesic_integrate;
use finsler::ladder::{decompose, kernel_defect, ladder_label, reconstruct};
use finsler::metrics::validation_samples;
use finsler::{DiffEngine, Point};
use finsler_cli::objects::{example_spray, named_object};
use finsler_cli::{parse_config, run_suite, to_json, Report, RunConfig, REPORT_EXAMPLES};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "finsler",
    version,
    about = "Anisotropic tensor calculus property suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Analytic,
    Fd4,
}

impl Method {
    fn engine(self) -> DiffEngine {
        match self {
            Method::Analytic => DiffEngine::analytic(),
            Method::Fd4 => DiffEngine::fd4(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a JSON config file and print the report.
    Check {
        config: PathBuf,
        /// Also write the report here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a named object of an example at one point.
    Eval {
        example: String,
        object: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<f64>,
        #[arg(long, value_enum, default_value = "analytic")]
        method: Method,
    },
    /// Decompose a named object down to a covariant level and reconstruct it.
    Ladder {
        example: String,
        #[arg(long, default_value = "g")]
        object: String,
        #[arg(long, default_value_t = 0)]
        to_level: usize,
        /// Defaults to the first validation sample of the example.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Option<Vec<f64>>,
    },
    /// Integrate the geodesic spray of an example.
    Geodesic {
        example: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y0: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Run every applicable check on every built-in example.
    Report {
        #[arg(long, default_value_t = finsler_cli::config::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = finsler_cli::config::DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
}

type CliResult = Result<bool, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check { config, output } => check(config, output),
        Command::Eval {
            example,
            object,
            x,
            y,
            method,
        } => eval(&example, &object, &x, &y, method.engine()),
        Command::Ladder {
            example,
            object,
            to_level,
            x,
            y,
        } => ladder(&example, &object, to_level, x, y),
        Command::Geodesic {
            example,
            x0,
            y0,
            dt,
            steps,
        } => geodesic(&example, &x0, &y0, dt, steps),
        Command::Report {
            samples,
            seed,
            tolerance,
        } => report(samples, seed, tolerance),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn check(path: PathBuf, output: Option<PathBuf>) -> CliResult {
    let text = std::fs::read_to_string(&path)?;
    let config = parse_config(&text)?.with_env_seed()?;
    let reports = run_suite(&config)?;
    let report = Report::new(config, reports);
    let json = to_json(&report);
    println!("{json}");
    if let Some(out) = output {
        std::fs::write(out, format!("{json}\n"))?;
    }
    Ok(report.all_pass())
}

fn eval(example: &str, object: &str, x: &[f64], y: &[f64], engine: DiffEngine) -> CliResult {
    let ex = catalog::example(example, DiffEngine::analytic())?;
    let field = named_object(&ex, object, &engine)?;
    let values = field.evaluate(x, y)?;
    let out = json!({
        "example": example,
        "object": object,
        "label": field.label(),
        "type": [field.contra(), field.cov()],
        "homogeneity": field.alpha(),
        "x": x,
        "y": y,
        "values": values,
    });
    println!("{}", to_json(&out));
    Ok(true)
}

fn ladder(
    example: &str,
    object: &str,
    to_level: usize,
    x: Option<Vec<f64>>,
    y: Option<Vec<f64>>,
) -> CliResult {
    let engine = DiffEngine::analytic();
    let ex = catalog::example(example, engine)?;
    let s = named_object(&ex, object, &engine)?;
    let p = match (x, y) {
        (Some(x), Some(y)) => Point::new(x, y),
        (None, None) => validation_samples(s.domain())?.remove(0),
        _ => return Err("give both --x and --y or neither".into()),
    };
    let (_, omega) = ladder_label(&s)?;
    let beta = omega - to_level as i64;
    let d = decompose(&s, beta, &engine)?;
    let back = reconstruct(&d, &engine)?;
    let original = s.evaluate(&p.x, &p.y)?;
    let rebuilt = back.values(&p.x, &p.y)?;
    let defect = original
        .iter()
        .zip(&rebuilt)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut residues = Vec::new();
    for r in &d.residues {
        residues.push(json!({
            "type": [r.contra(), r.cov()],
            "homogeneity": r.alpha(),
            "values": r.values(&p.x, &p.y)?,
            "kernel_defect": kernel_defect(r, &p.x, &p.y)?,
        }));
    }
    let out = json!({
        "example": example,
        "object": object,
        "x": p.x,
        "y": p.y,
        "base": {
            "type": [d.base.contra(), d.base.cov()],
            "homogeneity": d.base.alpha(),
            "values": d.base.values(&p.x, &p.y)?,
        },
        "residues": residues,
        "cascade_factor": d.cascade_factor(),
        "roundtrip_defect": defect,
    });
    println!("{}", to_json(&out));
    Ok(true)
}

fn geodesic(example: &str, x0: &[f64], y0: &[f64], dt: f64, steps: usize) -> CliResult {
    let engine = DiffEngine::analytic();
    let ex = catalog::example(example, engine)?;
    let spray = example_spray(&ex, &engine)?;
    let t = geodesic_integrate(&spray, x0, y0, dt, steps)?;
    let energy_drift = match &ex.lagrangian {
        Some(l) => {
            let l0 = l.field().values(x0, y0)?[0];
            let mut worst: f64 = 0.0;
            for s in &t.states {
                worst = worst.max(((l.field().values(&s.x, &s.y)?[0] - l0) / l0).abs());
            }
            Some(worst)
        }
        None => None,
    };
    let states: Vec<_> = t
        .states
        .iter()
        .map(|s| json!({"x": s.x, "y": s.y}))
        .collect();
    let out = json!({
        "example": example,
        "dt": dt,
        "steps": steps,
        "truncated": t.truncated,
        "energy_drift": energy_drift,
        "states": states,
    });
    println!("{}", to_json(&out));
    Ok(!t.truncated)
}

fn report(samples: usize, seed: u64, tolerance: f64) -> CliResult {
    let mut runs = Vec::new();
    let mut pass = true;
    for name in REPORT_EXAMPLES {
        let mut config = RunConfig::new(name);
        config.samples = samples;
        config.seed = seed;
        config.tolerance = tolerance;
        let config = config.with_env_seed()?;
        config.validate()?;
        let report = Report::new(config.clone(), run_suite(&config)?);
        pass &= report.all_pass();
        runs.push(report);
    }
    println!("{}", to_json(&json!({ "runs": runs })));
    Ok(pass)
}
