use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use suslin_forge::composition::{compose_recursive, Algebra, ZMatrix};
use suslin_forge::epin::{act_on_point, EpinGenerator};
use suslin_forge::error::{Error, Result};
use suslin_forge::orbit::{
    bijection_check, sphere_partition, um_partition, SphereAction, DEFAULT_BUDGET,
};
use suslin_forge::ring::Ring;
use suslin_forge::suslin::{SpherePoint, UnitKind};
use suslin_forge::vaserstein::{spin6_block, transport_action, vaserstein_matrix};
use suslin_forge::verify::{run_verify, Suite, VerifyConfig, DEFAULT_SEED, DEFAULT_TRIALS};

const THREADS_ENV: &str = "SUSLIN_FORGE_THREADS";

#[derive(Parser)]
#[command(
    name = "suslin-forge",
    version,
    about = "Exact checks for Suslin matrices, Spin actions and composition laws"
)]
struct Cli {
    /// Also write the JSON output to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run randomised identity suites.
    Verify {
        /// suslin, epin, vaserstein, composition or all
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value = "int")]
        ring: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Include wall time in the report (breaks byte-for-byte reproducibility).
        #[arg(long)]
        timing: bool,
    },
    /// Orbit partitions of Um_n(R) and the unit sphere over a finite ring.
    Orbits {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value_t = Side::Both)]
        side: Side,
        #[arg(long, value_enum, default_value_t = Action::Epin)]
        action: Action,
        /// Write the report here (same as --json).
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Vaserstein matrix of a point of H(R^3) and transport checks.
    Symbol {
        #[arg(long, default_value = "int")]
        ring: String,
        /// {"v": [...], "w": [...]} or a flat row [v1, v2, v3, w1, w2, w3]
        #[arg(long)]
        point: String,
    },
    /// X ⊙ Y for two Z-matrices stored as {"alpha": ..., "v": [...], "w": [...]}.
    Compose {
        #[arg(long, value_enum)]
        algebra: AlgebraArg,
        #[arg(long, default_value = "int")]
        ring: String,
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Um,
    Sphere,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Action {
    Epin,
    Orthogonal,
}

impl From<Action> for SphereAction {
    fn from(a: Action) -> Self {
        match a {
            Action::Epin => SphereAction::Epin,
            Action::Orthogonal => SphereAction::Orthogonal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraArg {
    Quaternion,
    Octonion,
}

impl From<AlgebraArg> for Algebra {
    fn from(a: AlgebraArg) -> Self {
        match a {
            AlgebraArg::Quaternion => Algebra::SplitQuaternion,
            AlgebraArg::Octonion => Algebra::SplitOctonion,
        }
    }
}

/// Either a finished JSON document with its pass flag, or a usage problem.
enum Outcome {
    Done { output: Value, pass: bool },
    Usage(Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let mut out_path = cli.json.clone();
    let outcome = match cli.command {
        Command::Verify {
            suite,
            ring,
            seed,
            trials,
            timing,
        } => cmd_verify(&suite, &ring, seed, trials, timing),
        Command::Orbits {
            ring,
            n,
            budget,
            side,
            action,
            report,
        } => {
            out_path = report.or(out_path);
            cmd_orbits(&ring, n, budget, side, action.into())
        }
        Command::Symbol { ring, point } => cmd_symbol(&ring, &point),
        Command::Compose {
            algebra,
            ring,
            lhs,
            rhs,
        } => cmd_compose(algebra.into(), &ring, &lhs, &rhs),
    };
    match outcome {
        Outcome::Usage(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Outcome::Done { output, pass } => {
            let text = serde_json::to_string_pretty(&output).expect("JSON values serialize") + "\n";
            print!("{text}");
            if let Some(path) = out_path {
                if let Err(e) = fs::write(&path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Errors raised while reading the inputs are usage errors.
macro_rules! usage {
    ($e:expr) => {
        match $e {
            Ok(x) => x,
            Err(e) => return Outcome::Usage(e.into()),
        }
    };
}

fn cmd_verify(suite: &str, ring: &str, seed: u64, trials: usize, timing: bool) -> Outcome {
    let start = Instant::now();
    let config = VerifyConfig {
        suites: usage!(Suite::parse_selection(suite)),
        selection: suite.into(),
        ring: usage!(Ring::parse(ring)),
        seed,
        trials,
    };
    let mut report = run_verify(&config);
    if timing {
        report.wall_time_ms = Some(start.elapsed().as_millis());
    }
    let pass = report.all_pass();
    Outcome::Done {
        output: serde_json::to_value(&report).expect("report serializes"),
        pass,
    }
}

fn cmd_orbits(ring: &str, n: usize, budget: u128, side: Side, action: SphereAction) -> Outcome {
    let ring = usage!(Ring::parse(ring));
    let result = match side {
        Side::Both => bijection_check(&ring, n, budget, action).map(|r| {
            let pass = r.ok;
            (serde_json::to_value(r).expect("report serializes"), pass)
        }),
        Side::Um => um_partition(&ring, n, budget)
            .map(|(_, part)| (partition_json(&ring, n, "um", &part), true)),
        Side::Sphere => sphere_partition(&ring, n, budget, action)
            .map(|(_, part)| (partition_json(&ring, n, "sphere", &part), true)),
    };
    match result {
        Ok((output, pass)) => Outcome::Done { output, pass },
        Err(e @ (Error::Inconsistency(_) | Error::LeftUniverse(_))) => Outcome::Done {
            output: json!({ "ring": ring.to_string(), "n": n, "ok": false, "error": e.to_string() }),
            pass: false,
        },
        Err(e) => Outcome::Usage(e),
    }
}

fn partition_json(
    ring: &Ring,
    n: usize,
    side: &str,
    part: &suslin_forge::orbit::OrbitPartition,
) -> Value {
    json!({
        "ring": ring.to_string(),
        "n": n,
        "side": side,
        "size": part.universe.len(),
        "generator_set": part.generator_set,
        "orbit_count": part.class_count(),
        "class_sizes": part.classes.iter().map(Vec::len).collect::<Vec<_>>(),
    })
}

fn parse_point(ring: &Ring, text: &str) -> Result<SpherePoint> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match &value {
        Value::Array(items) => {
            let row = items
                .iter()
                .map(|e| ring.from_json(e))
                .collect::<Result<Vec<_>>>()?;
            SpherePoint::from_row(ring, &row)
        }
        _ => SpherePoint::from_json(&value, Some(ring)),
    }
}

/// `V(v, w)`, its Pfaffian, and the transport identity for every Epin_6
/// generator with `lambda = 1`.
fn cmd_symbol(ring: &str, point: &str) -> Outcome {
    let ring = usage!(Ring::parse(ring));
    let p = usage!(parse_point(&ring, point));
    let v = usage!(vaserstein_matrix(&p));
    let mut checks = Vec::new();
    let mut pass = true;
    for first in UnitKind::BOTH {
        for kind in UnitKind::BOTH {
            for i in 2..=3 {
                let g = EpinGenerator::new(&ring, first, kind, i, ring.one(), 3)
                    .expect("valid generator");
                let result = spin6_block(&ring, std::slice::from_ref(&g))
                    .and_then(|m| transport_action(&m, &p))
                    .and_then(|t| Ok((act_on_point(&g, &p)? == t.moved, t)));
                let entry = match result {
                    Ok((ok, t)) => {
                        pass &= ok;
                        json!({ "generator": g.to_json(), "moved": t.moved.to_json(), "pass": ok })
                    }
                    Err(e) => {
                        pass = false;
                        json!({ "generator": g.to_json(), "pass": false, "error": e.to_string() })
                    }
                };
                checks.push(entry);
            }
        }
    }
    Outcome::Done {
        output: json!({
            "point": p.to_json(),
            "V": v.to_json(),
            "pfaffian": v.pfaffian().to_json(),
            "transport_checks": checks,
        }),
        pass,
    }
}

fn read_z(ring: &Ring, algebra: Algebra, path: &Path) -> Result<ZMatrix> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let z = ZMatrix::from_json(ring, Some(algebra), &value)?;
    if z.algebra() != algebra {
        return Err(Error::Precondition(format!(
            "{} holds a {} element",
            path.display(),
            z.algebra().name()
        )));
    }
    Ok(z)
}

fn cmd_compose(algebra: Algebra, ring: &str, lhs: &Path, rhs: &Path) -> Outcome {
    let ring = usage!(Ring::parse(ring));
    let x = usage!(read_z(&ring, algebra, lhs));
    let y = usage!(read_z(&ring, algebra, rhs));
    let xy = usage!(compose_recursive(&x, &y));
    let multiplicative = *xy.q() == ring.mul(x.q(), y.q());
    Outcome::Done {
        output: json!({
            "result": xy.to_json(),
            "q_lhs": ring.to_json(x.q()),
            "q_rhs": ring.to_json(y.q()),
            "q_result": ring.to_json(xy.q()),
            "multiplicative": multiplicative,
        }),
        pass: multiplicative,
    }
}
