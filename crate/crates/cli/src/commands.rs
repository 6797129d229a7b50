use std::fs;
use std::path::Path;

use iet_core::diophantine::{self, Functional, RecordEntry};
use iet_core::induction::{self, StackCheck};
use iet_core::spectral;
use iet_core::{Iet, IetConfig, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::pow;
use serde_json::{json, Value};

use crate::format::{document, g12, num, scalar, table};
use crate::{Cli, Command, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] iet_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use iet_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                E::Scalar(_)
                | E::InvalidPermutation(_)
                | E::InvalidLengths(_)
                | E::OutOfDomain { .. } => 2,
                E::StepCapExceeded { .. } => 3,
                E::Precondition(_) | E::Induction(_) => 4,
            },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn load_config(path: &Path) -> Result<Iet> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let is_json =
        path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    let config: IetConfig = if is_json {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    } else {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    };
    Ok(config.build()?)
}

/// Exact scalar from `p/q`, `a+b*sqrt(d)` or a terminating decimal.
pub fn parse_scalar(flag: &str, text: &str) -> Result<Scalar> {
    let bad = |e: String| CliError::Config(format!("--{flag}: {e}"));
    let t = text.trim();
    if t.contains('.') && !t.contains("sqrt") {
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (int, frac) = body.split_once('.').expect("contains a dot");
        let digits = format!("{int}{frac}");
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad(format!("malformed decimal {text:?}")));
        }
        let mut n: BigInt = digits
            .parse()
            .map_err(|_| bad(format!("malformed decimal {text:?}")))?;
        if neg {
            n = -n;
        }
        let d = pow(BigInt::from(10), frac.len());
        return Ok(Scalar::from_rational(BigRational::new(n, d)));
    }
    t.parse::<Scalar>().map_err(|e| bad(e.to_string()))
}

/// `lo:hi:count` as exact equispaced points, both ends included.
pub fn parse_grid(text: &str) -> Result<Vec<Scalar>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(CliError::Config(format!(
            "--grid: expected lo:hi:count, got {text:?}"
        )));
    };
    let lo = parse_scalar("grid", lo)?;
    let hi = parse_scalar("grid", hi)?;
    let count: i64 = count
        .parse()
        .map_err(|_| CliError::Config(format!("--grid: count {count:?} is not an integer")))?;
    if count < 1 {
        return Err(CliError::Config("--grid: count must be positive".into()));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = (&hi - &lo).div_int(count - 1);
    Ok((0..count).map(|i| &lo + step.scale(i)).collect())
}

fn iet(cli: &Cli) -> Result<Iet> {
    match &cli.config {
        Some(path) => load_config(path),
        None => Err(CliError::Config("--config is required".into())),
    }
}

pub fn run(cli: &Cli) -> Result<String> {
    let f = iet(cli)?;
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Eval { x, inverse } => {
            let x = parse_scalar("x", x)?;
            let y = if *inverse {
                f.evaluate_inverse(&x)?
            } else {
                f.evaluate(&x)?
            };
            let key = if *inverse { "f_inverse_x" } else { "f_x" };
            Ok(if csv {
                table(&["x", key], vec![vec![x.to_string(), y.to_string()]])
            } else {
                document("eval", vec![("x", scalar(&x)), (key, scalar(&y))])
            })
        }
        Command::Orbit { x, n, symmetric } => {
            let x = parse_scalar("x", x)?;
            let w = if *symmetric {
                f.orbit_window_symmetric(&x, *n)?
            } else {
                f.orbit_window(&x, *n)?
            };
            Ok(if csv {
                table(
                    &["k", "value"],
                    w.iter()
                        .map(|(k, v)| vec![k.to_string(), v.to_string()])
                        .collect(),
                )
            } else {
                let pts: Vec<Value> = w
                    .iter()
                    .map(|(k, v)| json!({"k": k, "value": scalar(v)}))
                    .collect();
                document(
                    "orbit",
                    vec![
                        ("x", scalar(&x)),
                        ("n", json!(n)),
                        ("window", Value::Array(pts)),
                    ],
                )
            })
        }
        Command::Induce { t } => {
            let t = parse_scalar("t", t)?;
            let induced = induction::induce(&f, &t, cli.step_cap)?;
            let rows: Vec<Vec<String>> = induced
                .pieces()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    vec![
                        (i + 1).to_string(),
                        p.interval.lo.to_string(),
                        p.interval.hi.to_string(),
                        p.return_time.to_string(),
                        p.translation.to_string(),
                    ]
                })
                .collect();
            Ok(if csv {
                table(&["piece", "lo", "hi", "return_time", "translation"], rows)
            } else {
                let pieces: Vec<Value> = induced
                    .pieces()
                    .iter()
                    .map(|p| {
                        json!({
                            "lo": scalar(&p.interval.lo),
                            "hi": scalar(&p.interval.hi),
                            "return_time": p.return_time,
                            "translation": scalar(&p.translation),
                        })
                    })
                    .collect();
                document(
                    "induce",
                    vec![
                        ("t", scalar(&t)),
                        ("s", json!(induced.piece_count())),
                        ("perm", json!(induced.iet().permutation().images())),
                        ("tower_mass", scalar(&induced.tower_mass())),
                        ("pieces", Value::Array(pieces)),
                    ],
                )
            })
        }
        Command::Psi { t, horizon, phi } => {
            let t = parse_scalar("t", t)?;
            let series = if *phi {
                diophantine::phi_records(&f, &t, *horizon)?
            } else {
                diophantine::psi_records(&f, &t, *horizon)?
            };
            Ok(if csv {
                table(
                    &["n", "value", "value_float", "is_record"],
                    series
                        .entries
                        .iter()
                        .map(|e| {
                            vec![
                                e.n.to_string(),
                                e.value.to_string(),
                                g12(e.value.to_f64()),
                                e.is_record.to_string(),
                            ]
                        })
                        .collect(),
                )
            } else {
                let entry = |e: &RecordEntry| {
                    json!({
                        "n": e.n,
                        "value": scalar(&e.value),
                        "value_float": num(e.value.to_f64()),
                        "is_record": e.is_record,
                    })
                };
                let functional = match series.functional {
                    Functional::Psi => "psi",
                    Functional::Phi => "phi",
                };
                document(
                    "psi",
                    vec![
                        ("t", scalar(&t)),
                        ("functional", json!(functional)),
                        ("horizon", json!(series.horizon)),
                        ("schedule", json!(series.schedule)),
                        ("psi_hat", num(series.psi_hat)),
                        ("valid", json!(series.valid)),
                        ("vanished_at", json!(series.vanished_at)),
                        ("record_count", json!(series.record_count())),
                        ("best", series.best.as_ref().map_or(Value::Null, entry)),
                        (
                            "entries",
                            Value::Array(series.entries.iter().map(entry).collect()),
                        ),
                    ],
                )
            })
        }
        Command::Scan {
            grid,
            horizon,
            threshold,
        } => {
            let grid = parse_grid(grid)?;
            let threshold = threshold.unwrap_or_else(|| diophantine::default_threshold(&f));
            let rows = diophantine::scan_critical(&f, &grid, *horizon, threshold, cli.jobs)?;
            Ok(if csv {
                table(
                    &[
                        "t",
                        "classification",
                        "psi_hat",
                        "record_count",
                        "best_n",
                        "best_value_exact",
                        "dprime_depth",
                    ],
                    rows.iter()
                        .map(|r| {
                            vec![
                                r.t.to_string(),
                                r.classification.as_str().to_string(),
                                g12(r.psi_hat),
                                r.record_count.to_string(),
                                r.best_n.map_or(String::new(), |n| n.to_string()),
                                r.best_value_exact
                                    .as_ref()
                                    .map_or(String::new(), |v| v.to_string()),
                                r.dprime_depth.to_string(),
                            ]
                        })
                        .collect(),
                )
            } else {
                let count = |c| rows.iter().filter(|r| r.classification == c).count();
                use diophantine::Classification as C;
                let items: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "t": scalar(&r.t),
                            "classification": r.classification.as_str(),
                            "psi_hat": num(r.psi_hat),
                            "record_count": r.record_count,
                            "best_n": r.best_n,
                            "best_value_exact": r.best_value_exact.as_ref().map(|v| v.to_string()),
                            "dprime_depth": r.dprime_depth,
                        })
                    })
                    .collect();
                document(
                    "scan",
                    vec![
                        ("horizon", json!(horizon)),
                        ("threshold", num(threshold)),
                        ("schedule", json!(diophantine::SCHEDULE_ID)),
                        (
                            "note",
                            json!("classifications are finite-horizon evidence, not proofs"),
                        ),
                        (
                            "counts",
                            json!({
                                "DPrimeHit": count(C::DPrimeHit),
                                "PsiPositiveEvidence": count(C::PsiPositiveEvidence),
                                "Undecided": count(C::Undecided),
                            }),
                        ),
                        ("rows", Value::Array(items)),
                    ],
                )
            })
        }
        Command::Wm {
            t,
            horizon,
            grid_size,
            x,
            peak_threshold,
        } => {
            let t = parse_scalar("t", t)?;
            let x = x.as_deref().map(|x| parse_scalar("x", x)).transpose()?;
            let scan = spectral::eigenvalue_scan(
                &f,
                &t,
                *grid_size,
                *horizon,
                x,
                *peak_threshold,
                cli.jobs,
            )?;
            Ok(if csv {
                table(
                    &["alpha", "V_N", "V_2N", "persistent"],
                    (0..scan.grid_size)
                        .map(|m| {
                            vec![
                                g12(scan.alpha(m)),
                                g12(scan.v_n[m]),
                                g12(scan.v_2n[m]),
                                scan.persistent(m).to_string(),
                            ]
                        })
                        .collect(),
                )
            } else {
                let peaks: Vec<Value> = scan
                    .peaks
                    .iter()
                    .map(|p| {
                        json!({
                            "alpha": num(p.alpha),
                            "V_N": num(p.v_n),
                            "V_2N": num(p.v_2n),
                            "persistent": p.persistent,
                        })
                    })
                    .collect();
                let grid: Vec<Value> = (0..scan.grid_size)
                    .map(|m| {
                        json!({
                            "alpha": num(scan.alpha(m)),
                            "V_N": num(scan.v_n[m]),
                            "V_2N": num(scan.v_2n[m]),
                            "persistent": scan.persistent(m),
                        })
                    })
                    .collect();
                document(
                    "wm",
                    vec![
                        ("t", scalar(&scan.t)),
                        ("x", scalar(&scan.x)),
                        ("horizon", json!(scan.horizon)),
                        ("grid_size", json!(scan.grid_size)),
                        ("coarse_horizon", json!(scan.coarse_horizon)),
                        ("peak_threshold", num(scan.peak_threshold)),
                        (
                            "note",
                            json!("deterministic, no randomness; peaks are evidence against weak mixing, not a verdict"),
                        ),
                        ("peaks", Value::Array(peaks)),
                        ("grid", Value::Array(grid)),
                    ],
                )
            })
        }
        Command::Stack { height, trim, dump } => {
            let tall = induction::build_tall_stack(&f, *height, cli.step_cap)?;
            let stack = if *trim {
                induction::trim_stack(&tall.stack)?
            } else {
                tall.stack.clone()
            };
            let check = induction::verify_stack(&f, &stack);
            if let Some(path) = dump {
                fs::write(path, stack.to_jsonl())?;
            }
            Ok(if csv {
                table(
                    &["level", "lo", "hi"],
                    stack
                        .levels()
                        .iter()
                        .enumerate()
                        .map(|(k, y)| vec![k.to_string(), y.lo.to_string(), y.hi.to_string()])
                        .collect(),
                )
            } else {
                let verify = match check {
                    StackCheck::Ok => json!({"status": "Ok"}),
                    StackCheck::Violation { level, which } => {
                        json!({"status": "Violation", "level": level, "which": which})
                    }
                };
                let levels: Vec<Value> = stack
                    .levels()
                    .iter()
                    .map(|y| json!({"lo": scalar(&y.lo), "hi": scalar(&y.hi)}))
                    .collect();
                document(
                    "stack",
                    vec![
                        ("N", json!(height)),
                        ("base", scalar(&tall.base)),
                        ("base_choice", json!(tall.base_choice)),
                        ("tower", json!(tall.tower)),
                        ("towers", json!(tall.towers)),
                        ("trimmed", json!(trim)),
                        ("height", json!(stack.height())),
                        ("width", scalar(&stack.width())),
                        ("measure", scalar(&stack.measure())),
                        ("measure_float", num(stack.measure().to_f64())),
                        ("distinct", json!(stack.is_distinct())),
                        ("verify", verify),
                        ("levels", Value::Array(levels)),
                    ],
                )
            })
        }
        Command::Idoc { depth } => {
            let report = f.check_idoc(*depth);
            Ok(if csv {
                let row = match &report {
                    iet_core::iet::IdocReport::Ok { depth } => {
                        vec![
                            "Ok".into(),
                            depth.to_string(),
                            String::new(),
                            String::new(),
                            String::new(),
                        ]
                    }
                    iet_core::iet::IdocReport::Collision { steps, from, to } => vec![
                        "Collision".into(),
                        depth.to_string(),
                        steps.to_string(),
                        from.to_string(),
                        to.to_string(),
                    ],
                };
                table(&["status", "depth", "steps", "from", "to"], vec![row])
            } else {
                document(
                    "idoc",
                    vec![("depth", json!(depth)), ("report", json!(report))],
                )
            })
        }
    }
}
