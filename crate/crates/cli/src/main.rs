//! Command-line front end: conjugacy classes, character tables, Brauer
//! irreducibles, decomposition matrices, lemma verification bundles,
//! pro-orders, and torus character evaluation.
//!
//! Exit codes: 0 success / all assertions pass, 1 verification failure,
//! 2 usage or input error. All output is deterministic byte for byte.

mod emit;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use gl2rep::chars;
use gl2rep::cyclo::CycNum;
use gl2rep::proorder;
use gl2rep::weyl::{self, HighestWeight};

#[derive(Parser)]
#[command(name = "gl2rep", version, about = "Exact modular representation theory of GL2 over small finite fields")]
struct Cli {
    /// Write output to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the conjugacy classes of GL2(F_q)
    Classes {
        #[arg(long)]
        q: u64,
        /// Keep only the classes of order prime to L
        #[arg(long = "mod", value_name = "L")]
        modulus: Option<u64>,
    },
    /// Print the ordinary character table of GL2(F_q)
    Chartable {
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// List the irreducible mod-L modules with their Brauer labels
    Irreducibles {
        #[arg(long)]
        q: u64,
        #[arg(long = "mod", value_name = "L")]
        modulus: u64,
    },
    /// Decompose an ordinary character into mod-L constituents
    Decompose {
        #[arg(long)]
        q: u64,
        #[arg(long = "mod", value_name = "L")]
        modulus: u64,
        /// Row label from the ordinary table, e.g. "St(0)" or "Cusp(3,1)"
        #[arg(long)]
        rep: String,
    },
    /// Print the mod-L decomposition matrix with row and column labels
    Decmatrix {
        #[arg(long)]
        q: u64,
        #[arg(long = "mod", value_name = "L")]
        modulus: u64,
    },
    /// Run a lemma verification bundle and emit a report
    Verify {
        /// Lemma id (e.g. 3.2b, 7.cw) or "all"
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long = "mod", value_name = "L")]
        modulus: Option<u64>,
        /// Parameter cap for grid sweeps
        #[arg(long, default_value_t = 7)]
        max_p: u64,
    },
    /// Pro-order of GL_n over the p-adic integers as a supernatural number
    Proorder {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u64,
    },
    /// Evaluate the torus character of a highest weight at an integer point
    CartanWeyl {
        /// Weakly decreasing integers, comma-separated
        #[arg(long, value_name = "L1,..,LN", allow_hyphen_values = true)]
        lambda: String,
        /// Integer torus coordinates, comma-separated
        #[arg(long, value_name = "T1,..,TN", allow_hyphen_values = true)]
        t: String,
    },
}

fn parse_i64_list(s: &str, what: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<i64>()
                .map_err(|_| format!("{what}: {piece:?} is not an integer"))
        })
        .collect()
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cmd: &Cmd) -> Result<(String, ExitCode), String> {
    match cmd {
        Cmd::Classes { q, modulus } => {
            let classes = chars::class_list(*q, *modulus).map_err(|e| e.to_string())?;
            Ok((emit::classes_text(&classes), ExitCode::SUCCESS))
        }
        Cmd::Chartable { q, format } => {
            let table = chars::ordinary_table(*q).map_err(|e| e.to_string())?;
            let text = match format {
                Format::Table => emit::chartable_text(*q, &table).map_err(|e| e.to_string())?,
                Format::Csv => emit::chartable_csv(*q, &table).map_err(|e| e.to_string())?,
                Format::Json => {
                    json_line(&emit::chartable_json(*q, &table).map_err(|e| e.to_string())?)
                }
            };
            Ok((text, ExitCode::SUCCESS))
        }
        Cmd::Irreducibles { q, modulus } => {
            let ed = chars::enumerate_irreducibles(*q, *modulus).map_err(|e| e.to_string())?;
            let modules: Vec<Value> = ed
                .labels
                .iter()
                .zip(&ed.modules)
                .map(|(l, m)| {
                    let mut o = Map::new();
                    o.insert("dim".into(), Value::from(m.dim()));
                    o.insert("label".into(), Value::from(l.clone()));
                    Value::Object(o)
                })
                .collect();
            let mut o = Map::new();
            o.insert("ell".into(), Value::from(*modulus));
            o.insert("modules".into(), Value::Array(modules));
            o.insert("q".into(), Value::from(*q));
            Ok((json_line(&Value::Object(o)), ExitCode::SUCCESS))
        }
        Cmd::Decompose { q, modulus, rep } => {
            let table = chars::ordinary_table(*q).map_err(|e| e.to_string())?;
            let chi = table
                .iter()
                .find(|c| c.label() == rep)
                .ok_or_else(|| format!("no ordinary character labeled {rep:?} for q = {q}"))?;
            let mults = chars::decompose(chi, *modulus).map_err(|e| e.to_string())?;
            let ed = chars::enumerate_irreducibles(*q, *modulus).map_err(|e| e.to_string())?;
            let constituents: Vec<Value> = ed
                .labels
                .iter()
                .zip(&mults)
                .filter(|(_, &m)| m > 0)
                .map(|(l, &m)| {
                    let mut o = Map::new();
                    o.insert("label".into(), Value::from(l.clone()));
                    o.insert("multiplicity".into(), Value::from(m));
                    Value::Object(o)
                })
                .collect();
            let mut o = Map::new();
            o.insert("constituents".into(), Value::Array(constituents));
            o.insert("degree".into(), Value::from(chi.degree().map_err(|e| e.to_string())?));
            o.insert("ell".into(), Value::from(*modulus));
            o.insert("q".into(), Value::from(*q));
            o.insert("rep".into(), Value::from(rep.clone()));
            Ok((json_line(&Value::Object(o)), ExitCode::SUCCESS))
        }
        Cmd::Decmatrix { q, modulus } => {
            let dm = chars::decomposition_matrix(*q, *modulus).map_err(|e| e.to_string())?;
            let mut o = Map::new();
            o.insert(
                "cols".into(),
                Value::Array(dm.col_labels.iter().cloned().map(Value::from).collect()),
            );
            o.insert("ell".into(), Value::from(dm.ell));
            o.insert(
                "entries".into(),
                Value::Array(
                    dm.entries
                        .iter()
                        .map(|row| Value::Array(row.iter().map(|&e| Value::from(e)).collect()))
                        .collect(),
                ),
            );
            o.insert("permutation".into(), Value::from(dm.is_permutation()));
            o.insert("q".into(), Value::from(dm.q));
            o.insert(
                "rows".into(),
                Value::Array(dm.row_labels.iter().cloned().map(Value::from).collect()),
            );
            Ok((json_line(&Value::Object(o)), ExitCode::SUCCESS))
        }
        Cmd::Verify {
            lemma,
            p,
            q,
            modulus,
            max_p,
        } => {
            let reports = if lemma == "all" {
                if p.is_some() || q.is_some() || modulus.is_some() {
                    return Err("--lemma all sweeps its own grid; only --max-p applies".into());
                }
                verify::run_all(*max_p)
            } else {
                verify::run_lemma(
                    lemma,
                    &verify::LemmaArgs {
                        p: *p,
                        q: *q,
                        ell: *modulus,
                        max_p: *max_p,
                    },
                )?
            };
            let ok = reports.iter().all(|r| r.passed());
            let text = if reports.len() == 1 {
                json_line(&reports[0].to_json())
            } else {
                let mut o = Map::new();
                o.insert("lemma".into(), Value::from(lemma.clone()));
                o.insert("max_p".into(), Value::from(*max_p));
                o.insert(
                    "reports".into(),
                    Value::Array(reports.iter().map(|r| r.to_json()).collect()),
                );
                json_line(&Value::Object(o))
            };
            let code = if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE };
            Ok((text, code))
        }
        Cmd::Proorder { n, p } => {
            let x = proorder::pro_order_gln(*n, *p).map_err(|e| e.to_string())?;
            Ok((format!("{x}\n"), ExitCode::SUCCESS))
        }
        Cmd::CartanWeyl { lambda, t } => {
            let lam = parse_i64_list(lambda, "--lambda")?;
            let pts = parse_i64_list(t, "--t")?;
            let hw = HighestWeight::new(lam.clone()).map_err(|e| e.to_string())?;
            let point: Vec<CycNum> = pts.iter().map(|&x| CycNum::from_int(x)).collect();
            let value = weyl::cartan_weyl_char(&hw, &point).map_err(|e| e.to_string())?;
            let mut o = Map::new();
            o.insert(
                "dimension".into(),
                emit::json_num(&weyl::weyl_dimension(&hw).to_string()),
            );
            o.insert(
                "lambda".into(),
                Value::Array(lam.into_iter().map(Value::from).collect()),
            );
            o.insert(
                "t".into(),
                Value::Array(pts.into_iter().map(Value::from).collect()),
            );
            o.insert("value".into(), emit::cyc_to_json(&value));
            Ok((json_line(&Value::Object(o)), ExitCode::SUCCESS))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.cmd) {
        Ok((text, code)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            code
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            eprintln!("run `gl2rep --help` for usage");
            ExitCode::from(2)
        }
    }
}
