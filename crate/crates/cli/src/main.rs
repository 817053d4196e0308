use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ksv::exec::{self, Options, DEFAULT_WINDOW};
use ksv::model::{self, MAX_WINDOW};
use ksv::syntax;
use ksv_core::polyring::{HomogeneousIdeal, MonomialOrder, PolyRing};
use ksv_core::varieties::{self, VarietyHandle};
use ksv_core::Field;

#[derive(Parser)]
#[command(name = "ksv", version, about = "Support varieties of derived tensor products over Koszul complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a file without running its directives.
    Check {
        file: PathBuf,
        /// Print the file in canonical form.
        #[arg(long)]
        pretty: bool,
    },
    /// Run every directive in a file.
    Run {
        file: PathBuf,
        /// Default window for directives that do not give one.
        #[arg(long, env = "KSV_DEFAULT_WINDOW", default_value_t = DEFAULT_WINDOW)]
        window: i32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Worker threads (defaults to the number of CPUs).
        #[arg(long)]
        jobs: Option<usize>,
        /// Include wall-clock timings; the output is then no longer deterministic.
        #[arg(long)]
        timings: bool,
    },
    /// Join of two projective varieties given by homogeneous ideals.
    Join {
        /// Number of variables `chi1..chiN`.
        #[arg(long)]
        vars: usize,
        /// Variable weights, comma separated (one value applies to all).
        #[arg(long, default_value = "2")]
        weights: String,
        #[arg(long, default_value = "Q")]
        field: String,
        /// Ideal generators, comma separated; give exactly two.
        #[arg(long, num_args = 1, required = true)]
        ideal: Vec<String>,
    },
}

fn input_error(file: &std::path::Path, e: impl std::fmt::Display) -> ExitCode {
    eprintln!("{}: {e}", file.display());
    ExitCode::from(2)
}

fn parse_field(s: &str) -> Result<Field, String> {
    match s.split_whitespace().collect::<Vec<_>>()[..] {
        ["Q"] => Ok(Field::Rationals),
        ["Fp", p] | [p] => p.parse::<u64>().ok().and_then(|p| Field::prime(p).ok()).ok_or(format!("bad field `{s}`")),
        _ => Err(format!("bad field `{s}`")),
    }
}

fn join_command(vars: usize, weights: &str, field: &str, ideals: &[String]) -> Result<String, String> {
    if ideals.len() != 2 {
        return Err("give exactly two --ideal arguments".into());
    }
    let k = parse_field(field)?;
    let mut w: Vec<u32> = weights.split(',').map(|x| x.trim().parse::<u32>().map_err(|_| format!("bad weight `{x}`"))).collect::<Result<_, _>>()?;
    if w.len() == 1 {
        w = vec![w[0]; vars];
    }
    if w.len() != vars {
        return Err(format!("{} weights for {vars} variables", w.len()));
    }
    let names = (1..=vars).map(|i| format!("chi{i}")).collect();
    let s = PolyRing::new(k, names, w, MonomialOrder::Grevlex).map_err(|e| e.to_string())?;
    let mut hs = Vec::new();
    for src in ideals {
        let exprs = syntax::parse_exprs(src).map_err(|e| format!("--ideal `{src}`: {e}"))?;
        let gens = exprs.iter().map(|e| model::eval(&s, e, "the ideal").map_err(|e| e.message)).collect::<Result<Vec<_>, _>>()?;
        hs.push(VarietyHandle::new(HomogeneousIdeal::new(&s, gens).map_err(|e| e.to_string())?));
    }
    let j = varieties::join(&hs[0], &hs[1]).map_err(|e| e.to_string())?;
    Ok(format!("{j}\nclassification: {}\nproj_dim: {}", j.classification(), j.proj_dim()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file, pretty } => {
            let src = match std::fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => return input_error(&file, e),
            };
            match model::load(&src) {
                Ok((session, m)) => {
                    if pretty {
                        print!("{}", syntax::pretty(&session));
                    } else {
                        println!("ok: {m}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => input_error(&file, e),
            }
        }
        Command::Run { file, window, format, jobs, timings } => {
            if !(0..=MAX_WINDOW as i32).contains(&window) {
                eprintln!("window {window} must be between 0 and {MAX_WINDOW}");
                return ExitCode::from(2);
            }
            let src = match std::fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => return input_error(&file, e),
            };
            let m = match model::load(&src) {
                Ok((_, m)) => m,
                Err(e) => return input_error(&file, e),
            };
            let opts = Options { window, timings };
            let reports = match jobs {
                Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
                    Ok(pool) => pool.install(|| exec::run(&m, opts)),
                    Err(e) => {
                        eprintln!("{e}");
                        return ExitCode::from(2);
                    }
                },
                None => exec::run(&m, opts),
            };
            match format {
                Format::Text => print!("{}", exec::to_text(&reports)),
                Format::Json => println!("{}", exec::to_json(&m, &reports)),
            }
            if reports.iter().any(|r| r.failed()) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Join { vars, weights, field, ideal } => match join_command(vars, &weights, &field, &ideal) {
            Ok(s) => {
                println!("{s}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        },
    }
}
