use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use taut_core::cohft::{self, ChernKind};
use taut_core::intersect;
use taut_core::pixton::{self, PixtonInput, RSamplePolicy};
use taut_core::verify;
use taut_core::{graphs, Error};

#[derive(Parser, Debug)]
#[command(
    name = "taut",
    version,
    about = "Exact computations with tautological classes on moduli of stable curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Integral cache file, read at start and appended to on exit.
    #[arg(long, global = true, env = "TAUT_CACHE")]
    cache: Option<PathBuf>,

    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Debug, Clone)]
struct Problem {
    #[arg(long)]
    g: u32,

    /// Marking weights as comma-separated signed integers, e.g. `--A=2,1,-3`.
    #[arg(long = "A", value_delimiter = ',', allow_hyphen_values = true, num_args = 0..)]
    a: Vec<i64>,

    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    k: i64,

    /// Highest codimension computed (default: the dimension 3g-3+n).
    #[arg(long)]
    max_codim: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct Sampling {
    /// Smallest sampled r.
    #[arg(long)]
    r_min: Option<u32>,

    /// Total number of sampled r values (overrides the automatic count).
    #[arg(long)]
    r_samples: Option<usize>,

    /// Extra samples beyond the degree bound, used as a consistency check.
    #[arg(long, default_value_t = 3)]
    oversample: usize,
}

impl Sampling {
    fn policy(&self) -> RSamplePolicy {
        RSamplePolicy {
            r_min: self.r_min,
            samples: self.r_samples,
            oversample: self.oversample,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Which {
    Zvonkine,
    Hain,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    Zvonkine,
    Chern,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the stable graphs of M̄_{g,n}.
    Graphs {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
    },
    /// Integrate a monomial in psi and kappa classes over M̄_{g,n}.
    Integral {
        #[arg(long)]
        g: u32,
        /// Psi exponents, one per marking.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        psi: Vec<u32>,
        /// Kappa indices, e.g. `--kappa 1,1` for κ_1².
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        kappa: Vec<u32>,
    },
    /// The class Ω_{g,A,k} as a polynomial in r, with its constant term.
    Pixton {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// The double ramification cycle DR_g(A) = 2^{-g} [Ω_{g,A,0}]_g.
    Dr {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Certify vanishing of [Ω_{g,A,k}]_d for d > g by pairing.
    Verify {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        sampling: Sampling,
        /// Degrees to check (default: all of g+1..=3g-3+n).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        degree: Vec<usize>,
        /// Include wall-clock timings in the certificates.
        #[arg(long)]
        timing: bool,
    },
    /// Compare Ω_{g,A,k} with another construction.
    Compare {
        which: Which,
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Chern-character exponential of the r-th root, checked against the R-matrix action.
    Chiodo {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        r: u32,
        #[arg(long, value_enum, default_value_t = Kind::Zvonkine)]
        kind: Kind,
    },
}

/// What a subcommand produced. `ok` drives the exit status.
struct Outcome {
    json: Value,
    table: String,
    ok: bool,
}

fn max_codim(p: &Problem) -> Result<usize, Error> {
    let input = PixtonInput::new(p.g, &p.a, p.k)?;
    Ok(p.max_codim.unwrap_or(input.dim()))
}

fn class_table(v: &Value) -> String {
    let mut out = String::new();
    let terms = v["terms"].as_array().cloned().unwrap_or_default();
    if terms.is_empty() {
        out.push_str("0\n");
    }
    for t in terms {
        let coef = t
            .get("coefficient")
            .cloned()
            .unwrap_or_else(|| t["coefficients"].clone());
        let coef = match coef {
            Value::String(s) => s,
            other => other.to_string(),
        };
        out.push_str(&format!("{:>16}  {}  {}\n", coef, t["graph"], t["decoration"]));
    }
    out
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Graphs { g, n } => {
            let list = graphs::enumerate_stable_graphs(*g, *n)?;
            let table = list
                .iter()
                .map(|gr| format!("h1={} edges={}  {}", gr.h1(), gr.num_edges(), gr.to_json()))
                .collect::<Vec<_>>()
                .join("\n");
            let json = json!({
                "g": g,
                "n": n,
                "count": list.len(),
                "graphs": list.iter().map(|gr| gr.to_json()).collect::<Vec<_>>(),
            });
            Ok(Outcome {
                table: format!("{} graphs\n{}\n", list.len(), table),
                json,
                ok: true,
            })
        }
        Command::Integral { g, psi, kappa } => {
            let n = psi.len();
            if 2 * *g as i64 - 2 + n as i64 <= 0 {
                return Err(Error::UnstablePair { g: *g, n });
            }
            let v = intersect::kappa_psi_integral(*g, kappa, psi);
            let s = taut_core::arith::rational::to_string(&v);
            Ok(Outcome {
                json: json!({ "g": g, "psi": psi, "kappa": kappa, "value": s }),
                table: format!("{s}\n"),
                ok: true,
            })
        }
        Command::Pixton { problem, sampling } => {
            let input = PixtonInput::new(problem.g, &problem.a, problem.k)?.with_max_codim(max_codim(problem)?)?;
            input.check_balanced()?;
            let rp = pixton::pixton_rpoly(&input, &sampling.policy())?;
            let constant = rp.constant_term().to_json();
            let table = format!(
                "polynomial in r (coefficients of r^0, r^1, ...):\n{}\nconstant term:\n{}",
                class_table(&rp.to_json()),
                class_table(&constant)
            );
            Ok(Outcome {
                json: json!({ "rpoly": rp.to_json(), "constant_term": constant }),
                table,
                ok: true,
            })
        }
        Command::Dr { problem, sampling } => {
            if problem.k != 0 {
                return Err(Error::InvalidInput("the DR cycle uses k = 0".into()));
            }
            let dr = pixton::dr_cycle_with(problem.g, &problem.a, &sampling.policy())?.to_json();
            Ok(Outcome {
                table: class_table(&dr),
                json: dr,
                ok: true,
            })
        }
        Command::Verify {
            problem,
            sampling,
            degree,
            timing,
        } => {
            let degrees = (!degree.is_empty()).then(|| degree.clone());
            let certs = verify::verify_dr_vanishing(problem.g, &problem.a, problem.k, degrees, &sampling.policy())?;
            let ok = certs.iter().all(|c| c.holds);
            let table = certs
                .iter()
                .map(|c| {
                    format!(
                        "d={}: {} ({} pairings, {} nonzero)",
                        c.d,
                        if c.holds { "holds" } else { "fails" },
                        c.pairings.len(),
                        c.nonzero_pairings().count()
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            let json =
                json!({ "certificates": certs.iter().map(|c| c.to_json(*timing)).collect::<Vec<_>>(), "holds": ok });
            Ok(Outcome {
                json,
                table: format!("{table}\n"),
                ok,
            })
        }
        Command::Compare {
            which,
            problem,
            sampling,
        } => {
            let d = max_codim(problem)?;
            let cmp = match which {
                Which::Zvonkine => {
                    verify::compare_pixton_zvonkine(problem.g, &problem.a, problem.k, d, &sampling.policy())?
                }
                Which::Hain => {
                    if problem.k != 0 {
                        return Err(Error::InvalidInput("the compact-type comparison uses k = 0".into()));
                    }
                    verify::compare_hain(problem.g, &problem.a, d, &sampling.policy())?
                }
            };
            let table = format!(
                "{}: {}\n{}\n",
                cmp.name,
                if cmp.equal { "equal" } else { "DIFFERENT" },
                cmp.report.join("\n")
            );
            Ok(Outcome {
                json: cmp.to_json(),
                table,
                ok: cmp.equal,
            })
        }
        Command::Chiodo { problem, r, kind } => {
            let d = max_codim(problem)?;
            let kind = match kind {
                Kind::Zvonkine => ChernKind::Zvonkine,
                Kind::Chern => ChernKind::TotalChern,
            };
            match cohft::both_routes(kind, problem.g, &problem.a, problem.k, *r, d) {
                Ok(class) => {
                    let json = json!({ "routes_agree": true, "class": class.to_json() });
                    Ok(Outcome {
                        table: format!("routes agree\n{}", class_table(&json["class"])),
                        json,
                        ok: true,
                    })
                }
                Err(Error::MismatchBetweenConstructions(msg)) => Ok(Outcome {
                    json: json!({ "routes_agree": false, "detail": msg }),
                    table: format!("routes DISAGREE: {msg}\n"),
                    ok: false,
                }),
                Err(e) => Err(e),
            }
        }
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::UnstablePair { .. }
            | Error::InvalidInput(_)
            | Error::Parse(_)
            | Error::DimensionMismatch(_)
            | Error::TruncationTooSmall { .. }
            | Error::TooFewSamples { .. }
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j as usize).build_global() {
            eprintln!("error: cannot set up {j} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(path) = &cli.cache {
        if let Err(e) = intersect::cache().load(path) {
            eprintln!("error: cannot read cache {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }

    let result = run(&cli);

    if let Some(path) = &cli.cache {
        if let Err(e) = intersect::cache().persist(path) {
            eprintln!("warning: cannot write cache {}: {e}", path.display());
        }
    }

    match result {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable")),
                Format::Table => print!("{}", out.table),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::InconsistentSamples { .. } = e {
                eprintln!(
                    "hint: rerun with a larger --r-min (or more --oversample) to sample beyond the small-r region"
                );
            }
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
    }
}
