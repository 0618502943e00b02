use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use domainminer::encode::wcnf::{write_wcnf, Wcnf};
use domainminer::encode::{self, Encoding, EncodingConfig};
use domainminer::reductions::{self, UndirectedGraph};
use domainminer::solve::{self, Backend, Status};
use domainminer::{benchgen, dte, eval, oracle, summary, Error, PartialMatrix};

#[derive(Parser)]
#[command(name = "domainminer", version, about = "Mine domain-based access-control policies from access matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal domain policy of a complete matrix.
    Summarize {
        matrix: PathBuf,
    },
    /// Minimum-domain policy of a partial matrix via MaxSAT.
    Mine {
        matrix: PathBuf,
        /// Class budget; defaults to the better of the all-0 and all-1 fills.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value = "BE+NF+MD+LI")]
        encoding: Encoding,
        /// `builtin`, or a command that takes a WCNF path.
        #[arg(long, default_value = "builtin")]
        solver: String,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        /// Also write the chosen instantiation as a matrix file.
        #[arg(long)]
        instantiation: Option<PathBuf>,
    },
    /// Write the MaxSAT encoding as WCNF.
    Encode {
        matrix: PathBuf,
        #[arg(long, default_value = "BE")]
        encoding: Encoding,
        #[arg(long)]
        m: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Domain-and-type policy of a complete matrix.
    Dte {
        matrix: PathBuf,
    },
    /// Build a reduction instance.
    Reduce {
        #[arg(long, value_enum)]
        from: Reduction,
        /// Graph file (`g <n>` / `e <u> <v>`) or, for db-dtepm, a matrix.
        input: PathBuf,
        /// Budget of the DB instance (db-dtepm only).
        #[arg(long)]
        m: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Exact optimum (or bounded decision with --m) by exhaustive search.
    Oracle {
        #[arg(long, value_enum)]
        problem: Problem,
        matrix: PathBuf,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Generate a seeded benchmark suite with a manifest.
    GenBench {
        #[arg(long, value_delimiter = ',', default_values_t = [2, 3])]
        m_star: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [20, 40, 60])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        per_cell: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve a manifest under several encodings; write CSV reports.
    Eval {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "BE,BE+NF+MD+LI")]
        encodings: Vec<Encoding>,
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "builtin")]
        solver: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve a WCNF file with the built-in solver (unit soft weights).
    Maxsat {
        wcnf: PathBuf,
        #[arg(long)]
        timeout: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Reduction {
    #[value(name = "3col-dbpm")]
    ThreeColDbpm,
    #[value(name = "3col-db")]
    ThreeColDb,
    #[value(name = "db-dtepm")]
    DbDtepm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Dbpm,
    Db,
    Dtepm,
}

fn backend(solver: &str) -> Backend {
    if solver == "builtin" {
        Backend::Builtin
    } else {
        Backend::External(solver.to_string())
    }
}

fn seconds(t: Option<f64>) -> anyhow::Result<Option<Duration>> {
    t.map(|s| Duration::try_from_secs_f64(s).with_context(|| format!("invalid timeout {s}"))).transpose()
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn read(path: &Path) -> anyhow::Result<PartialMatrix> {
    Ok(PartialMatrix::read(path)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Summarize { matrix } => {
            let g = read(&matrix)?.to_digraph()?;
            let (policy, _) = summary::summarize(&g);
            print(&serde_json::to_value(policy.to_doc())?);
        }
        Command::Mine { matrix, m, encoding, solver, timeout, instantiation } => {
            let psm = read(&matrix)?;
            let found = solve::mine(&psm, encoding, m, &backend(&solver), seconds(timeout)?)?;
            if let Some(path) = instantiation {
                PartialMatrix::from_digraph(&found.instantiation).write(path)?;
            }
            let mut v = serde_json::to_value(found.policy.to_doc())?;
            v["objective"] = json!(found.objective);
            v["m"] = json!(found.m);
            print(&v);
        }
        Command::Encode { matrix, encoding, m, output } => {
            let psm = read(&matrix)?;
            let m = m.unwrap_or_else(|| encode::default_budget(&psm));
            let inst = encode::encode(&psm, EncodingConfig::new(encoding, m)?)?;
            write_wcnf(&inst, &output)?;
            print(&json!({
                "variables": inst.var_count(),
                "hard": inst.hard.len(),
                "soft": inst.soft.len(),
                "m": m,
            }));
        }
        Command::Dte { matrix } => {
            let g = read(&matrix)?.to_digraph()?;
            print(&serde_json::to_value(dte::mine_dte(&g).to_doc())?);
        }
        Command::Reduce { from, input, m, output } => {
            let (budget, psm) = match from {
                Reduction::ThreeColDbpm => reductions::three_color_to_dbpm(&UndirectedGraph::read(&input)?)?,
                Reduction::ThreeColDb => reductions::three_color_to_db(&UndirectedGraph::read(&input)?)?,
                Reduction::DbDtepm => {
                    let Some(m) = m else { bail!(Error::Config("db-dtepm needs --m".into())) };
                    reductions::db_to_dtepm(m, &read(&input)?)?
                }
            };
            psm.write(&output)?;
            print(&json!({ "m": budget, "entities": psm.n(), "rights": psm.k() }));
        }
        Command::Oracle { problem, matrix, m } => {
            let psm = read(&matrix)?;
            let v = match (problem, m) {
                (Problem::Dbpm, None) => json!({ "optimum": oracle::dbpm_optimum(&psm)? }),
                (Problem::Db, None) => json!({ "optimum": oracle::db_optimum(&psm)? }),
                (Problem::Dtepm, None) => json!({ "optimum": oracle::dtepm_optimum(&psm)? }),
                (Problem::Dbpm, Some(m)) => json!({ "m": m, "feasible": oracle::dbpm_feasible(&psm, m) }),
                (Problem::Db, Some(m)) => json!({ "m": m, "feasible": oracle::db_feasible(&psm, m) }),
                (Problem::Dtepm, Some(m)) => json!({ "m": m, "feasible": oracle::dtepm_optimum(&psm)? <= m }),
            };
            print(&v);
        }
        Command::GenBench { m_star, n, per_cell, seed, output } => {
            let instances = benchgen::suite(&m_star, &n, per_cell, seed)?;
            let manifest = benchgen::write_suite(&instances, &output)?;
            print(&json!({ "instances": instances.len(), "manifest": manifest }));
        }
        Command::Eval { manifest, encodings, timeout, workers, solver, output } => {
            let jobs = eval::load_jobs(&manifest)?;
            let opts = eval::EvalOptions {
                encodings,
                timeout: seconds(Some(timeout))?.expect("timeout given"),
                workers,
                backend: backend(&solver),
            };
            let reports = eval::run(&jobs, &opts)?;
            std::fs::create_dir_all(&output).with_context(|| output.display().to_string())?;
            for r in &reports {
                eval::write_outcomes(&r.outcomes, output.join(format!("{}.csv", r.encoding)))?;
            }
            eval::write_summary(&reports, output.join("summary.csv"))?;
            eval::write_cactus(&reports, output.join("cactus.csv"))?;
            println!("{:<14} {:>7} {:>10}", "encoding", "solved", "seconds");
            for r in &reports {
                let s = eval::summarize(&r.outcomes);
                println!("{:<14} {:>3}/{:<3} {:>10.2}", r.encoding.to_string(), s.solved, s.total, s.seconds);
            }
        }
        Command::Maxsat { wcnf, timeout } => {
            let text = std::fs::read_to_string(&wcnf).with_context(|| wcnf.display().to_string())?;
            let w = Wcnf::parse(&text, &wcnf.display().to_string())?;
            if let Some((weight, _)) = w.soft.iter().find(|(weight, _)| *weight != 1) {
                bail!(Error::Config(format!("only unit soft weights are supported, found {weight}")));
            }
            let soft: Vec<_> = w.soft.into_iter().map(|(_, c)| c).collect();
            let res = solve::maxsat(w.var_count, &w.hard, &soft, seconds(timeout)?);
            match res.status {
                Status::Optimal => {
                    let objective = res.objective.expect("optimal result has an objective");
                    println!("o {}", soft.len() - objective);
                    println!("s OPTIMUM FOUND");
                    let model = res.assignment.expect("optimal result has a model");
                    let lits: Vec<String> = model
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                        .collect();
                    println!("v {} 0", lits.join(" "));
                }
                Status::Infeasible => println!("s UNSATISFIABLE"),
                Status::Timeout => {
                    println!("s UNKNOWN");
                    bail!(Error::Timeout { seconds: res.stats.seconds });
                }
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible { .. }) => 2,
        Some(Error::Timeout { .. }) => 3,
        Some(Error::Config(_)) => 64,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
