use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use starc_core::circuit::{OptimizeConfig, EXT_SYNTH_ENV};
use starc_core::experiments::{
    analyze, audit_rows, plot_csv, run_enumerate, run_er, write_enumerate, write_rows, AnalyzeConfig, EnumerateConfig,
    ErConfig,
};
use starc_core::rpn::{find_witness, EnumOptions, FindOutcome, RpnProgram};
use starc_core::{EdgeSet, GraphUniverse};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_TRUNCATED: u8 = 3;

/// Star complexity experiments.
#[derive(Parser, Debug)]
#[command(name = "starc", version, about)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct OptArgs {
    /// Optimizer round limit.
    #[arg(long, default_value_t = 100)]
    max_rounds: usize,
    /// External synthesis command; `{in}` is replaced by the netlist path.
    #[arg(long, env = EXT_SYNTH_ENV)]
    ext_synth: Option<String>,
}

impl OptArgs {
    fn config(&self) -> OptimizeConfig {
        OptimizeConfig {
            max_rounds: self.max_rounds,
            external_command: self.ext_synth.clone(),
            ..OptimizeConfig::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Walk all RPN programs and tabulate exact, optimized and greedy values.
    Enumerate {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        s_max: usize,
        /// Output directory for tables, class store and summary.
        #[arg(long, default_value = "enumerate-out")]
        out: PathBuf,
        /// Stop after this many programs; tables are marked partial.
        #[arg(long)]
        truncate_budget: Option<u64>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Random-graph experiment, one CSV row per graph.
    Er {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0.02)]
        p_min: f64,
        #[arg(long, default_value_t = 0.98)]
        p_max: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "er.csv")]
        out: PathBuf,
        /// Also run the exact search (n <= 16 only).
        #[arg(long)]
        exact_max_ops: Option<usize>,
        #[arg(long)]
        truncate_budget: Option<u64>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Scatter plot of CSV columns as SVG.
    Plot {
        csv: PathBuf,
        #[arg(long, default_value = "c_bits")]
        x: String,
        #[arg(long, value_delimiter = ',', default_value = "star_greedy,star_opt")]
        y: Vec<String>,
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
    /// Report every measure for one edge-list file.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        exact_max_ops: Option<usize>,
        #[arg(long)]
        truncate_budget: Option<u64>,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Stack-machine utilities.
    Rpn {
        #[command(subcommand)]
        cmd: RpnCmd,
    },
}

#[derive(Subcommand, Debug)]
enum RpnCmd {
    /// Evaluate a program and print the edges of its value.
    Eval {
        program: String,
        #[arg(long)]
        n: usize,
    },
    /// Search for a minimal program denoting the graph in an edge-list file.
    Find {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_ops: usize,
        #[arg(long)]
        truncate_budget: Option<u64>,
    },
}

fn read_graph(path: &Path) -> Result<EdgeSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    EdgeSet::from_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Returns the exit code for a run that produced output.
fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Enumerate {
            n,
            s_max,
            out,
            truncate_budget,
            opt,
        } => {
            let report = run_enumerate(&EnumerateConfig {
                n,
                s_max,
                budget: truncate_budget,
                optimize: opt.config(),
            })?;
            write_enumerate(&report, &out)?;
            for (s, c) in report.level_counts.iter().enumerate() {
                println!("s={s}: {c}");
            }
            println!("classes: {}", report.records.len());
            println!("marginals consistent: {}", report.marginals_consistent);
            println!("chain violations: {}", report.chain_violations);
            for note in &report.notes {
                println!("note: {note}");
            }
            println!("wrote {}", out.display());
            if report.chain_violations > 0 || !report.marginals_consistent {
                bail!("enumeration audit failed");
            }
            Ok(if report.truncated { EXIT_TRUNCATED } else { 0 })
        }
        Cmd::Er {
            n,
            count,
            p_min,
            p_max,
            seed,
            out,
            exact_max_ops,
            truncate_budget,
            opt,
        } => {
            let cfg = ErConfig {
                n,
                count,
                p_min,
                p_max,
                seed,
                optimize: opt.config(),
                exact_max_ops,
                exact_budget: truncate_budget,
            };
            let rows = run_er(&cfg)?;
            write_rows(&rows, &out)?;
            let written = starc_core::experiments::read_rows(&out)?;
            let violations = audit_rows(&written);
            for v in &violations {
                eprintln!("audit: {v}");
            }
            if opt.ext_synth.is_some() {
                let missing = rows.iter().filter(|r| r.star_ext.is_none()).count();
                if missing > 0 {
                    eprintln!("external tool gave no count for {missing} of {} graphs", rows.len());
                }
            }
            println!("wrote {} rows to {}", rows.len(), out.display());
            if !violations.is_empty() {
                bail!("{} inequality violations", violations.len());
            }
            Ok(0)
        }
        Cmd::Plot { csv, x, y, out } => {
            let svg = plot_csv(&csv, &x, &y)?;
            fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Cmd::Analyze {
            file,
            exact_max_ops,
            truncate_budget,
            json,
            out,
            opt,
        } => {
            let g = read_graph(&file)?;
            let report = analyze(
                &g,
                &AnalyzeConfig {
                    optimize: opt.config(),
                    exact_max_ops,
                    budget: truncate_budget,
                },
            )?;
            let text = if json {
                serde_json::to_string_pretty(&report)? + "\n"
            } else {
                report.to_text()
            };
            write_out(out.as_deref(), &text)?;
            let over = report
                .exact_note
                .as_deref()
                .is_some_and(|n| n.starts_with("budget exceeded"));
            Ok(if over { EXIT_TRUNCATED } else { 0 })
        }
        Cmd::Rpn { cmd } => match cmd {
            RpnCmd::Eval { program, n } => {
                let prog: RpnProgram = program.parse()?;
                let u = GraphUniverse::new(n)?;
                let g = prog.eval(&u)?;
                for (i, j) in g.edges() {
                    println!("{i} {j}");
                }
                Ok(0)
            }
            RpnCmd::Find {
                file,
                max_ops,
                truncate_budget,
            } => {
                let g = read_graph(&file)?;
                match find_witness(&g, max_ops, truncate_budget, EnumOptions::default())? {
                    FindOutcome::Found { program, ops } => {
                        println!("{program}");
                        println!("ops: {ops}");
                        Ok(0)
                    }
                    FindOutcome::NotFound => {
                        println!("not found within budget (max {max_ops} ops)");
                        Ok(0)
                    }
                    FindOutcome::BudgetExceeded { visited } => {
                        println!("not found within budget ({visited} programs visited)");
                        Ok(EXIT_TRUNCATED)
                    }
                }
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
