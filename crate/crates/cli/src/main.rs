use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use qiso::search::Mode;
use qiso::subspace::DEFAULT_CAP;
use qiso_cli::{
    cmd_audit, cmd_bound, cmd_construct, cmd_matching, cmd_search, cmd_table, cmd_verify, Common, RunReport,
    SearchOptions, Suite,
};

#[derive(Parser)]
#[command(name = "qiso", version, about = "Diameter-bounded families of subspaces over small finite fields")]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of subspaces any command may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Worker threads for parallel operations.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Greedy,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian binomial table as CSV.
    Table {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        nmax: usize,
    },
    /// Run property suites exhaustively at (q, n).
    Verify {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Largest size of a diameter-d family and the regime of (n, d).
    Bound {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Exact re-computation of the layer inequalities (d >= 4, n > 2d).
    Audit {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Search for a maximum family of diameter at most d.
    Search {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Branch-and-bound nodes per dimension window.
        #[arg(long)]
        node_budget: Option<u64>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        time_budget: Option<f64>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Nodes between checkpoint writes.
        #[arg(long)]
        checkpoint_interval: Option<u64>,
        /// Continue from --checkpoint if it exists.
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        /// Family file to start from.
        #[arg(long)]
        seed_family: Option<PathBuf>,
        /// Write the best family to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the extremal family (ball for even d, ball plus star for odd d).
    Construct {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Star centre for odd d, as base-q digits (default e1).
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perfect matching between k-spaces and complementary (n-k)-spaces.
    Matching {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

fn dispatch(cli: &Cli) -> anyhow::Result<RunReport> {
    let common = Common {
        cap: cli.cap,
        workers: cli.workers.max(1),
    };
    match &cli.command {
        Command::Table { q, nmax } => cmd_table(*q, *nmax, common),
        Command::Verify { q, n, suite } => cmd_verify(*q, *n, *suite, common),
        Command::Bound { q, n, d } => cmd_bound(*q, *n, *d, common),
        Command::Audit { q, n, d } => cmd_audit(*q, *n, *d, common),
        Command::Search {
            q,
            n,
            d,
            mode,
            node_budget,
            time_budget,
            checkpoint,
            checkpoint_interval,
            resume,
            seed_family,
            out,
        } => {
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Greedy => Mode::Greedy,
            };
            let stop = Arc::new(AtomicBool::new(false));
            let flag = stop.clone();
            ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed))?;
            let opts = SearchOptions {
                node_budget: *node_budget,
                time_budget: *time_budget,
                checkpoint: checkpoint.clone(),
                checkpoint_interval: *checkpoint_interval,
                resume: *resume,
                seed_family: seed_family.clone(),
                out: out.clone(),
                stop: Some(stop),
                ..SearchOptions::new(*q, *n, *d, mode)
            };
            cmd_search(&opts, common)
        }
        Command::Construct { q, n, d, x, out } => cmd_construct(*q, *n, *d, x.as_deref(), out.as_ref(), common),
        Command::Matching { q, n, k } => cmd_matching(*q, *n, *k, common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else if let Some(out) = &report.output {
                print!("{out}");
                eprint!("{}", report.summary());
            } else {
                print!("{}", report.summary());
            }
            ExitCode::from(report.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
