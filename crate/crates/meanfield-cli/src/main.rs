//! Batch front end: scans, Taylor tables, bound reports, tensor identities and the hierarchical oracle.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use meanfield::bounds::TargetId;

use commands::{BoundsArgs, FlowChoice, Output, ScanArgs};
use config::{pick, split_list, FileConfig, Settings};

#[derive(Parser, Debug)]
#[command(name = "meanfield", version, about = "Mean-field phi^4 moment flows and their bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON file with run parameters; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working precision in bits [default: 256].
    #[arg(long, global = true)]
    prec_bits: Option<u32>,
    /// Largest moment index [default: 24].
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Largest Taylor order [default: 24].
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Output CSV path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized targets [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// f_n(mu_max) of the massless flow on a grid of UV cutoffs.
    Scan {
        #[arg(long)]
        n_components: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        c02: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c04: Option<String>,
        /// Quartic coupling divided by N.
        #[arg(long)]
        large_n: bool,
        /// Comma-separated mu_max values.
        #[arg(long)]
        grid: Option<String>,
    },
    /// f~_n(mu_max~) of the massive flow with bare couplings fixed.
    ScanMassive {
        #[arg(long, allow_hyphen_values = true)]
        c02: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c04: Option<String>,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Taylor coefficient table of either flow.
    Table {
        #[arg(long, value_enum)]
        flow: Option<FlowKind>,
        #[arg(long = "f2-0", allow_hyphen_values = true)]
        f2_0: Option<String>,
        #[arg(long = "f4-0", allow_hyphen_values = true)]
        f4_0: Option<String>,
        #[arg(long)]
        n_components: Option<u32>,
        #[arg(long)]
        beta0: Option<String>,
    },
    /// Margin reports for one target or all of them.
    Bounds {
        /// Target name, or `all`.
        #[arg(long)]
        target: Option<String>,
        /// Full ranges for the exhaustive targets.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        n_components: Option<u32>,
        #[arg(long = "f2-0", allow_hyphen_values = true)]
        f2_0: Option<String>,
        #[arg(long = "f4-0", allow_hyphen_values = true)]
        f4_0: Option<String>,
        /// Comma-separated beta0 values for the massive targets.
        #[arg(long)]
        beta0: Option<String>,
    },
    /// Exact contraction identities of the pairing tensors.
    Tensors {
        /// Comma-separated component counts.
        #[arg(long)]
        components: Option<String>,
        /// Comma-separated even ranks.
        #[arg(long)]
        ranks: Option<String>,
    },
    /// Hierarchical-model equivalence with the moment flow.
    Oracle {
        #[arg(long)]
        components: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlowKind {
    Massless,
    Massive,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    split_list(s)
        .iter()
        .map(|t| t.parse().map_err(|_| format!("bad {what} entry {t:?}")))
        .collect()
}

fn run(cli: Cli) -> Result<Output, String> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let g = cli.global;
    let settings = Settings {
        prec: pick(g.prec_bits, file.prec_bits, 256),
        n_max: pick(g.n_max, file.n_max, 24),
        k_max: pick(g.k_max, file.k_max, 24),
        out: g.out.or(file.out.clone()),
        seed: pick(g.seed, file.seed, 0),
    };
    if !(meanfield::series::MIN_PREC..=1 << 20).contains(&settings.prec) {
        return Err(format!("--prec-bits out of range: {}", settings.prec));
    }
    let s = &settings;
    let real_or = |flag: Option<String>, file: &Option<String>, default: &str| s.real(&pick(flag, file.clone(), default.to_string()));
    let grid_or = |flag: Option<String>, default: &[&str]| -> Result<Vec<meanfield::ExtReal>, String> {
        let items = match flag {
            Some(f) => split_list(&f),
            None => file.grid.clone().unwrap_or_else(|| default.iter().map(|v| v.to_string()).collect()),
        };
        s.reals(&items)
    };
    let n_components = |flag: Option<u32>| pick(flag, file.n_components, 1);
    let beta0_list = |flag: Option<String>, default: &[&str]| -> Result<Vec<meanfield::ExtReal>, String> {
        let items = match flag {
            Some(f) => split_list(&f),
            None => file.beta0.clone().unwrap_or_else(|| default.iter().map(|v| v.to_string()).collect()),
        };
        s.reals(&items)
    };
    let components = |flag: Option<String>, default: &[u32]| -> Result<Vec<u32>, String> {
        match flag {
            Some(f) => parse_list(&f, "component"),
            None => Ok(file.component_list.clone().unwrap_or_else(|| default.to_vec())),
        }
    };
    match cli.command {
        Command::Scan { n_components: nc, c02, c04, large_n, grid } => {
            let args = ScanArgs {
                n_components: n_components(nc),
                c02: real_or(c02, &file.c02, "0")?,
                c04: real_or(c04, &file.c04, "1")?,
                large_n: large_n || file.large_n.unwrap_or(false),
                grid: grid_or(grid, &["10", "100", "1000", "10000"])?,
            };
            commands::scan(&args, s)
        }
        Command::ScanMassive { c02, c04, grid } => {
            let c02 = real_or(c02, &file.c02, "0")?;
            let c04 = real_or(c04, &file.c04, "1")?;
            commands::scan_massive(&c02, &c04, &grid_or(grid, &["10", "100", "1000"])?, s)
        }
        Command::Table { flow, f2_0, f4_0, n_components: nc, beta0 } => {
            let kind = match (flow, file.flow.as_deref()) {
                (Some(k), _) => k,
                (None, Some("massive")) => FlowKind::Massive,
                (None, Some("massless") | None) => FlowKind::Massless,
                (None, Some(other)) => return Err(format!("unknown flow {other:?}")),
            };
            let choice = match kind {
                FlowKind::Massless => FlowChoice::Massless { n_components: n_components(nc) },
                FlowKind::Massive => {
                    let b = beta0_list(beta0, &["0.5"])?;
                    FlowChoice::Massive { beta0: b.into_iter().next().ok_or("empty beta0 list")? }
                }
            };
            let f2 = real_or(f2_0, &file.f2_0, "0.1")?;
            let f4 = real_or(f4_0, &file.f4_0, "0.01")?;
            commands::table(&choice, &f2, &f4, s)
        }
        Command::Bounds { target, exhaustive, n_components: nc, f2_0, f4_0, beta0 } => {
            let name = pick(target, file.target.clone(), "all".to_string());
            let target = match name.as_str() {
                "all" => None,
                t => Some(TargetId::parse(t).ok_or_else(|| format!("unknown target {t:?}"))?),
            };
            let args = BoundsArgs {
                target,
                exhaustive: exhaustive || file.exhaustive.unwrap_or(false),
                n_components: n_components(nc),
                f2_0: real_or(f2_0, &file.f2_0, "0.1")?,
                f4_0: real_or(f4_0, &file.f4_0, "0.01")?,
                beta0: beta0_list(beta0, &["0.01", "0.0001", "0.5"])?,
            };
            commands::bounds(&args, s)
        }
        Command::Tensors { components: c, ranks } => {
            let ranks = match ranks {
                Some(r) => parse_list(&r, "rank")?,
                None => file.ranks.clone().unwrap_or_else(|| vec![2, 4, 6, 8]),
            };
            commands::tensors(&components(c, &[1, 2, 3, 4])?, &ranks, s)
        }
        Command::Oracle { components: c } => commands::oracle(&components(c, &[1, 2, 3])?, s),
    }
    .and_then(|out| {
        output::emit_csv(&out.header, &out.rows, s.out.as_deref())?;
        Ok(out)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) if out.all_pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
