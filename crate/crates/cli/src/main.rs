//! `maxgrowth`: build and inspect core automata, run surgeries, and
//! measure growth of acts and modules.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "maxgrowth", version, about = "Growth of coset graphs, acts and modules over free monoids and groups")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the machine-readable artifact here; a summary goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format. Defaults to text on stdout and json for --out.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Core automata of finitely generated subgroups.
    #[command(subcommand)]
    Core(CoreCmd),
    /// Coset growth of a subgroup.
    #[command(subcommand)]
    Growth(GrowthCmd),
    /// Graph surgeries that enlarge a subgroup.
    #[command(subcommand)]
    Surgery(SurgeryCmd),
    /// Right acts of the free monoid.
    #[command(subcommand)]
    Act(ActCmd),
    /// Modules over free associative algebras.
    #[command(subcommand)]
    Module(ModuleCmd),
    /// Word utilities.
    #[command(subcommand)]
    Words(WordsCmd),
}

#[derive(Subcommand, Debug)]
pub enum CoreCmd {
    /// Folds generator words into a core automaton.
    Build {
        /// A generator word such as "a b A" or "[1,2,-1]"; repeatable.
        #[arg(short = 'g', long = "gen", required = true)]
        gens: Vec<String>,
        #[arg(short, long, default_value_t = 2)]
        r: u32,
    },
    /// Vertex count, rank, index and deficit.
    Info { core: PathBuf },
    /// A free basis read off a spanning tree.
    Basis { core: PathBuf },
    /// The deficit and its per-vertex contributions.
    Deficit { core: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum GrowthCmd {
    /// Ball sizes of the coset graph up to radius N.
    Series {
        core: PathBuf,
        #[arg(short = 'N', long = "radius", default_value_t = 10)]
        n: usize,
    },
    /// Decides maximal growth and prints the certificate.
    Classify {
        core: PathBuf,
        #[arg(short = 'N', long = "radius", default_value_t = 12)]
        n: usize,
    },
    /// Upper bounds on the boundary measure of geodesic rays.
    Measure {
        core: PathBuf,
        #[arg(short = 'N', long = "radius", default_value_t = 10)]
        n: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum AttachKind {
    Cycle,
    Leg,
    Arc,
}

#[derive(Subcommand, Debug)]
pub enum SurgeryCmd {
    /// Attaches a cycle, a cycle with a leg, or an arc.
    Attach {
        core: PathBuf,
        #[arg(long, value_enum)]
        kind: AttachKind,
        #[arg(long)]
        at: usize,
        #[arg(long)]
        label: String,
        /// Leg label for `--kind leg`.
        #[arg(long)]
        leg: Option<String>,
        /// End vertex for `--kind arc`.
        #[arg(long)]
        to: Option<usize>,
    },
    /// Adds a power of g to the subgroup, losing at most epsilon deficit.
    AdjoinPower {
        core: PathBuf,
        #[arg(short = 'g', long = "word")]
        g: String,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
    },
    /// Finds b and a larger subgroup with H g_i b = H g'_i.
    Link {
        core: PathBuf,
        #[arg(long = "from", required = true)]
        from: Vec<String>,
        #[arg(long = "to", required = true)]
        to: Vec<String>,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
    },
    /// Runs a plan of power and link requests; the log is JSON lines.
    Tower {
        core: PathBuf,
        /// JSON array of {"power": word} and {"link": {"from": [...], "to": [...]}}.
        #[arg(long)]
        plan: PathBuf,
    },
    /// Ball sizes of a tree-like coset graph in two bases.
    BasisChange {
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value = "1/8")]
        epsilon: String,
        #[arg(short, long, default_value_t = 8)]
        l: usize,
        #[arg(long, default_value_t = 14)]
        depth: usize,
        #[arg(long)]
        cut: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ActCmd {
    /// A cyclic act whose sphere sizes are the given sequence.
    Prescribed {
        /// Sphere sizes d_0, d_1, ... separated by commas.
        #[arg(short, long)]
        d: String,
        #[arg(short, long, default_value_t = 2)]
        r: u32,
    },
    /// The k-transitive act: growth and transitivity witnesses.
    Ktrans {
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        /// Number of enumerated tuples.
        #[arg(long, default_value_t = 50_000)]
        budget: usize,
        #[arg(short = 'N', long = "radius", default_value_t = 12)]
        n: usize,
        /// Verify witnesses of tuples with k and entry lengths up to these.
        #[arg(long, default_value_t = 2)]
        check_k: usize,
        #[arg(long, default_value_t = 1)]
        check_len: usize,
        /// Emit the tuple plan instead of the series.
        #[arg(long)]
        plan: bool,
    },
    /// Ball sizes of an act given by a transition table.
    Growth {
        act: PathBuf,
        #[arg(short = 'N', long = "radius", default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1 << 22)]
        budget: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ModuleCmd {
    /// Ball dimensions of a module given by rule tables.
    Growth {
        module: PathBuf,
        #[arg(short = 'N', long = "radius", default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1 << 20)]
        budget: usize,
    },
    /// Co-growth of a submodule of a free module.
    Cogrowth {
        /// JSON array of {"gen": i, "poly": [["coef", "word"], ...]}.
        sub: PathBuf,
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        /// Rank of the free module.
        #[arg(short, long, default_value_t = 1)]
        s: usize,
        #[arg(short = 'N', long = "radius", default_value_t = 8)]
        n: usize,
    },
    /// The extension and no-nil example modules.
    Example {
        #[arg(long, default_value = "extension")]
        kind: String,
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        /// Increasing sequence d_1, d_2, ... separated by commas.
        #[arg(short, long)]
        d: String,
        #[arg(short = 'N', long = "radius", default_value_t = 10)]
        n: usize,
        /// Radius for the submodule N.
        #[arg(long, default_value_t = 0)]
        n_sub: usize,
        /// Exponent of the nil relation (no-nil example).
        #[arg(short, long, default_value_t = 0)]
        m: u64,
        #[arg(long, default_value_t = 1 << 22)]
        budget: usize,
    },
    /// One nil step: chooses q and measures the quotient.
    NilStep {
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        /// JSON array of homogeneous relation polynomials.
        #[arg(long)]
        relations: Option<PathBuf>,
        #[arg(long = "big-c", default_value = "1")]
        big_c: String,
        #[arg(long, default_value = "1/2")]
        c: String,
        /// b = a·u.
        #[arg(short, long, default_value = "")]
        u: String,
        /// A degree-one-or-more element v_i as a JSON polynomial or a word; repeatable.
        #[arg(short, long = "v", required = true)]
        vs: Vec<String>,
        #[arg(short = 'N', long = "radius", default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// The quasi-monomial module with prescribed degrees.
    T991 {
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        /// Alpha as JSON {"affine": ...} or {"table": ...}; default α_{j,i} = i.
        #[arg(long)]
        alpha: Option<String>,
        /// d_i = i + shift.
        #[arg(long, default_value_t = 1)]
        d_shift: usize,
        /// Explicit d_1, d_2, ... separated by commas; overrides --d-shift.
        #[arg(long)]
        d_list: Option<String>,
        #[arg(short = 'N', long = "radius", default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        oracle_max: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Mode {
    Monoid,
    Group,
}

#[derive(Subcommand, Debug)]
pub enum WordsCmd {
    /// Counts words of each length avoiding u as a factor.
    Avoid {
        #[arg(short, long)]
        u: String,
        #[arg(short = 'N', long = "radius", default_value_t = 12)]
        n: usize,
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        #[arg(long, value_enum, default_value_t = Mode::Monoid)]
        mode: Mode,
    },
    /// Applies a1 -> a1, a2 -> a1 a2 (or its inverse).
    Nielsen {
        #[arg(short, long)]
        w: String,
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        #[arg(long)]
        inverse: bool,
    },
    /// Frequency-window membership and the Nielsen stretch.
    Zcheck {
        /// Check this word; otherwise sample random reduced words.
        #[arg(short, long)]
        w: Option<String>,
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value = "1/100")]
        epsilon: String,
        /// Window start; calibrated from the samples when omitted.
        #[arg(short, long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        length: usize,
    },
    /// Letter frequencies of random reduced words.
    Stats {
        #[arg(short, long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 10_000)]
        length: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value = "1/50")]
        tol: String,
    },
}

/// What a command produces: the artifact in each format it supports and
/// a human summary.
pub struct Output {
    pub json: String,
    pub csv: Option<String>,
    pub text: String,
}

fn emit(global: &Global, out: Output) -> anyhow::Result<()> {
    let pick = |f: Format| -> anyhow::Result<String> {
        Ok(match f {
            Format::Json => out.json.clone(),
            Format::Text => out.text.clone(),
            Format::Csv => {
                out.csv.clone().ok_or_else(|| commands::usage("this command has no csv output"))?
            }
        })
    };
    let body = |s: String| if s.ends_with('\n') { s } else { s + "\n" };
    match &global.out {
        Some(path) => {
            let text = pick(global.format.unwrap_or(Format::Json))?;
            std::fs::write(path, body(text))?;
            print!("{}", body(out.text.clone()));
        }
        None => print!("{}", body(pick(global.format.unwrap_or(Format::Text))?)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match commands::run(&cli.global, cli.command).and_then(|o| emit(&cli.global, o)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {line}");
            ExitCode::from(if commands::is_contract_violation(&e) { 2 } else { 1 })
        }
    }
}
