mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use k3bps::invariants::{self, Convention};
use k3bps::mukai::{MukaiVector, NSLattice};
use k3bps::qseries::{Cutoff, Series};
use k3bps::rational::{self, Rational};
use k3bps::report::IdentityReport;
use k3bps::verify;
use k3bps::wallcross::{self, GvTable};

const MAX_Q: i64 = 40;
const MAX_T_DEGREE: u32 = 12;
const MAX_GENUS: u32 = 8;
const MAX_HILB: i64 = 5000;
const MAX_CASES: usize = 100_000;

#[derive(Parser)]
#[command(name = "k3bps", version, about = "Exact BPS tables and identity checks for K3 surfaces")]
#[command(args_override_self = true)]
struct Cli {
    /// `key = value` file mirroring long flags; command-line flags win.
    #[arg(long, value_name = "FILE", global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// χ(Hilb^n(S)) for n ≤ N.
    Hilb(HilbArgs),
    /// KKV table n_{g,h}.
    Kkv(KkvArgs),
    /// Multiple cover sum J(v).
    Multicover(MulticoverArgs),
    /// Gromov-Witten potential from a BPS table.
    GvResum(ResumArgs),
    /// r F(ru) for a potential F.
    GerbeRescale(RescaleArgs),
    /// Check an identity and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Half,
    Literal,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Half => Convention::Half,
            ConventionArg::Literal => Convention::Literal,
        }
    }
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HilbArgs {
    #[arg(long, allow_negative_numbers = true)]
    nmax: i64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct KkvArgs {
    #[arg(long, default_value_t = 0)]
    gmax: u32,
    #[arg(long)]
    hmax: u32,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct MulticoverArgs {
    /// JSON lattice `{"rank": n, "gram": [[..]]}` or a bare Gram matrix.
    #[arg(long, value_name = "FILE")]
    gram: PathBuf,
    /// Mukai vector `rk;l_1,..,l_n;s` with rational entries.
    #[arg(long, allow_hyphen_values = true)]
    v: String,
    #[arg(long, value_enum, default_value = "half")]
    convention: ConventionArg,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    /// KKV values read through β² = 2h − 2 on `--gram`.
    Kkv,
    /// Seeded random integers.
    Synthetic,
    /// JSON list of `{"g", "beta", "n"}` from `--table`.
    File,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum, default_value = "kkv")]
    source: Source,
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    gram: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    gmax: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    magnitude: i64,
    /// Comma-separated per-slot curve class bounds.
    #[arg(long, default_value = "4")]
    t_max: String,
}

#[derive(Args)]
struct ResumArgs {
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
    u_min: i64,
    #[arg(long, default_value_t = 6)]
    u_max: i64,
    #[arg(long, default_value_t = 0)]
    u_slope: i64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct RescaleArgs {
    /// Series JSON; when absent the potential is built as in `gv-resum`.
    #[arg(long, value_name = "FILE")]
    series: Option<PathBuf>,
    #[arg(long)]
    r: u32,
    #[command(flatten)]
    resum: ResumArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    PtBps,
    BehrendLog,
    Lemma46,
    GerbeRescale,
    Isometry,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    identity: Identity,
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, default_value_t = 6)]
    q_max: i64,
    #[arg(long, default_value_t = 6)]
    u_max: i64,
    #[arg(long, default_value_t = 3)]
    charges: usize,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long, value_enum, default_value = "half")]
    convention: ConventionArg,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

/// Exit status classes.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

type Outcome = Result<bool, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn domain(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Domain(e.into())
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(domain),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(domain)
}

fn read_lattice(path: &Path) -> Result<NSLattice, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    if let Ok(l) = serde_json::from_str::<NSLattice>(&text) {
        return Ok(l);
    }
    let gram: Vec<Vec<i64>> = serde_json::from_str(&text)
        .with_context(|| format!("{}: expected a lattice object or Gram matrix", path.display()))
        .map_err(usage)?;
    NSLattice::new(gram).map_err(usage)
}

fn lattice_or_default(path: Option<&PathBuf>) -> Result<NSLattice, Failure> {
    match path {
        Some(p) => read_lattice(p),
        None => Ok(NSLattice::rank_one(2)),
    }
}

fn parse_t_max(s: &str) -> Result<Vec<u32>, Failure> {
    let t: Vec<u32> = s
        .split(',')
        .map(|x| x.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("--t-max {s:?}: expected comma-separated integers"))
        .map_err(usage)?;
    if t.iter().sum::<u32>() > MAX_T_DEGREE {
        return Err(usage(anyhow!("--t-max exceeds the degree budget {MAX_T_DEGREE}")));
    }
    Ok(t)
}

fn parse_vector(s: &str) -> Result<MukaiVector, Failure> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != 3 {
        return Err(usage(anyhow!("--v {s:?}: expected rk;l_1,..,l_n;s")));
    }
    let num = |x: &str| rational::parse(x.trim()).map_err(|e| usage(anyhow!("--v: {}", e.0)));
    let l = parts[1]
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(num)
        .collect::<Result<Vec<Rational>, _>>()?;
    Ok(MukaiVector::new(num(parts[0])?, l, num(parts[2])?))
}

#[derive(Serialize, Deserialize)]
struct GvEntry {
    g: u32,
    beta: Vec<u32>,
    n: i64,
}

fn load_table(args: &TableArgs, t_max: &[u32]) -> Result<GvTable, Failure> {
    if args.gmax > MAX_GENUS {
        return Err(usage(anyhow!("--gmax exceeds the budget {MAX_GENUS}")));
    }
    match args.source {
        Source::Synthetic => Ok(wallcross::synthetic_gv_table(args.seed, args.gmax, t_max, args.magnitude)),
        Source::File => {
            let path = args.table.as_ref().ok_or_else(|| usage(anyhow!("--source file needs --table")))?;
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(usage)?;
            let entries: Vec<GvEntry> = serde_json::from_str(&text).map_err(usage)?;
            let mut out = GvTable::new();
            for e in entries {
                if e.beta.len() != t_max.len() {
                    return Err(usage(anyhow!("table class {:?} does not match --t-max", e.beta)));
                }
                out.insert((e.g, e.beta), e.n);
            }
            Ok(out)
        }
        Source::Kkv => {
            let lattice = lattice_or_default(args.gram.as_ref())?;
            if lattice.rank() != t_max.len() {
                return Err(usage(anyhow!("--t-max needs one entry per lattice generator")));
            }
            // largest h among classes in the box
            let mut h_max = 0i64;
            for beta in wallcross::curve_classes(t_max) {
                let b: Vec<i64> = beta.iter().map(|&x| x as i64).collect();
                h_max = h_max.max(lattice.dot_int(&b, &b) / 2 + 1);
            }
            if h_max > MAX_HILB {
                return Err(usage(anyhow!("classes in the box need h = {h_max}")));
            }
            let kkv = invariants::kkv_solve(args.gmax, h_max as u32).map_err(domain)?;
            invariants::gv_from_kkv(&kkv, &lattice, t_max).map_err(domain)
        }
    }
}

fn series_csv(s: &Series) -> String {
    let mut out = String::from("q,t,u,y2,c\n");
    for (m, c) in s.terms() {
        let t: Vec<String> = m.t.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{},{},{},{},{}", m.q, t.join(" "), m.u, m.y2, rational::format(c));
    }
    out
}

fn emit_series(s: &Series, out: &Output) -> Result<(), Failure> {
    let text = match out.format {
        Format::Json => to_json(s)?,
        Format::Csv => series_csv(s),
    };
    emit(&text, out.output.as_deref())
}

fn cmd_hilb(a: HilbArgs) -> Outcome {
    if a.nmax < 0 || a.nmax > MAX_HILB {
        return Err(usage(anyhow!("--nmax must lie in 0..={MAX_HILB}")));
    }
    let h = invariants::hilb_euler_series(a.nmax as u32);
    let text = match a.out.format {
        Format::Json => to_json(&h)?,
        Format::Csv => {
            let mut s = String::from("n,chi\n");
            for (n, c) in h.coefficients().iter().enumerate() {
                let _ = writeln!(s, "{n},{c}");
            }
            s
        }
    };
    emit(&text, a.out.output.as_deref())?;
    Ok(true)
}

fn cmd_kkv(a: KkvArgs) -> Outcome {
    if a.hmax as i64 > MAX_HILB || a.gmax > a.hmax.max(MAX_GENUS) {
        return Err(usage(anyhow!("--gmax/--hmax exceed the compute budget")));
    }
    let t = invariants::kkv_solve(a.gmax, a.hmax).map_err(domain)?;
    let text = match a.out.format {
        Format::Json => to_json(&t)?,
        Format::Csv => t.to_csv(),
    };
    emit(&text, a.out.output.as_deref())?;
    Ok(true)
}

fn cmd_multicover(a: MulticoverArgs) -> Outcome {
    let lattice = read_lattice(&a.gram)?;
    let v = parse_vector(&a.v)?;
    if v.l.len() != lattice.rank() {
        return Err(usage(anyhow!("--v has {} divisor entries, lattice rank {}", v.l.len(), lattice.rank())));
    }
    let convention = Convention::from(a.convention);
    v.divisibility().map_err(domain)?;
    let vv = k3bps::mukai::pairing(&v, &v, &lattice).map_err(domain)?;
    let vv = rational::as_integer(&vv).ok_or_else(|| domain(anyhow!("non-integral self-pairing")))?;
    let e = convention.exponent(&vv).map_err(domain)?;
    if e > MAX_HILB {
        return Err(usage(anyhow!("χ(Hilb^{e}) exceeds the compute budget")));
    }
    let hilb = invariants::hilb_euler_series(e.max(1) as u32);
    let j = invariants::multiple_cover_j(&v, &lattice, &hilb, convention).map_err(domain)?;
    let json = serde_json::json!({
        "v": v,
        "convention": convention,
        "J": rational::format(&j),
    });
    emit(&to_json(&json)?, a.output.as_deref())?;
    Ok(true)
}

fn resum_cutoff(a: &ResumArgs) -> Result<Cutoff, Failure> {
    let t_max = parse_t_max(&a.table.t_max)?;
    if a.u_max < a.u_min || a.u_max > MAX_Q {
        return Err(usage(anyhow!("need u-min <= u-max <= {MAX_Q}")));
    }
    Ok(Cutoff::power_series(0, t_max)
        .with_u(a.u_min, a.u_max)
        .with_u_slope(a.u_slope))
}

fn resum(a: &ResumArgs) -> Result<Series, Failure> {
    let cutoff = resum_cutoff(a)?;
    let bps = load_table(&a.table, &cutoff.t_max)?;
    wallcross::gv_resummation(&bps, &cutoff).map_err(domain)
}

fn cmd_gv_resum(a: ResumArgs) -> Outcome {
    let f = resum(&a)?;
    emit_series(&f, &a.out)?;
    Ok(true)
}

fn cmd_gerbe_rescale(a: RescaleArgs) -> Outcome {
    if a.r == 0 {
        return Err(usage(anyhow!("--r must be positive")));
    }
    let f = match &a.series {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(usage)?;
            serde_json::from_str::<Series>(&text).map_err(usage)?
        }
        None => resum(&a.resum)?,
    };
    let g = wallcross::gerbe_rescale(&f, a.r).map_err(domain)?;
    emit_series(&g, &a.resum.out)?;
    Ok(true)
}

fn cases(a: &VerifyArgs, default: usize) -> Result<usize, Failure> {
    let n = a.count.unwrap_or(default);
    if n == 0 || n > MAX_CASES {
        return Err(usage(anyhow!("--count must lie in 1..={MAX_CASES}")));
    }
    Ok(n)
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    if a.q_max < 0 || a.q_max > MAX_Q || a.u_max < 0 || a.u_max > MAX_Q {
        return Err(usage(anyhow!("--q-max/--u-max must lie in 0..={MAX_Q}")));
    }
    let t_max = parse_t_max(&a.table.t_max)?;
    let report: IdentityReport = match a.identity {
        Identity::PtBps => {
            let bps = load_table(&a.table, &t_max)?;
            let g_max = bps.keys().map(|(g, _)| *g).max().unwrap_or(0).max(a.table.gmax);
            let cutoff = wallcross::pipeline_cutoff(g_max, t_max, a.q_max);
            verify::pt_bps(&bps, &cutoff).map_err(domain)?
        }
        Identity::BehrendLog => {
            let cutoff = Cutoff::power_series(a.q_max, t_max);
            verify::behrend_log(a.table.seed, a.charges, &cutoff).map_err(domain)?
        }
        Identity::Lemma46 => {
            let lattice = lattice_or_default(a.table.gram.as_ref())?;
            verify::lemma46(a.table.seed, cases(&a, 100)?, &lattice).map_err(domain)?
        }
        Identity::GerbeRescale => {
            if a.r == 0 || a.table.gmax > MAX_GENUS {
                return Err(usage(anyhow!("need --r >= 1 and --gmax <= {MAX_GENUS}")));
            }
            let cutoff = verify::gerbe_cutoff(a.u_max, t_max);
            verify::gerbe(a.table.seed, a.r, a.table.gmax, &cutoff).map_err(domain)?
        }
        Identity::Isometry => {
            let lattice = lattice_or_default(a.table.gram.as_ref())?;
            let hilb = invariants::hilb_euler_series(60);
            let n = cases(&a, 50)?;
            verify::isometry(a.table.seed, n, &lattice, &hilb, a.convention.into()).map_err(domain)?
        }
    };
    emit(&to_json(&report)?, a.output.as_deref())?;
    Ok(report.pass)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("K3BPS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| usage(anyhow!("K3BPS_THREADS={raw:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(domain)
}

fn run() -> Outcome {
    let args = config::apply(std::env::args().collect()).map_err(usage)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if code == 0 {
                return Ok(true);
            }
            return Err(Failure::Usage(anyhow!("invalid arguments")));
        }
    };
    debug_assert!(cli.config.is_none(), "config is spliced before parsing");
    configure_threads()?;
    match cli.command {
        Command::Hilb(a) => cmd_hilb(a),
        Command::Kkv(a) => cmd_kkv(a),
        Command::Multicover(a) => cmd_multicover(a),
        Command::GvResum(a) => cmd_gv_resum(a),
        Command::GerbeRescale(a) => cmd_gerbe_rescale(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
