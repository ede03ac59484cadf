//! `pairinv`: batch front end for mining, verification and bookkeeping.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 unfilled deficit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pairinv::bracket::{bracket_cache, memoized_bracket, Interpretation};
use pairinv::hilbert;
use pairinv::maps::{self, Variety};
use pairinv::miner::{self, relfile, MineConfig, MineOutput, RelationIdeal};
use pairinv::necklace::Necklace;
use pairinv::numeric::{eval_genpoly, verify_identity, SamplerConfig, SamplerKind, Verdict};
use pairinv::ring::{generator_set, MonomialOrder, OrderKind};
use pairinv::Error;

const CACHE_ENV: &str = "PAIRINV_CACHE_DIR";
const CACHE_FILE: &str = "brackets-v1.txt";

#[derive(Parser)]
#[command(name = "pairinv", version, about = "Trace invariants of pairs of matrices")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Grevlex,
    Custom,
}

impl From<OrderArg> for OrderKind {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Grevlex => OrderKind::Grevlex,
            OrderArg::Custom => OrderKind::Custom,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Generic,
    Traceless,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Com,
    Cm,
}

#[derive(clap::Args)]
struct MineArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    max_degree: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "grevlex")]
    order: OrderArg,
}

impl MineArgs {
    fn config(&self) -> MineConfig {
        MineConfig {
            seed: self.seed,
            order: self.order.into(),
            ..Default::default()
        }
    }

    fn run_config(&self) -> String {
        format!(
            "n={} max_degree={} seed={} order={}",
            self.n,
            self.max_degree,
            self.seed,
            OrderKind::from(self.order).name()
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mine to a degree and write the expression table.
    Table {
        #[command(flatten)]
        run: MineArgs,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket of two necklace traces.
    Bracket {
        #[arg(long, value_enum, default_value = "traceless")]
        mode: ModeArg,
        #[arg(long, default_value_t = 4)]
        n: usize,
        first: String,
        second: String,
    },
    /// Mine relations and write them as a relation file.
    Mine {
        #[command(flatten)]
        run: MineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-bidegree log.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Re-solve diagonal bidegrees without the commutator-power row.
        #[arg(long)]
        audit_special: bool,
    },
    /// Check that every relation in a file vanishes on sampled pairs.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        relations: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Series coefficients and the deficit table.
    Hilbert {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_degree: usize,
        /// Count the ideal spanned by these relations.
        #[arg(long)]
        relations: Option<PathBuf>,
    },
    /// Push relations through a variety map and write their images.
    Map {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        target: TargetArg,
        #[arg(long)]
        relations: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the 4x4 Hironaka decomposition with the Hilbert series.
    Accounting,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Mismatch(_) | Error::RankDeficient { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        pairinv::par::set_jobs(j);
    }
    let cache = std::env::var_os(CACHE_ENV).map(|d| PathBuf::from(d).join(CACHE_FILE));
    if let Some(path) = cache.as_ref().filter(|p| p.exists()) {
        if let Err(e) = bracket_cache().load(path) {
            eprintln!("warning: ignoring bracket cache: {e}");
            bracket_cache().clear();
        }
    }
    let result = run(cli.command);
    if let Some(path) = &cache {
        let saved = path
            .parent()
            .map_or(Ok(()), std::fs::create_dir_all)
            .map_err(Error::from)
            .and_then(|_| bracket_cache().save(path));
        if let Err(e) = saved {
            eprintln!("warning: could not write bracket cache: {e}");
        }
    }
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Table { run, out } => table(&run, out.as_deref()),
        Command::Bracket {
            mode,
            n,
            first,
            second,
        } => bracket(mode, n, &first, &second),
        Command::Mine {
            run,
            out,
            log,
            audit_special,
        } => mine(&run, out.as_deref(), log.as_deref(), audit_special),
        Command::Verify {
            n,
            relations,
            trials,
            seed,
        } => verify(n, &relations, trials, seed),
        Command::Hilbert {
            n,
            max_degree,
            relations,
        } => hilbert_cmd(n, max_degree, relations.as_deref()),
        Command::Map {
            n,
            target,
            relations,
            out,
            trials,
            seed,
        } => map(n, target, &relations, out.as_deref(), trials, seed),
        Command::Accounting => accounting(),
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn check_n(n: usize) -> Result<(), Failure> {
    pairinv::check_size(n).map_err(|e| Failure::usage(e.to_string()))
}

/// Run the miner, echoing degree summaries to stderr.
fn mine_run(run: &MineArgs, config: MineConfig) -> Result<MineOutput, Failure> {
    check_n(run.n)?;
    if run.max_degree < 2 {
        return Err(Failure::usage("--max-degree must be at least 2"));
    }
    let out = miner::mine_with(run.n, run.max_degree, config, |d, _| {
        eprintln!("{}", relfile::degree_log_line(d));
    })?;
    Ok(out)
}

/// 3 when some degree kept a deficit.
fn deficit_code(out: &MineOutput) -> u8 {
    let unfilled = out.unfilled();
    for (d, k) in &unfilled {
        eprintln!("unfilled deficit {k} at degree {d}");
    }
    if unfilled.is_empty() {
        0
    } else {
        3
    }
}

fn table(run: &MineArgs, out: Option<&Path>) -> CmdResult {
    let result = mine_run(run, run.config())?;
    let mut w = output(out)?;
    result.table.write_to(&mut w, &run.run_config(), &result.order())?;
    w.flush()?;
    Ok(deficit_code(&result))
}

fn bracket(mode: ModeArg, n: usize, first: &str, second: &str) -> CmdResult {
    check_n(n)?;
    let parse = |s: &str| Necklace::parse(s).map_err(|e| Failure::usage(e.to_string()));
    let (v1, v2) = (parse(first)?, parse(second)?);
    let interp = match mode {
        ModeArg::Generic => Interpretation::Generic,
        ModeArg::Traceless => Interpretation::Traceless,
    };
    println!("{}", memoized_bracket(v1, v2, interp, n).render());
    Ok(0)
}

fn mine(run: &MineArgs, out: Option<&Path>, log: Option<&Path>, audit_special: bool) -> CmdResult {
    let config = MineConfig {
        audit_special,
        ..run.config()
    };
    let result = mine_run(run, config)?;
    let header = relfile::RelationHeader {
        n: result.n,
        max_degree: result.max_degree,
        seed: result.config.seed,
        target: None,
    };
    let mut w = output(out)?;
    relfile::write_relations(&mut w, &header, result.ideal.relations(), &result.order())?;
    w.flush()?;
    if let Some(path) = log {
        let mut f = BufWriter::new(File::create(path)?);
        writeln!(f, "# mine-log v1 {}", run.run_config())?;
        relfile::write_log(&mut f, &result)?;
        f.flush()?;
    }
    eprintln!("{} relations", result.ideal.len());
    Ok(deficit_code(&result))
}

fn sampler_for(target: Option<&str>) -> Result<SamplerKind, Failure> {
    match target {
        None => Ok(SamplerKind::Generic),
        Some(t) if t.starts_with("com") => Ok(SamplerKind::Commuting),
        Some(t) if t.starts_with("cm") => Ok(SamplerKind::CalogeroMoser),
        Some(t) => Err(Failure::usage(format!("unknown target {t:?}"))),
    }
}

fn verify(n: usize, path: &Path, trials: usize, seed: u64) -> CmdResult {
    check_n(n)?;
    let gens = generator_set(n)?;
    let (header, ideal) = relfile::load_relations(path, &gens)?;
    let kind = sampler_for(header.target.as_deref())?;
    let cfg = SamplerConfig::with_seed(seed);
    println!("# verify n={n} trials={trials} seed={seed} sampler={}", kind.name());
    let mut failed = 0;
    for (k, rel) in ideal.relations().iter().enumerate() {
        let verdict = verify_identity(|pt| eval_genpoly(&rel.poly, &pt.generator_values(&gens)), kind, n, &cfg, trials)?;
        match verdict {
            Verdict::Pass { .. } => println!("#{k} {} pass", rel.bidegree),
            Verdict::Fail { witness, value } => {
                failed += 1;
                println!("#{k} {} FAIL value={value} at trial {}", rel.bidegree, witness.trial);
            }
        }
    }
    println!("{} of {} relations vanish", ideal.len() - failed, ideal.len());
    Ok(if failed == 0 { 0 } else { 1 })
}

fn hilbert_cmd(n: usize, max_degree: usize, relations: Option<&Path>) -> CmdResult {
    check_n(n)?;
    let gens = generator_set(n)?;
    let order = MonomialOrder::new(OrderKind::Grevlex, &gens);
    let ideal = match relations {
        Some(p) => relfile::load_relations(p, &gens)?.1,
        None => RelationIdeal::new(),
    };
    let ideal_dims: Vec<usize> = (0..=max_degree as u32)
        .map(|d| miner::ideal_graded_dim(&ideal, d, &gens, &order))
        .collect();
    let full = hilbert::invariant_series(n).coefficients(max_degree);
    let traceless = hilbert::traceless_series(n).coefficients(max_degree);
    let free = hilbert::free_ring_series(&gens.traceless_degrees()).coefficients(max_degree);
    let deficits = hilbert::deficits(&gens.traceless_degrees(), n, &ideal_dims, max_degree);
    println!("# hilbert n={n} max_degree={max_degree}");
    println!("degree invariant traceless free ideal deficit");
    for d in 0..=max_degree {
        println!(
            "{d} {} {} {} {} {}",
            full[d], traceless[d], free[d], ideal_dims[d], deficits[d]
        );
    }
    Ok(if deficits.iter().all(|&x| x == 0) { 0 } else { 3 })
}

fn map(n: usize, target: TargetArg, path: &Path, out: Option<&Path>, trials: usize, seed: u64) -> CmdResult {
    check_n(n)?;
    let gens = generator_set(n)?;
    let order = MonomialOrder::new(OrderKind::Grevlex, &gens);
    let (header, ideal) = relfile::load_relations(path, &gens)?;
    let cfg = SamplerConfig::with_seed(seed);
    let raw = match target {
        TargetArg::Com => maps::com_map(n)?,
        TargetArg::Cm => maps::cm_map(n)?,
    };
    let report = maps::verify_map(&raw, &cfg, trials)?;
    eprint!("{report}");
    let map = match maps::resolve(&raw, &report) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(1);
        }
    };
    let images = maps::image_relations(&ideal, &map, &order)?;
    let kind = map.variety().sampler();
    let mut failed = 0;
    for p in &images {
        let v = verify_identity(|pt| eval_genpoly(p, &pt.generator_values(&gens)), kind, n, &cfg, trials)?;
        if !v.passed() {
            failed += 1;
        }
    }
    let image_ideal: Vec<miner::Relation> = images
        .into_iter()
        .map(|poly| miner::Relation {
            bidegree: dominant_bidegree(&poly, &gens),
            poly,
            source: miner::Source::File,
        })
        .collect();
    let out_header = relfile::RelationHeader {
        target: Some(map.target_name()),
        ..header
    };
    let mut w = output(out)?;
    relfile::write_relations(&mut w, &out_header, &image_ideal, &order)?;
    w.flush()?;
    eprintln!(
        "{} nonzero images, {} vanish on {} {} points",
        image_ideal.len(),
        image_ideal.len() - failed,
        trials,
        if map.variety() == Variety::Commuting { "commuting" } else { "cm" }
    );
    Ok(if failed == 0 { 0 } else { 1 })
}

/// The largest bidegree among the terms; images under a Calogero–Moser
/// map are not homogeneous.
fn dominant_bidegree(p: &pairinv::ring::GenPoly, gens: &pairinv::ring::GeneratorSet) -> pairinv::necklace::Bidegree {
    p.terms()
        .map(|(m, _)| m.bidegree(gens))
        .max_by_key(|b| (b.total(), b.r))
        .unwrap_or_default()
}

fn accounting() -> CmdResult {
    let acc = hilbert::hironaka_accounting(
        &hilbert::C42_PRIMARY_DEGREES,
        &hilbert::C42_SECONDARY_DEGREES,
        &hilbert::c42_series(),
    );
    println!("primary={} secondary={}", acc.primary_count, acc.secondary_count);
    match acc.first_difference {
        None => {
            println!("match");
            Ok(0)
        }
        Some((d, ours, theirs)) => {
            println!("mismatch at degree {d}: decomposition {ours}, series {theirs}");
            Ok(1)
        }
    }
}
