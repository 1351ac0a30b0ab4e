use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{error, warn};
use maxtree::{
    build, build_timed, compute_attribute, direct_filter, image::encode_pgm, load_image, normalize, read_dump,
    recommend, synth, validate, write_dump, Algorithm, Area, BuildOptions, Connectivity, Image2D, PhaseTimes,
};

mod bench;
mod mem;

use bench::BenchConfig;

/// Largest image compared against the brute-force oracle by `validate`.
const ORACLE_MAX_PIXELS: usize = 10_000;

#[derive(Parser)]
#[command(name = "maxtree", version, about = "Max-tree construction, filtering and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tree and write its dump (`p parent level` per line, in S order).
    Build {
        image: PathBuf,
        #[command(flatten)]
        algo: AlgoArgs,
        /// Dump destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Area opening: remove peak components smaller than `--area` pixels.
    Filter {
        image: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        area: u64,
        #[command(flatten)]
        algo: AlgoArgs,
        /// Output PGM; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check builders against each other, the encoding invariants and the
    /// brute-force oracle.
    Validate(ValidateArgs),
    /// Timing sweep over sizes, bit depths, band and worker counts, as CSV.
    Bench(BenchArgs),
    /// Suggest an algorithm for a bit depth and execution context.
    Recommend {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=32))]
        bits: u32,
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        memory_constrained: bool,
    },
}

#[derive(Args)]
struct AlgoArgs {
    #[arg(short, long, default_value = "uf_rank", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[command(flatten)]
    par: ParArgs,
}

#[derive(Args, Clone, Copy)]
struct ParArgs {
    /// Pixel connectivity: 4 or 8.
    #[arg(long, default_value = "4")]
    conn: Connectivity,
    /// Row bands for the parallel builder.
    #[arg(long, default_value_t = 4)]
    bands: usize,
    /// Per-band algorithm for the parallel builder.
    #[arg(long, default_value = "uf_levelcomp", value_parser = parse_algorithm)]
    base: Algorithm,
    /// Worker threads for the parallel builder; 0 uses every core.
    #[arg(long, env = "MAXTREE_WORKERS", default_value_t = 0)]
    workers: usize,
}

impl ParArgs {
    fn options(self) -> BuildOptions {
        BuildOptions { conn: self.conn, base: self.base, bands: self.bands, workers: self.workers }
    }
}

#[derive(Args)]
struct ValidateArgs {
    /// Image to check; a seeded random image is used when omitted.
    image: Option<PathBuf>,
    /// Builders to run (repeatable); all of them by default.
    #[arg(short, long, value_parser = parse_algorithm)]
    algorithm: Vec<Algorithm>,
    /// Check this tree dump instead of running builders.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Size of the random image, as WIDTHxHEIGHT.
    #[arg(long, default_value = "64x64", value_parser = parse_size)]
    size: (usize, usize),
    #[arg(long, default_value_t = 8)]
    bits: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    par: ParArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Source image, resized by tiling; a synthetic natural image otherwise.
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(short, long, value_parser = parse_algorithm, value_delimiter = ',', default_value = "uf,uf_rank,uf_levelcomp,salembier,nonrec,parallel")]
    algorithm: Vec<Algorithm>,
    /// Target sizes in megapixels.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    mp: Vec<f64>,
    /// Target bit depths.
    #[arg(long, value_delimiter = ',', default_value = "8")]
    bits: Vec<u32>,
    /// Band counts (parallel builder only).
    #[arg(long, value_delimiter = ',', default_value = "4")]
    bands: Vec<usize>,
    /// Worker counts (parallel builder only).
    #[arg(long, value_delimiter = ',', env = "MAXTREE_WORKERS", default_value = "0")]
    workers: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also report per-phase times.
    #[arg(long)]
    phases: bool,
    #[arg(long, default_value = "4")]
    conn: Connectivity,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: maxtree::Error| e.to_string())
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once('x').ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let w = w.parse().map_err(|e| format!("width: {e}"))?;
    let h = h.parse().map_err(|e| format!("height: {e}"))?;
    Ok((w, h))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build { image, algo, output } => cmd_build(image, algo, output),
        Command::Filter { image, area, algo, output } => cmd_filter(image, area, algo, output),
        Command::Validate(args) => cmd_validate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Recommend { bits, parallel, memory_constrained } => {
            recommend(bits, parallel, memory_constrained).map(|r| {
                println!("{r}");
                true
            })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn sink(path: Option<PathBuf>) -> maxtree::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_build(image: PathBuf, algo: AlgoArgs, output: Option<PathBuf>) -> maxtree::Result<bool> {
    let img = load_image(image)?;
    let start = Instant::now();
    let tree = build(&img, algo.algorithm, &algo.par.options())?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let mut out = sink(output)?;
    write_dump(&img, &tree, &mut out)?;
    out.flush()?;
    eprintln!("algorithm: {}", algo.algorithm);
    eprintln!("nodes: {}", tree.node_count(&img));
    eprintln!("depth: {}", tree.depth(&img));
    eprintln!("time_ms: {ms:.3}");
    Ok(true)
}

fn cmd_filter(image: PathBuf, area: u64, algo: AlgoArgs, output: Option<PathBuf>) -> maxtree::Result<bool> {
    let img = load_image(image)?;
    let tree = build(&img, algo.algorithm, &algo.par.options())?;
    let attr = compute_attribute(&tree, &img, &Area)?;
    let filtered = direct_filter(&tree, &img, &attr, &area)?;
    let mut out = sink(output)?;
    out.write_all(&encode_pgm(&filtered)?)?;
    out.flush()?;
    Ok(true)
}

fn cmd_validate(args: ValidateArgs) -> maxtree::Result<bool> {
    let img = match &args.image {
        Some(path) => load_image(path)?,
        None => {
            let (w, h) = args.size;
            synth::uniform(w, h, args.bits, args.seed)
        }
    };
    let conn = args.par.conn;

    if let Some(path) = args.dump {
        let (tree, levels) = read_dump(BufReader::new(File::open(path)?), img.len())?;
        let mut ok = true;
        if let Some(p) = (0..img.len()).find(|&p| levels[p] != img.get(p)) {
            println!("pixel {p}: dump level {} but image level {}", levels[p], img.get(p));
            ok = false;
        }
        let report = validate(&img, &tree);
        if !report.is_ok() {
            println!("{report}");
            ok = false;
        } else if img.len() <= ORACLE_MAX_PIXELS {
            let oracle = maxtree::brute_maxtree(&img, conn);
            if let Some(diff) = normalize(&img, &tree)?.first_difference(&oracle) {
                println!("dump vs oracle: {diff}");
                ok = false;
            }
        }
        println!("{}", if ok { "dump: ok" } else { "dump: INVALID" });
        return Ok(ok);
    }

    let algos = if args.algorithm.is_empty() { Algorithm::ALL.to_vec() } else { args.algorithm };
    let opts = args.par.options();
    let oracle = (img.len() <= ORACLE_MAX_PIXELS).then(|| maxtree::brute_maxtree(&img, conn));
    let mut reference: Option<(Algorithm, maxtree::NormalizedTree)> = None;
    let mut ok = true;
    for algo in algos {
        if !algo.supports(img.bit_depth()) {
            warn!("{algo} does not support {} bits, skipped", img.bit_depth());
            continue;
        }
        let tree = build(&img, algo, &opts)?;
        let report = validate(&img, &tree);
        if !report.is_ok() {
            println!("{algo}: INVALID\n{report}");
            ok = false;
            continue;
        }
        let nt = normalize(&img, &tree)?;
        let mut status = format!("{algo}: ok ({} nodes)", nt.num_nodes());
        if let Some((first, want)) = &reference {
            if let Some(diff) = nt.first_difference(want) {
                status = format!("{algo}: MISMATCH with {first}: {diff}");
                ok = false;
            }
        }
        if let Some(want) = &oracle {
            if let Some(diff) = nt.first_difference(want) {
                status = format!("{algo}: MISMATCH with oracle: {diff}");
                ok = false;
            }
        }
        println!("{status}");
        if reference.is_none() {
            reference = Some((algo, nt));
        }
    }
    if oracle.is_none() {
        println!("oracle skipped: {} pixels > {ORACLE_MAX_PIXELS}", img.len());
    }
    Ok(ok)
}

fn cmd_bench(args: BenchArgs) -> maxtree::Result<bool> {
    let cfg = BenchConfig {
        algorithms: args.algorithm,
        image: args.image,
        megapixels: args.mp,
        bit_depths: args.bits,
        bands: args.bands,
        workers: args.workers,
        reps: args.reps,
        seed: args.seed,
        phases: args.phases,
        conn: args.conn,
    };
    cfg.check()?;
    let source: Option<Image2D> = cfg.image.as_ref().map(load_image).transpose()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{}", bench::CSV_HEADER)?;
    bench::run(
        &cfg,
        source.as_ref(),
        |img, algo, opts| {
            let mut times = PhaseTimes::default();
            build_timed(img, algo, opts, &mut times).map(|_| times)
        },
        |rec| {
            writeln!(out, "{}", rec.csv())?;
            out.flush()?;
            Ok(())
        },
    )?;
    Ok(true)
}
