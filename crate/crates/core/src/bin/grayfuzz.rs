use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grayfuzz::bench::{load_image, run_benchmark, BenchmarkSpec, CompareMode, Row};
use grayfuzz::image::{add_gaussian_noise, phantom, save_pgm, NoiseSpec};
use grayfuzz::metrics::compare;
use grayfuzz::pipeline::extract;
use grayfuzz::threshold::threshold_report_with;
use grayfuzz::{histogram, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "grayfuzz",
    version,
    about = "Fuzzy gray-image extraction and PSNR benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Method x sigma PSNR matrix as CSV
    Bench(BenchArgs),
    /// Corrupt one image, extract it, and write every artifact
    Run(RunArgs),
    /// Threshold report of an image as CSV
    Thresholds {
        #[arg(long)]
        input: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write a built-in phantom (bimodal, two-level) as PGM
    Phantom {
        name: String,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Settings shared by `bench` and `run`; each overrides the config file.
#[derive(Args)]
struct Common {
    /// JSON benchmark spec
    #[arg(long)]
    config: Option<PathBuf>,
    /// Minimum number of input fuzzy regions
    #[arg(long)]
    regions: Option<usize>,
    /// Training pair stride
    #[arg(long)]
    stride: Option<usize>,
    /// restored | binarized-means
    #[arg(long)]
    compare: Option<CompareMode>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// PGM path or phantom:<name>; repeatable
    #[arg(long)]
    input: Vec<String>,
    /// Noise sigma; repeatable or comma-separated
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
    /// Noise seed; repeatable or comma-separated
    #[arg(long, value_delimiter = ',')]
    seed: Vec<u64>,
    /// Rows to include, comma-separated (method names and `proposed`)
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Row>,
    /// Write the matrix here instead of standard output
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// PGM path or phantom:<name>
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 3 on single-intensity input
    #[arg(long)]
    strict: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("grayfuzz: {e}");
            ExitCode::from(match e {
                Error::Io { .. } | Error::Image(_) => EXIT_IO,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Bench(args) => bench(args),
        Command::Run(args) => run(args),
        Command::Thresholds { input, csv } => {
            let image = load_image(&input)?;
            let report = threshold_report_with(&histogram(&image), &Default::default());
            emit(csv.as_deref(), report.to_csv().as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Phantom { name, output } => {
            write(&output, &save_pgm(&phantom::by_name(&name)?))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_spec(common: &Common) -> Result<BenchmarkSpec, Error> {
    let mut spec = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            serde_json::from_str(&text)?
        }
        None => BenchmarkSpec::default(),
    };
    if let Some(regions) = common.regions {
        spec.pipeline.min_regions = regions;
    }
    if let Some(stride) = common.stride {
        spec.pipeline.training_stride = stride;
    }
    if let Some(mode) = common.compare {
        spec.compare = mode;
    }
    Ok(spec)
}

fn bench(args: BenchArgs) -> Result<ExitCode, Error> {
    let mut spec = load_spec(&args.common)?;
    if !args.input.is_empty() {
        spec.images = args.input;
    }
    if !args.sigma.is_empty() {
        spec.sigmas = args.sigma;
    }
    if !args.seed.is_empty() {
        spec.seeds = args.seed;
    }
    if !args.methods.is_empty() {
        spec.methods = args.methods;
    }
    let csv = run_benchmark(&spec)?.to_csv();
    if let Some(dir) = &args.common.out_dir {
        create_dir(dir)?;
        write(&dir.join("benchmark.csv"), csv.as_bytes())?;
    }
    if args.csv.is_some() || args.common.out_dir.is_none() {
        emit(args.csv.as_deref(), csv.as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run(args: RunArgs) -> Result<ExitCode, Error> {
    let spec = load_spec(&args.common)?;
    let source = match args.input.or_else(|| spec.images.first().cloned()) {
        Some(source) => source,
        None => return Err(Error::Spec("no input image".to_string())),
    };
    let sigma = args.sigma.or(spec.sigmas.first().copied()).unwrap_or(0.0);
    let seed = args.seed.or(spec.seeds.first().copied()).unwrap_or(1);
    let noise = NoiseSpec::new(sigma, seed)?;
    spec.pipeline.validate()?;

    let clean = load_image(&source)?;
    let noisy = add_gaussian_noise(&clean, &noise);
    let result = extract(&noisy, &spec.pipeline)?;
    let scored = match spec.compare {
        CompareMode::Restored => result.extracted.clone(),
        CompareMode::BinarizedMeans => result.class_means_image(),
    };
    let metrics = serde_json::json!({
        "sigma": sigma,
        "seed": seed,
        "compare": spec.compare,
        "noisy": compare(&noisy, &clean)?,
        "extracted": compare(&scored, &clean)?,
        "no_rule_pixels": result.no_rule_pixels,
        "degenerate": result.degenerate,
    });
    let rulebase = match &result.rulebase {
        Some(base) => base.to_json(),
        None => "null".to_string(),
    };

    let dir = args.common.out_dir.unwrap_or_else(|| PathBuf::from("."));
    create_dir(&dir)?;
    write(&dir.join("noisy.pgm"), &save_pgm(&noisy))?;
    write(&dir.join("extracted.pgm"), &save_pgm(&result.extracted))?;
    write(
        &dir.join("thresholds.csv"),
        result.report.to_csv().as_bytes(),
    )?;
    write(&dir.join("rulebase.json"), rulebase.as_bytes())?;
    let metrics = serde_json::to_string_pretty(&metrics)?;
    write(&dir.join("metrics.json"), metrics.as_bytes())?;

    if result.degenerate {
        eprintln!("grayfuzz: warning: input has a single intensity; output equals input");
        if args.strict {
            return Ok(ExitCode::from(EXIT_DEGENERATE));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match path {
        Some(path) => write(path, bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}
