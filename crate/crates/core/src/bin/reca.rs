use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use reca::pipeline::{self, RunConfig};
use reca::render::{write_ascii, write_pgm};
use reca::sweep::{run_sweep, write_csv, SweepSpec};
use reca::task::OUTPUT_WIDTH;
use reca::{EvaluationResult, ReservoirParams, Rule};

#[derive(Parser)]
#[command(name = "reca", version, about = "Cellular automaton reservoirs on the 5-bit memory task")]
struct Cli {
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and test one run; exits 0 only if every bit is predicted
    Run(RunArgs),
    /// Sweep rules and (I,R) pairs and write success-rate tables as CSV
    Sweep(SweepArgs),
    /// Render space-time diagrams of one pattern as PGM and ASCII
    Render(RenderArgs),
    /// Print lambda, equivalent rules and the transition table
    RuleInfo {
        #[arg(long)]
        rule: i64,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON run configuration; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rule: Option<u8>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    mappings: Option<usize>,
    #[arg(long)]
    diffuse: Option<usize>,
    #[arg(long)]
    distractor: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Stack a second reservoir on the binarized first-layer output
    #[arg(long)]
    layered: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep specification; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated rule numbers
    #[arg(long, value_delimiter = ',')]
    rule: Option<Vec<u8>>,
    /// Single (I,R) pair; needs --mappings as well
    #[arg(long, requires = "mappings")]
    iterations: Option<usize>,
    #[arg(long, requires = "iterations")]
    mappings: Option<usize>,
    #[arg(long)]
    diffuse: Option<usize>,
    #[arg(long)]
    distractor: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    layered: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the timestamp out of the metadata header
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Output prefix; writes <prefix>_layer<k>.pgm and .txt
    #[arg(long)]
    out: PathBuf,
    /// Task pattern to draw (0..=31)
    #[arg(long, default_value_t = 0)]
    pattern: usize,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(io::BufReader::new(file)).with_context(|| format!("malformed config {}", path.display()))
}

fn default_run_config() -> RunConfig {
    RunConfig::single(
        ReservoirParams {
            rule: Rule::from(90),
            iterations: 8,
            mapping_count: 8,
            diffuse_length: 40,
            input_width: reca::task::INPUT_WIDTH,
            seed: 0,
        },
        200,
        0,
    )
}

fn build_run_config(args: &RunArgs) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => read_json::<RunConfig>(path)?,
        None => default_run_config(),
    };
    let l1 = &mut config.layer1;
    if let Some(rule) = args.rule {
        l1.rule = Rule::from(rule);
    }
    if let Some(i) = args.iterations {
        l1.iterations = i;
    }
    if let Some(r) = args.mappings {
        l1.mapping_count = r;
    }
    if let Some(d) = args.diffuse {
        l1.diffuse_length = d;
    }
    if let Some(t) = args.distractor {
        config.distractor = t;
    }
    if let Some(s) = args.seed {
        config.run_seed = s;
    }
    // flags describe layer 1; a second layer from --layered mirrors it
    if args.layered && config.layer2.is_none() {
        config.layer2 = Some(ReservoirParams {
            input_width: OUTPUT_WIDTH,
            ..config.layer1
        });
    }
    config.validate()?;
    Ok(config)
}

fn report(layer: usize, eval: &EvaluationResult) {
    println!(
        "layer {layer}: {}/{} bits correct ({:.4}%), success={}",
        eval.correct_bits,
        eval.total_bits,
        100.0 * eval.accuracy(),
        eval.success
    );
}

fn cmd_run(args: &RunArgs) -> Result<bool> {
    let config = build_run_config(args)?;
    let result = pipeline::run(&config)?;
    report(1, &result.layer1_eval);
    if let Some(eval) = &result.layer2_eval {
        report(2, eval);
    }
    for (k, t) in result.timing.iter().enumerate() {
        eprintln!(
            "layer {} timing: reservoir {:?}, fit {:?}, predict {:?}",
            k + 1,
            t.reservoir,
            t.fit,
            t.predict
        );
    }
    Ok(result.final_eval().success)
}

fn build_sweep_spec(args: &SweepArgs) -> Result<SweepSpec> {
    let mut spec = match &args.config {
        Some(path) => read_json::<SweepSpec>(path)?,
        None => SweepSpec::default(),
    };
    if let Some(rules) = &args.rule {
        spec.rules = rules.clone();
    }
    if let (Some(i), Some(r)) = (args.iterations, args.mappings) {
        spec.combos = vec![(i, r)];
    }
    if let Some(d) = args.diffuse {
        spec.diffuse_length = d;
    }
    if let Some(t) = args.distractor {
        spec.distractor = t;
    }
    if let Some(n) = args.runs {
        spec.n_runs = n;
    }
    if let Some(s) = args.seed {
        spec.base_seed = s;
    }
    if args.layered {
        spec.layered = true;
    }
    if args.out.is_some() {
        spec.output = args.out.clone();
    }
    spec.validate()?;
    Ok(spec)
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let spec = build_sweep_spec(args)?;
    let tables = run_sweep(&spec, |rule, (i, r), done, total| {
        eprintln!("[{done}/{total}] rule {rule} ({i},{r})");
    })?;
    let timestamp = (!args.no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
            .to_string()
    });
    match &spec.output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            let mut out = BufWriter::new(file);
            write_csv(&spec, &tables, timestamp.as_deref(), &mut out)?;
            out.flush()?;
        }
        None => write_csv(&spec, &tables, timestamp.as_deref(), io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_render(args: &RenderArgs) -> Result<()> {
    let config = build_run_config(&args.run)?;
    let grids = pipeline::space_time(&config, args.pattern)?;
    for (k, grid) in grids.iter().enumerate() {
        let stem = format!("{}_layer{}", args.out.display(), k + 1);
        let pgm = PathBuf::from(format!("{stem}.pgm"));
        let txt = PathBuf::from(format!("{stem}.txt"));
        let mut out = BufWriter::new(File::create(&pgm).with_context(|| format!("cannot write {}", pgm.display()))?);
        write_pgm(grid, &mut out)?;
        out.flush()?;
        let mut out = BufWriter::new(File::create(&txt).with_context(|| format!("cannot write {}", txt.display()))?);
        write_ascii(grid, &mut out)?;
        out.flush()?;
        let width = grid.first().map_or(0, |s| s.width());
        println!("layer {}: {}x{} -> {}, {}", k + 1, width, grid.len(), pgm.display(), txt.display());
    }
    Ok(())
}

fn cmd_rule_info(number: i64) -> Result<()> {
    let rule = Rule::new(number)?;
    let [mirror, complement, both] = rule.equivalents();
    println!("rule {}", rule.number());
    println!("lambda {}", rule.lambda());
    println!("mirror {}", mirror.number());
    println!("complement {}", complement.number());
    println!("mirror+complement {}", both.number());
    for n in (0..8u8).rev() {
        println!("{:03b} -> {}", n, rule.output(n));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args).map(|ok| if ok { 0 } else { 1 }),
        Command::Sweep(args) => cmd_sweep(args).map(|_| 0),
        Command::Render(args) => cmd_render(args).map(|_| 0),
        Command::RuleInfo { rule } => cmd_rule_info(*rule).map(|_| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
