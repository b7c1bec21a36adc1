//! Command-line front end. Each subcommand consumes and produces the
//! documented file formats, so stages can run independently or resume from
//! a partially populated output directory. Set `HOMUX_LOG` (e.g. `info`,
//! `debug`) to control verbosity.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use homux::data::ResponseMatrix;
use homux::error::Error;
use homux::io::{
    render_dataset_csv, render_ground_truth, render_scale_map, GroundTruthBlock, GroundTruthFile,
    TOOL_VERSION,
};
use homux::pipeline::{run_stages, PipelineConfig, PipelineStage};
use homux::synth::{
    discretize_quantile, regime_specs, sample_system, BlockSystemSpec, Regime,
};

#[derive(Parser)]
#[command(
    name = "homux",
    version,
    about = "Higher-order interaction discovery and multiplex hypergraph construction for ordinal item data"
)]
struct Cli {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StageArgs {
    /// Pipeline configuration (JSON).
    #[arg(long)]
    config: PathBuf,

    /// Override the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate dyadic networks (correlation + EBIC graphical lasso) per layer.
    Network(StageArgs),
    /// Generate candidate multiplets from stored networks and the scale map.
    Candidates(StageArgs),
    /// Run the three-stage validation on stored candidates.
    Validate(StageArgs),
    /// Assemble the synergy and redundancy multiplexes from stored hyperedges.
    Multiplex(StageArgs),
    /// Compute degree/NSWD/pattern tables from stored multiplexes.
    Metrics(StageArgs),
    /// Run every stage end to end.
    RunAll {
        #[command(flatten)]
        stage: StageArgs,
        /// Resume from this stage, loading earlier artifacts from the
        /// output directory (network, candidates, validate, multiplex,
        /// metrics).
        #[arg(long)]
        resume: Option<String>,
    },
    /// Generate a synthetic dataset with planted interactions.
    Synth {
        /// Regime: near-zero, redundant, synergistic, or mixed.
        #[arg(long)]
        regime: String,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5000)]
        n_samples: usize,
        /// Likert levels for the discretized dataset.
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// Emit the continuous columns instead of Likert codes
        /// (not consumable by the pipeline, which expects integers).
        #[arg(long)]
        continuous: bool,
        /// Effect floor used to calibrate the signed regimes.
        #[arg(long, default_value_t = 0.15)]
        floor: f64,
        /// Calibration margin above the floor.
        #[arg(long, default_value_t = 0.10)]
        margin: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HOMUX_LOG", "warn")).init();
    let cli = Cli::parse();
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot build worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let result = pool.install(|| dispatch(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Network(args) => run(args, PipelineStage::Network, PipelineStage::Network),
        Command::Candidates(args) => {
            run(args, PipelineStage::Candidates, PipelineStage::Candidates)
        }
        Command::Validate(args) => run(args, PipelineStage::Validate, PipelineStage::Validate),
        Command::Multiplex(args) => run(args, PipelineStage::Multiplex, PipelineStage::Multiplex),
        Command::Metrics(args) => run(args, PipelineStage::Metrics, PipelineStage::Metrics),
        Command::RunAll { stage, resume } => {
            let from = match resume {
                Some(name) => name.parse()?,
                None => PipelineStage::Network,
            };
            run(stage, from, PipelineStage::Metrics)
        }
        Command::Synth {
            regime,
            out,
            seed,
            n_samples,
            levels,
            continuous,
            floor,
            margin,
        } => synth(regime, out, seed, n_samples, levels, continuous, floor, margin),
    }
}

fn run(args: StageArgs, from: PipelineStage, to: PipelineStage) -> Result<(), Error> {
    let mut cfg = PipelineConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let outcome = run_stages(&cfg, from, to)?;
    if let Some(manifest) = &outcome.manifest {
        for (layer, summary) in &manifest.layers {
            if let Some(h) = &summary.hyperedges {
                log::info!(
                    "layer {layer}: {} synergistic, {} redundant hyperedges",
                    h.get("synergy").copied().unwrap_or(0),
                    h.get("redundancy").copied().unwrap_or(0)
                );
            }
        }
    }
    println!(
        "wrote {} ({}..{})",
        outcome.output_dir.display(),
        from.name(),
        to.name()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn synth(
    regime: String,
    out: PathBuf,
    seed: u64,
    n_samples: usize,
    levels: usize,
    continuous: bool,
    floor: f64,
    margin: f64,
) -> Result<(), Error> {
    let regime: Regime = regime.parse()?;
    let spec = BlockSystemSpec {
        triplets: regime_specs(regime, floor, margin)?,
        n_samples,
        seed,
    };
    let sys = sample_system(&spec)?;
    std::fs::create_dir_all(&out)?;

    let dataset_path = out.join(format!("dataset_{}.csv", regime.name()));
    if continuous {
        let mut text = String::from("# continuous: true\n");
        text.push_str(&sys.column_ids.join(","));
        text.push('\n');
        for row in sys.values.rows() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        std::fs::write(&dataset_path, text)?;
    } else {
        let codes = discretize_quantile(&sys.values, levels)?;
        let data = ResponseMatrix::new(
            codes,
            sys.column_ids.clone(),
            regime.name(),
            (0, levels as i32 - 1),
        )?;
        std::fs::write(&dataset_path, render_dataset_csv(&data))?;
    }

    let truth = GroundTruthFile {
        version: TOOL_VERSION.to_string(),
        seed,
        n_samples,
        regime: regime.name().to_string(),
        likert_levels: if continuous { None } else { Some(levels) },
        blocks: sys.blocks.iter().map(GroundTruthBlock::from_planted).collect(),
    };
    let truth_path = out.join(format!("ground_truth_{}.json", regime.name()));
    std::fs::write(&truth_path, render_ground_truth(&truth))?;

    // block scale map, so subscale-guided candidates cover the planted triplets
    let mut scales = std::collections::BTreeMap::new();
    for (b, block) in sys.blocks.iter().enumerate() {
        scales.insert(
            format!("block{}", b + 1),
            block.items.iter().copied().collect(),
        );
    }
    let map = homux::data::ScaleMap::with_complement(scales, sys.n_items())?;
    let scales_path = out.join("scales.json");
    std::fs::write(&scales_path, render_scale_map(&map))?;

    println!(
        "wrote {}, {}, {}",
        dataset_path.display(),
        truth_path.display(),
        scales_path.display()
    );
    Ok(())
}
