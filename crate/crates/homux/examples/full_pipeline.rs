//! The whole pipeline through the library API: synthesize a Likert dataset,
//! write a config, run network -> candidates -> validation -> multiplex ->
//! metrics, and read the manifest back.
//!
//! This mirrors what `homux synth` + `homux run-all` do from the shell.
//!
//! Run: cargo run --example full_pipeline

use homux::data::ResponseMatrix;
use homux::io::{render_dataset_csv, render_ground_truth, render_scale_map, GroundTruthBlock, GroundTruthFile};
use homux::pipeline::{
    run_pipeline, CandidateSettings, CorrelationSettings, GlassoSettings, LayerSpec,
    PipelineConfig, ValidationSettings,
};
use homux::synth::{discretize_quantile, regime_specs, sample_system, BlockSystemSpec, Regime};

fn main() {
    let dir = std::env::temp_dir().join("homux_full_pipeline_example");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();

    // one layer of mixed-regime synthetic data, Likert-coded
    let spec = BlockSystemSpec {
        triplets: regime_specs(Regime::Mixed, 0.15, 0.10).unwrap(),
        n_samples: 900,
        seed: 20,
    };
    let sys = sample_system(&spec).unwrap();
    let codes = discretize_quantile(&sys.values, 5).unwrap();
    let data = ResponseMatrix::new(codes, sys.column_ids.clone(), "MIXED", (0, 4)).unwrap();
    std::fs::write(dir.join("mixed.csv"), render_dataset_csv(&data)).unwrap();
    let truth = GroundTruthFile {
        version: homux::io::TOOL_VERSION.to_string(),
        seed: spec.seed,
        n_samples: spec.n_samples,
        regime: Regime::Mixed.name().to_string(),
        likert_levels: Some(5),
        blocks: sys.blocks.iter().map(GroundTruthBlock::from_planted).collect(),
    };
    std::fs::write(dir.join("truth.json"), render_ground_truth(&truth)).unwrap();
    let mut scales = std::collections::BTreeMap::new();
    for (b, block) in sys.blocks.iter().enumerate() {
        scales.insert(format!("block{}", b + 1), block.items.iter().copied().collect());
    }
    let map = homux::data::ScaleMap::with_complement(scales, sys.n_items()).unwrap();
    std::fs::write(dir.join("scales.json"), render_scale_map(&map)).unwrap();

    let cfg = PipelineConfig {
        layers: vec![LayerSpec {
            id: "MIXED".into(),
            dataset: dir.join("mixed.csv"),
            ground_truth: Some(dir.join("truth.json")),
        }],
        scale_map: Some(dir.join("scales.json")),
        correlation: CorrelationSettings {
            methods: vec![homux::dyadic::CorrelationMethod::Nonparanormal],
            ..Default::default()
        },
        glasso: GlassoSettings {
            grid_size: 40,
            ..Default::default()
        },
        candidates: CandidateSettings {
            sample_per_pair: 1,
            ..Default::default()
        },
        validation: ValidationSettings {
            n_perm: 200,
            n_boot: 1000,
            ..Default::default()
        },
        output_dir: dir.join("out"),
        seed: 31,
    };

    let outcome = run_pipeline(&cfg).unwrap();
    let manifest = outcome.manifest.unwrap();
    println!("artifacts under {}", outcome.output_dir.display());
    println!("config hash: {}", manifest.config_sha256);
    for (layer, summary) in &manifest.layers {
        println!(
            "layer {layer}: {} respondents x {} items",
            summary.n_respondents, summary.n_items
        );
        if let Some(c) = &summary.candidates {
            println!("  candidates: {} total, by order {:?}", c.total, c.by_order);
        }
        if let Some(v) = &summary.validation {
            println!(
                "  validation: {} -> {} -> {} -> {}",
                v.candidates, v.stage1_passed, v.stage2_passed, v.stage3_passed
            );
        }
    }
    for (layer, recovery) in &manifest.recovery {
        println!(
            "recovery {layer}: {}/{} planted validated, {} sign matches, {} other",
            recovery.validated_planted, recovery.planted, recovery.sign_matches,
            recovery.other_validated
        );
    }
}
