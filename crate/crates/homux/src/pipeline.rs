//! Pipeline orchestration: configuration, stage scheduling with resume,
//! artifact tree, and the reproducibility manifest.
//!
//! One master seed drives every stage through named derivation
//! (stage + layer + candidate identity), so an identical configuration
//! produces a byte-identical artifact tree regardless of worker count.
//! On failure, whatever artifacts were staged are written under a
//! `failed/` prefix instead of the normal tree.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::candidates::{
    expand_seeds, maximal_cliques, spinglass_communities, subscale_candidates, AnnealSchedule,
    CandidateSet, ExpansionOptions, SpinglassOptions, SubscaleOptions,
};
use crate::data::{
    InteractionType, MultiplexHypergraph, ResponseMatrix, ScaleMap, ValidatedHyperedge,
};
use crate::dyadic::{
    default_lambda_grid, ebic_glasso, nonparanormal_corr_with, polychoric_corr,
    CorrelationEstimate, CorrelationMethod, DyadicNetwork, NonparanormalVariant,
};
use crate::error::{Error, Result};
use crate::info::{copula_transform, CopulaScores};
use crate::io::{self, GroundTruthFile, NetworkMeta, Stamp, ValidationMeta};
use crate::metrics::{extract_patterns, nswd, weighted_degrees};
use crate::seed::SeedDeriver;
use crate::validation::{validate_all, StageId, StageReport, ValidationConfig};

// ---------------------------------------------------------------------------
// configuration

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub id: String,
    pub dataset: PathBuf,
    /// Optional planted-structure file; enables the recovery summary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorrelationSettings {
    pub methods: Vec<CorrelationMethod>,
    pub nonparanormal_variant: NonparanormalVariant,
}

impl Default for CorrelationSettings {
    fn default() -> Self {
        Self {
            methods: vec![
                CorrelationMethod::Nonparanormal,
                CorrelationMethod::Polychoric,
            ],
            nonparanormal_variant: NonparanormalVariant::Plain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlassoSettings {
    pub gamma: f64,
    pub grid_size: usize,
    pub grid_min_ratio: f64,
}

impl Default for GlassoSettings {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            grid_size: 100,
            grid_min_ratio: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpinglassSettings {
    pub gamma: f64,
    pub spins_max: usize,
    pub restarts: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub cooling: f64,
}

impl Default for SpinglassSettings {
    fn default() -> Self {
        let o = SpinglassOptions::default();
        Self {
            gamma: o.gamma,
            spins_max: o.spins_max,
            restarts: o.restarts,
            t_start: o.schedule.t_start,
            t_end: o.schedule.t_end,
            cooling: o.schedule.cooling,
        }
    }
}

impl SpinglassSettings {
    fn options(&self) -> SpinglassOptions {
        SpinglassOptions {
            gamma: self.gamma,
            spins_max: self.spins_max,
            restarts: self.restarts,
            schedule: AnnealSchedule {
                t_start: self.t_start,
                t_end: self.t_end,
                cooling: self.cooling,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CandidateSettings {
    pub k_min: usize,
    pub k_max: usize,
    pub top_m: usize,
    pub min_gain: f64,
    pub positive_only_cliques: bool,
    pub sample_per_pair: usize,
    pub intra_cap: usize,
    pub spinglass: SpinglassSettings,
}

impl Default for CandidateSettings {
    fn default() -> Self {
        Self {
            k_min: 3,
            k_max: 5,
            top_m: 200,
            min_gain: 0.02,
            positive_only_cliques: false,
            sample_per_pair: 100,
            intra_cap: 5000,
            spinglass: SpinglassSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationSettings {
    pub n_perm: usize,
    pub alpha_fdr: f64,
    pub effect_floor: f64,
    pub n_boot: usize,
    pub ci_level: f64,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            n_perm: ValidationConfig::DEFAULT_N_PERM,
            alpha_fdr: ValidationConfig::DEFAULT_ALPHA_FDR,
            effect_floor: ValidationConfig::DEFAULT_EFFECT_FLOOR,
            n_boot: ValidationConfig::DEFAULT_N_BOOT,
            ci_level: ValidationConfig::DEFAULT_CI_LEVEL,
        }
    }
}

impl ValidationSettings {
    fn config(&self, seed: u64) -> ValidationConfig {
        ValidationConfig {
            n_perm: self.n_perm,
            alpha_fdr: self.alpha_fdr,
            effect_floor: self.effect_floor,
            n_boot: self.n_boot,
            ci_level: self.ci_level,
            seed,
        }
    }
}

/// Full run description. The seed is mandatory: there is no wall-clock
/// fallback, and the serialized config (hence its hash) lands in every
/// output's metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub layers: Vec<LayerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_map: Option<PathBuf>,
    #[serde(default)]
    pub correlation: CorrelationSettings,
    #[serde(default)]
    pub glasso: GlassoSettings,
    #[serde(default)]
    pub candidates: CandidateSettings,
    #[serde(default)]
    pub validation: ValidationSettings,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config("config declares no layers".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for layer in &self.layers {
            if layer.id.is_empty()
                || !layer
                    .id
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(Error::Config(format!(
                    "layer id {:?} must be non-empty and use only [A-Za-z0-9_-]",
                    layer.id
                )));
            }
            if !seen.insert(&layer.id) {
                return Err(Error::Config(format!("duplicate layer id {:?}", layer.id)));
            }
            if !layer.dataset.is_file() {
                return Err(Error::Config(format!(
                    "layer {:?}: dataset {} does not exist",
                    layer.id,
                    layer.dataset.display()
                )));
            }
            if let Some(gt) = &layer.ground_truth {
                if !gt.is_file() {
                    return Err(Error::Config(format!(
                        "layer {:?}: ground truth {} does not exist",
                        layer.id,
                        gt.display()
                    )));
                }
            }
        }
        if let Some(map) = &self.scale_map {
            if !map.is_file() {
                return Err(Error::Config(format!(
                    "scale map {} does not exist",
                    map.display()
                )));
            }
        }
        if self.correlation.methods.is_empty() {
            return Err(Error::Config("no correlation methods configured".into()));
        }
        if self.candidates.k_min < 3 || self.candidates.k_max < self.candidates.k_min {
            return Err(Error::Config(format!(
                "candidate order bounds [{}, {}] invalid (need 3 <= k_min <= k_max)",
                self.candidates.k_min, self.candidates.k_max
            )));
        }
        self.validation.config(0).validate()?;
        Ok(())
    }

    /// SHA-256 of the canonical serialized config.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("serializable config");
        io::sha256_hex(canonical.as_bytes())
    }
}

// ---------------------------------------------------------------------------
// stages

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PipelineStage {
    Network,
    Candidates,
    Validate,
    Multiplex,
    Metrics,
}

impl PipelineStage {
    pub const ALL: [PipelineStage; 5] = [
        PipelineStage::Network,
        PipelineStage::Candidates,
        PipelineStage::Validate,
        PipelineStage::Multiplex,
        PipelineStage::Metrics,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PipelineStage::Network => "network",
            PipelineStage::Candidates => "candidates",
            PipelineStage::Validate => "validate",
            PipelineStage::Multiplex => "multiplex",
            PipelineStage::Metrics => "metrics",
        }
    }
}

impl std::str::FromStr for PipelineStage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "network" => Ok(PipelineStage::Network),
            "candidates" => Ok(PipelineStage::Candidates),
            "validate" => Ok(PipelineStage::Validate),
            "multiplex" => Ok(PipelineStage::Multiplex),
            "metrics" => Ok(PipelineStage::Metrics),
            other => Err(Error::Config(format!("unknown stage {other:?}"))),
        }
    }
}

fn with_context(e: Error, layer: &str, stage: PipelineStage) -> Error {
    let msg = format!("layer {layer:?}, stage {}: {e}", stage.name());
    match e {
        Error::Config(_) => Error::Config(msg),
        Error::Data(_) => Error::Data(msg),
        Error::Schema(_) => Error::Schema(msg),
        Error::Structural(_) => Error::Structural(msg),
        Error::DegenerateVariable(_) => Error::DegenerateVariable(msg),
        Error::SingularCovariance(_) => Error::SingularCovariance(msg),
        Error::Estimation(_) => Error::Estimation(msg),
        Error::Specification(_) => Error::Specification(msg),
        Error::Io(_) => Error::Data(msg),
    }
}

// ---------------------------------------------------------------------------
// manifest

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub lambda_selected: f64,
    pub n_edges: usize,
    pub n_components: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub total: usize,
    pub by_order: BTreeMap<usize, usize>,
    pub by_provenance: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub candidates: usize,
    pub stage1_passed: usize,
    pub stage2_passed: usize,
    pub stage3_passed: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LayerSummary {
    pub n_respondents: usize,
    pub n_items: usize,
    pub seeds: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub networks: BTreeMap<String, NetworkSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<CandidateSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperedges: Option<BTreeMap<String, usize>>,
}

/// Planted-structure recovery, reported when a layer carries ground truth.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RecoverySummary {
    /// Planted triplets in the generator.
    pub planted: usize,
    /// Planted triplets whose exact |omega| clears the effect floor.
    pub planted_above_floor: usize,
    /// Planted triplets that were validated.
    pub validated_planted: usize,
    /// Validated planted triplets whose sign matches the analytic sign.
    pub sign_matches: usize,
    /// Validated hyperedges that are not planted triplets.
    pub other_validated: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestFile {
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub layers: BTreeMap<String, LayerSummary>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub multiplex: BTreeMap<String, BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub recovery: BTreeMap<String, RecoverySummary>,
}

// ---------------------------------------------------------------------------
// execution

struct Staging {
    files: BTreeMap<String, String>,
}

impl Staging {
    fn new() -> Self {
        Self {
            files: BTreeMap::new(),
        }
    }

    fn add(&mut self, rel: impl Into<String>, content: String) {
        self.files.insert(rel.into(), content);
    }

    fn flush(&self, root: &Path) -> Result<()> {
        for (rel, content) in &self.files {
            let path = root.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, content)?;
        }
        Ok(())
    }
}

struct LayerCtx {
    spec: LayerSpec,
    data: ResponseMatrix,
    scores: CopulaScores,
    networks: BTreeMap<CorrelationMethod, DyadicNetwork>,
    candidates: Option<CandidateSet>,
    validated: Option<Vec<ValidatedHyperedge>>,
    report: Option<StageReport>,
    summary: LayerSummary,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: Option<ManifestFile>,
    pub output_dir: PathBuf,
}

/// Run the whole pipeline (network through metrics).
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunOutcome> {
    run_stages(cfg, PipelineStage::Network, PipelineStage::Metrics)
}

/// Run stages `from..=to`; stages before `from` are loaded from the
/// artifacts already present in the output directory.
pub fn run_stages(
    cfg: &PipelineConfig,
    from: PipelineStage,
    to: PipelineStage,
) -> Result<RunOutcome> {
    cfg.validate()?;
    if from > to {
        return Err(Error::Config(format!(
            "stage range inverted: {} after {}",
            from.name(),
            to.name()
        )));
    }
    let mut staging = Staging::new();
    let result = execute(cfg, from, to, &mut staging);
    match result {
        Ok(manifest) => {
            staging.flush(&cfg.output_dir)?;
            Ok(RunOutcome {
                manifest,
                output_dir: cfg.output_dir.clone(),
            })
        }
        Err(e) => {
            // partial artifacts land under failed/ so a broken run never
            // masquerades as a complete tree
            staging.add(
                "error.json",
                serde_json::to_string_pretty(&serde_json::json!({
                    "error": e.to_string(),
                    "exit_code": e.exit_code(),
                }))
                .expect("serializable")
                    + "\n",
            );
            let failed_root = cfg.output_dir.join("failed");
            if let Err(flush_err) = staging.flush(&failed_root) {
                log::error!("could not write partial artifacts: {flush_err}");
            }
            Err(e)
        }
    }
}

fn execute(
    cfg: &PipelineConfig,
    from: PipelineStage,
    to: PipelineStage,
    staging: &mut Staging,
) -> Result<Option<ManifestFile>> {
    let stamp = Stamp::new(cfg.config_hash());
    let deriver = SeedDeriver::new(cfg.seed);

    // datasets and copula scores are always needed and cheap to recompute
    let mut layers: Vec<LayerCtx> = Vec::with_capacity(cfg.layers.len());
    for spec in &cfg.layers {
        let data = io::read_dataset_csv(&spec.dataset, &spec.id)?;
        let scores = copula_transform(&data, None)
            .map_err(|e| with_context(e, &spec.id, PipelineStage::Network))?;
        let mut summary = LayerSummary {
            n_respondents: data.n_respondents(),
            n_items: data.n_items(),
            ..Default::default()
        };
        summary
            .seeds
            .insert("validation".into(), deriver.subseed(&["validation", &spec.id]));
        summary
            .seeds
            .insert("subscale".into(), deriver.subseed(&["subscale", &spec.id]));
        layers.push(LayerCtx {
            spec: spec.clone(),
            data,
            scores,
            networks: BTreeMap::new(),
            candidates: None,
            validated: None,
            report: None,
            summary,
        });
    }
    // the multiplex needs one shared node set
    let node_ids = layers[0].data.item_ids().to_vec();
    for l in &layers[1..] {
        if l.data.item_ids() != node_ids.as_slice() {
            return Err(Error::Schema(format!(
                "layer {:?} has a different item set than layer {:?}; the multiplex needs one shared node set",
                l.spec.id, layers[0].spec.id
            )));
        }
    }
    let scale_map: Option<ScaleMap> = match &cfg.scale_map {
        Some(path) => Some(io::read_scale_map(path, node_ids.len())?),
        None => None,
    };

    // -- network ------------------------------------------------------------
    if stage_active(PipelineStage::Network, from, to) {
        for layer in &mut layers {
            run_network_stage(cfg, layer, &stamp)
                .map_err(|e| with_context(e, &layer.spec.id.clone(), PipelineStage::Network))?;
            for (method, net) in &layer.networks {
                staging.add(
                    format!("layers/{}/network_{}.tsv", layer.spec.id, method),
                    io::render_network_tsv(net, &stamp),
                );
                staging.add(
                    format!("layers/{}/network_{}.meta.json", layer.spec.id, method),
                    io::render_network_meta(net, *method, &stamp),
                );
            }
        }
    } else if from > PipelineStage::Network {
        // resuming past the network stage: recover edge lists when the
        // candidate stage needs them, and the summaries either way so the
        // manifest stays complete
        let required = needs_networks(from, to);
        for layer in &mut layers {
            load_networks(cfg, layer, required)
                .map_err(|e| with_context(e, &layer.spec.id.clone(), PipelineStage::Network))?;
        }
    }

    // -- candidates -----------------------------------------------------------
    if stage_active(PipelineStage::Candidates, from, to) {
        for layer in &mut layers {
            run_candidate_stage(cfg, layer, scale_map.as_ref(), &deriver)
                .map_err(|e| with_context(e, &layer.spec.id.clone(), PipelineStage::Candidates))?;
            staging.add(
                format!("layers/{}/candidates.jsonl", layer.spec.id),
                io::render_candidates_jsonl(layer.candidates.as_ref().unwrap()),
            );
        }
    } else if from > PipelineStage::Candidates {
        // the validate stage needs the pool itself; the manifest only needs
        // its summary, so a missing file is fatal only in the first case
        let required = needs_candidates(from, to);
        for layer in &mut layers {
            let path = cfg
                .output_dir
                .join(format!("layers/{}/candidates.jsonl", layer.spec.id));
            let text = match std::fs::read_to_string(&path) {
                Ok(text) => text,
                Err(e) if required => {
                    return Err(Error::Data(format!(
                        "cannot resume: candidates for layer {:?} missing at {} ({e})",
                        layer.spec.id,
                        path.display()
                    )))
                }
                Err(_) => continue,
            };
            let pool = io::parse_candidates_jsonl(
                &text,
                layer.data.n_items(),
                cfg.candidates.k_min,
                cfg.candidates.k_max,
            )?;
            layer.summary.candidates = Some(summarize_candidates(&pool));
            layer.candidates = Some(pool);
        }
    }

    // -- validate -------------------------------------------------------------
    if stage_active(PipelineStage::Validate, from, to) {
        for layer in &mut layers {
            run_validate_stage(cfg, layer, &deriver, &stamp, staging)
                .map_err(|e| with_context(e, &layer.spec.id.clone(), PipelineStage::Validate))?;
        }
    } else if from > PipelineStage::Validate {
        for layer in &mut layers {
            let path = cfg
                .output_dir
                .join(format!("layers/{}/hyperedges.json", layer.spec.id));
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Data(format!(
                    "cannot resume: hyperedges for layer {:?} missing at {} ({e})",
                    layer.spec.id,
                    path.display()
                ))
            })?;
            layer.validated = Some(io::parse_hyperedges_json(&text, layer.data.n_items())?);
            let meta_path = cfg
                .output_dir
                .join(format!("layers/{}/validation.meta.json", layer.spec.id));
            if let Ok(meta_text) = std::fs::read_to_string(&meta_path) {
                let meta: ValidationMeta = serde_json::from_str(&meta_text)
                    .map_err(|e| Error::Schema(format!("{}: {e}", meta_path.display())))?;
                layer.summary.validation = Some(ValidationSummary {
                    candidates: meta.n_candidates,
                    stage1_passed: meta.stage1_passed,
                    stage2_passed: meta.stage2_passed,
                    stage3_passed: meta.stage3_passed,
                });
            }
        }
    }

    // -- multiplex ------------------------------------------------------------
    let mut muxes: BTreeMap<InteractionType, MultiplexHypergraph> = BTreeMap::new();
    if stage_active(PipelineStage::Multiplex, from, to) {
        for ty in [InteractionType::Synergy, InteractionType::Redundancy] {
            let mut mux = MultiplexHypergraph::new(node_ids.clone(), ty);
            for layer in &layers {
                let edges: Vec<ValidatedHyperedge> = layer
                    .validated
                    .as_ref()
                    .expect("validation ran or was loaded")
                    .iter()
                    .filter(|e| e.interaction_type == ty)
                    .cloned()
                    .collect();
                mux.insert_layer(layer.spec.id.clone(), edges)
                    .map_err(|e| with_context(e, &layer.spec.id, PipelineStage::Multiplex))?;
            }
            staging.add(
                format!("multiplex_{ty}.json"),
                io::render_multiplex_json(&mux, cfg.validation.effect_floor, &stamp),
            );
            muxes.insert(ty, mux);
        }
        for layer in &mut layers {
            let mut counts = BTreeMap::new();
            for (ty, mux) in &muxes {
                counts.insert(ty.to_string(), mux.layers()[&layer.spec.id].len());
            }
            layer.summary.hyperedges = Some(counts);
        }
    } else if from > PipelineStage::Multiplex {
        for ty in [InteractionType::Synergy, InteractionType::Redundancy] {
            let path = cfg.output_dir.join(format!("multiplex_{ty}.json"));
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Data(format!(
                    "cannot resume: multiplex missing at {} ({e})",
                    path.display()
                ))
            })?;
            muxes.insert(ty, io::parse_multiplex_json(&text)?);
        }
        for layer in &mut layers {
            let mut counts = BTreeMap::new();
            for (ty, mux) in &muxes {
                if let Some(edges) = mux.layers().get(&layer.spec.id) {
                    counts.insert(ty.to_string(), edges.len());
                }
            }
            if !counts.is_empty() {
                layer.summary.hyperedges = Some(counts);
            }
        }
    }

    // -- metrics --------------------------------------------------------------
    if stage_active(PipelineStage::Metrics, from, to) {
        for (ty, mux) in &muxes {
            let profile = weighted_degrees(mux);
            let nswd_scores = scale_map.as_ref().map(|m| nswd(&profile, m));
            let patterns = scale_map.as_ref().map(|m| extract_patterns(mux, m));
            for (layer_id, degrees) in &profile.layers {
                staging.add(
                    format!("metrics/{layer_id}_{ty}_degrees.tsv"),
                    io::render_degrees_tsv(degrees, scale_map.as_ref(), &stamp),
                );
                if let Some(scores) = &nswd_scores {
                    if let Some(layer_scores) = scores.get(layer_id) {
                        staging.add(
                            format!("metrics/{layer_id}_{ty}_nswd.tsv"),
                            io::render_nswd_tsv(layer_scores, &stamp),
                        );
                    }
                }
                if let Some(pats) = &patterns {
                    if let Some(layer_pats) = pats.get(layer_id) {
                        staging.add(
                            format!("metrics/{layer_id}_{ty}_patterns.tsv"),
                            io::render_patterns_tsv(layer_pats, &stamp),
                        );
                    }
                }
            }
        }
    }

    // -- manifest ---------------------------------------------------------------
    if to == PipelineStage::Metrics {
        let mut manifest = ManifestFile {
            version: stamp.version.clone(),
            config_sha256: stamp.config_sha256.clone(),
            seed: cfg.seed,
            layers: BTreeMap::new(),
            multiplex: BTreeMap::new(),
            recovery: BTreeMap::new(),
        };
        for (ty, mux) in &muxes {
            manifest.multiplex.insert(
                ty.to_string(),
                mux.layers()
                    .iter()
                    .map(|(id, edges)| (id.clone(), edges.len()))
                    .collect(),
            );
        }
        for layer in &mut layers {
            if let Some(gt_path) = &layer.spec.ground_truth {
                let text = std::fs::read_to_string(gt_path).map_err(|e| {
                    Error::Data(format!("cannot read ground truth {}: {e}", gt_path.display()))
                })?;
                let gt = io::parse_ground_truth(&text)?;
                if let Some(validated) = &layer.validated {
                    manifest.recovery.insert(
                        layer.spec.id.clone(),
                        recovery_summary(&gt, validated, cfg.validation.effect_floor, layer.data.n_items())?,
                    );
                }
            }
            manifest
                .layers
                .insert(layer.spec.id.clone(), layer.summary.clone());
        }
        staging.add(
            "manifest.json",
            serde_json::to_string_pretty(&manifest).expect("serializable") + "\n",
        );
        return Ok(Some(manifest));
    }
    Ok(None)
}

fn stage_active(stage: PipelineStage, from: PipelineStage, to: PipelineStage) -> bool {
    stage >= from && stage <= to
}

fn needs_networks(from: PipelineStage, to: PipelineStage) -> bool {
    // only the candidate stage consumes networks
    stage_active(PipelineStage::Candidates, from, to)
}

fn needs_candidates(from: PipelineStage, to: PipelineStage) -> bool {
    stage_active(PipelineStage::Validate, from, to)
}

fn run_network_stage(cfg: &PipelineConfig, layer: &mut LayerCtx, _stamp: &Stamp) -> Result<()> {
    for &method in &cfg.correlation.methods {
        let corr: CorrelationEstimate = match method {
            CorrelationMethod::Nonparanormal => {
                nonparanormal_corr_with(&layer.data, cfg.correlation.nonparanormal_variant)?
            }
            CorrelationMethod::Polychoric => polychoric_corr(&layer.data)?,
        };
        let grid = default_lambda_grid(&corr, cfg.glasso.grid_size, cfg.glasso.grid_min_ratio);
        let net = ebic_glasso(&corr, layer.data.n_respondents(), cfg.glasso.gamma, &grid)?;
        layer.summary.networks.insert(
            method.to_string(),
            NetworkSummary {
                lambda_selected: net.lambda_selected,
                n_edges: net.n_edges(),
                n_components: net.n_components(),
            },
        );
        layer.networks.insert(method, net);
    }
    Ok(())
}

fn load_networks(cfg: &PipelineConfig, layer: &mut LayerCtx, required: bool) -> Result<()> {
    for &method in &cfg.correlation.methods {
        let base = cfg
            .output_dir
            .join(format!("layers/{}/network_{}", layer.spec.id, method));
        let meta_path = base.with_extension("meta.json");
        let tsv_path = base.with_extension("tsv");
        let meta_text = match std::fs::read_to_string(&meta_path) {
            Ok(text) => text,
            Err(e) if required => {
                return Err(Error::Data(format!(
                    "cannot resume: network sidecar missing at {} ({e})",
                    meta_path.display()
                )))
            }
            Err(_) => continue, // manifest just omits this network
        };
        let meta: NetworkMeta = serde_json::from_str(&meta_text)
            .map_err(|e| Error::Schema(format!("{}: {e}", meta_path.display())))?;
        layer.summary.networks.insert(
            method.to_string(),
            NetworkSummary {
                lambda_selected: meta.lambda_selected,
                n_edges: meta.n_edges,
                n_components: meta.n_components,
            },
        );
        if required {
            let tsv = std::fs::read_to_string(&tsv_path).map_err(|e| {
                Error::Data(format!(
                    "cannot resume: network edges missing at {} ({e})",
                    tsv_path.display()
                ))
            })?;
            layer.networks.insert(method, io::parse_network_tsv(&tsv, &meta)?);
        }
    }
    Ok(())
}

fn run_candidate_stage(
    cfg: &PipelineConfig,
    layer: &mut LayerCtx,
    scale_map: Option<&ScaleMap>,
    deriver: &SeedDeriver,
) -> Result<()> {
    let settings = &cfg.candidates;
    let mut pool = CandidateSet::new(settings.k_min, settings.k_max)?;
    // network-based candidates first: they take provenance priority
    for (&method, net) in &layer.networks {
        if net.n_edges() == 0 {
            log::warn!(
                "layer {:?}: {method} network has no edges; no network candidates",
                layer.spec.id
            );
            continue;
        }
        let comm = spinglass_communities(
            net,
            &settings.spinglass.options(),
            deriver.subseed(&["spinglass", &layer.spec.id, &method.to_string()]),
        );
        let seeds = maximal_cliques(
            net,
            settings.k_min,
            settings.k_max,
            settings.positive_only_cliques,
        )?;
        let expanded = expand_seeds(
            &seeds,
            net,
            &comm,
            &ExpansionOptions {
                k_min: settings.k_min,
                k_max: settings.k_max,
                top_m: settings.top_m,
                min_gain: settings.min_gain,
            },
        )?;
        pool.merge(expanded)?;
    }
    if let Some(map) = scale_map {
        let sub = subscale_candidates(
            map,
            &SubscaleOptions {
                k_min: settings.k_min,
                k_max: settings.k_max,
                sample_per_pair: settings.sample_per_pair,
                intra_cap: settings.intra_cap,
            },
            deriver.subseed(&["subscale", &layer.spec.id]),
        )?;
        pool.merge(sub)?;
    }
    layer.summary.candidates = Some(summarize_candidates(&pool));
    layer.candidates = Some(pool);
    Ok(())
}

fn summarize_candidates(pool: &CandidateSet) -> CandidateSummary {
    let mut summary = CandidateSummary {
        total: pool.len(),
        ..Default::default()
    };
    for (m, prov) in pool.iter() {
        *summary.by_order.entry(m.order()).or_default() += 1;
        *summary.by_provenance.entry(prov.to_string()).or_default() += 1;
    }
    summary
}

fn run_validate_stage(
    cfg: &PipelineConfig,
    layer: &mut LayerCtx,
    deriver: &SeedDeriver,
    stamp: &Stamp,
    staging: &mut Staging,
) -> Result<()> {
    let candidates = layer
        .candidates
        .as_ref()
        .ok_or_else(|| Error::Data("candidate stage did not run".into()))?;
    let vcfg = cfg
        .validation
        .config(deriver.subseed(&["validation", &layer.spec.id]));
    let (validated, report) = validate_all(&layer.scores, candidates, &vcfg)?;
    layer.summary.validation = Some(ValidationSummary {
        candidates: candidates.len(),
        stage1_passed: report.n_passed(StageId::Permutation),
        stage2_passed: report.n_passed(StageId::Bootstrap),
        stage3_passed: report.n_passed(StageId::Hierarchy),
    });
    staging.add(
        format!("layers/{}/validation_report.tsv", layer.spec.id),
        io::render_stage_report_tsv(&report, stamp),
    );
    staging.add(
        format!("layers/{}/validation.meta.json", layer.spec.id),
        io::render_validation_meta(&ValidationMeta {
            version: stamp.version.clone(),
            config_sha256: stamp.config_sha256.clone(),
            layer: layer.spec.id.clone(),
            validation: vcfg,
            n_candidates: candidates.len(),
            stage1_passed: report.n_passed(StageId::Permutation),
            stage2_passed: report.n_passed(StageId::Bootstrap),
            stage3_passed: report.n_passed(StageId::Hierarchy),
        }),
    );
    staging.add(
        format!("layers/{}/hyperedges.json", layer.spec.id),
        io::render_hyperedges_json(&layer.spec.id, &validated, cfg.validation.effect_floor, stamp),
    );
    layer.validated = Some(validated);
    layer.report = Some(report);
    Ok(())
}

fn recovery_summary(
    gt: &GroundTruthFile,
    validated: &[ValidatedHyperedge],
    effect_floor: f64,
    n_items: usize,
) -> Result<RecoverySummary> {
    let mut summary = RecoverySummary {
        planted: gt.blocks.len(),
        ..Default::default()
    };
    let mut planted_sets = std::collections::BTreeSet::new();
    for block in &gt.blocks {
        let m = block.multiplet(n_items)?;
        if block.analytic_omega.abs() >= effect_floor {
            summary.planted_above_floor += 1;
        }
        if let Some(found) = validated.iter().find(|e| e.multiplet == m) {
            summary.validated_planted += 1;
            if (found.omega > 0.0) == (block.analytic_omega > 0.0) {
                summary.sign_matches += 1;
            }
        }
        planted_sets.insert(m);
    }
    summary.other_validated = validated
        .iter()
        .filter(|e| !planted_sets.contains(&e.multiplet))
        .count();
    Ok(summary)
}
