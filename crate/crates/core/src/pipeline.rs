//! Staged runs that read inputs, fit every model and write artifacts plus a
//! manifest.
//!
//! Output tree under `out_dir`:
//!
//! ```text
//! manifest.json
//! ingest/   dissimilarity.csv, provenance.json
//! hplot/    embedding.csv, embedding.json, asymmetry.csv, hplot.svg
//! ada/      model_k{k}.json, screeplot.csv, screeplot.svg, ternary_k3.svg,
//!           hplot_archetypoids.svg, exhaustive.json
//! compare/  unfolding.{csv,json,svg}, network.{dot,json,svg},
//!           silhouette.csv, report.json
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::archetypoids::{
    ada_exhaustive, combine_profiles, screeplot, AdaModel, DataMatrix, DEFAULT_BUDGET,
};
use crate::comparators::medoids::best_by_silhouette;
use crate::comparators::{build_network, kmedoids_silhouette, unfolding_fit, RoleOrder, UnfoldingOptions};
use crate::error::{Error, Result};
use crate::export::{self, svg, Stamp};
use crate::hplot::{asymmetry_scores, embed, HPlotEmbedding};
use crate::ingest::{compute_relatedness, rank_transform, CitationTable, Dissimilarity, RankProvenance};
use crate::io::{self, dissimilarity_to_csv};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_THRESHOLD: f64 = 100.0;
pub const DEFAULT_RESTARTS: usize = 20;
const DEFAULT_MAX_K: usize = 10;
const SILHOUETTE_MAX_K: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::InvalidInput(format!(
                "unknown format `{other}` (expected csv, json or svg)"
            ))),
        }
    }
}

/// Inclusive range of k values, written `A..B` or `A..=B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
}

impl KRange {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

impl FromStr for KRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("k range `{s}` must look like A..B"));
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let b = b.strip_prefix('=').unwrap_or(b);
        let start: usize = a.trim().parse().map_err(|_| bad())?;
        let end: usize = b.trim().parse().map_err(|_| bad())?;
        if start == 0 || start > end {
            return Err(Error::InvalidInput(format!(
                "k range `{s}` must be nonempty and start at 1 or more"
            )));
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Hplot,
    Ada,
    Compare,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Hplot => "hplot",
            Stage::Ada => "ada",
            Stage::Compare => "compare",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// One dissimilarity CSV, one citation-table JSON, or a count CSV
    /// followed by its `label,papers,refs` CSV.
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub k: Option<usize>,
    pub k_range: Option<KRange>,
    pub exhaustive: bool,
    pub budget: u128,
    pub restarts: usize,
    pub seed: u64,
    pub threshold: f64,
    /// Formats to write; empty means all.
    pub formats: Vec<Format>,
}

impl PipelineConfig {
    pub fn new(inputs: Vec<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            inputs,
            out_dir: out_dir.into(),
            k: None,
            k_range: None,
            exhaustive: false,
            budget: DEFAULT_BUDGET,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            threshold: DEFAULT_THRESHOLD,
            formats: Vec::new(),
        }
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.is_empty() || self.formats.contains(&f)
    }

    fn input_kind(&self) -> Result<InputKind> {
        for p in &self.inputs {
            if !p.is_file() {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
                ));
            }
        }
        let is_json = |p: &Path| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        match self.inputs.as_slice() {
            [one] if is_json(one) => Ok(InputKind::CitationJson(one.clone())),
            [one] => Ok(InputKind::Dissimilarity(one.clone())),
            [cites, meta] => Ok(InputKind::CitationCsv(cites.clone(), meta.clone())),
            [] => Err(Error::InvalidInput("no input file given".into())),
            _ => Err(Error::InvalidInput(format!(
                "expected one or two input files, got {}",
                self.inputs.len()
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(0) = self.k {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "threshold must be positive, got {}",
                self.threshold
            )));
        }
        Ok(())
    }

    /// SHA-256 over the inputs' contents and every setting that affects
    /// results. The output directory is left out.
    pub fn config_hash(&self, command: &str) -> Result<String> {
        let mut inputs = Vec::with_capacity(self.inputs.len());
        for p in &self.inputs {
            let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
            inputs.push(hex(&Sha256::digest(&bytes)));
        }
        let formats: BTreeSet<&str> = if self.formats.is_empty() {
            [Format::Csv, Format::Json, Format::Svg]
                .iter()
                .map(|f| f.as_str())
                .collect()
        } else {
            self.formats.iter().map(|f| f.as_str()).collect()
        };
        let canonical = json!({
            "tool_version": TOOL_VERSION,
            "command": command,
            "inputs": inputs,
            "k": self.k,
            "k_range": self.k_range.map(|r| [r.start, r.end]),
            "exhaustive": self.exhaustive,
            "budget": self.budget.to_string(),
            "restarts": self.restarts,
            "seed": self.seed,
            "threshold": self.threshold,
            "formats": formats,
        });
        Ok(hex(&Sha256::digest(canonical.to_string().as_bytes())))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

enum InputKind {
    Dissimilarity(PathBuf),
    CitationJson(PathBuf),
    CitationCsv(PathBuf, PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub stage: Stage,
    pub format: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub command: String,
    /// `complete`, or `partial` when a stage failed.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub manifest: Manifest,
    /// Lines meant for standard output.
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
}

/// A run that stopped early. Artifacts written before the failure stay on
/// disk and the manifest is marked partial.
#[derive(Debug)]
pub struct RunFailure {
    /// `None` when the configuration was rejected before any stage ran.
    pub stage: Option<Stage>,
    pub error: Error,
    pub report: Option<Box<RunReport>>,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stage {
            Some(s) => write!(f, "{s} stage failed: {}", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        Self {
            stage: None,
            error,
            report: None,
        }
    }
}

pub type RunResult = std::result::Result<RunReport, RunFailure>;

/// Rank-transform a citation table and write the dissimilarity matrix with
/// its provenance.
pub fn cmd_ingest(cfg: &PipelineConfig) -> RunResult {
    run(cfg, "ingest", &[Stage::Ingest])
}

/// Embed the matrix; prints `gof = …` and the asymmetry extremes.
pub fn cmd_hplot(cfg: &PipelineConfig) -> RunResult {
    run(cfg, "hplot", &[Stage::Hplot])
}

/// Fit archetypoids on the combined profiles for every requested k.
pub fn cmd_ada(cfg: &PipelineConfig) -> RunResult {
    run(cfg, "ada", &[Stage::Ada])
}

/// Unfolding in both role orders, the thresholded network and silhouettes.
pub fn cmd_compare(cfg: &PipelineConfig) -> RunResult {
    run(cfg, "compare", &[Stage::Compare])
}

/// Every stage in order. Ingest is skipped when the input is already a
/// dissimilarity matrix.
pub fn cmd_pipeline(cfg: &PipelineConfig) -> RunResult {
    let stages: &[Stage] = match cfg.input_kind()? {
        InputKind::Dissimilarity(_) => &[Stage::Hplot, Stage::Ada, Stage::Compare],
        _ => &[Stage::Ingest, Stage::Hplot, Stage::Ada, Stage::Compare],
    };
    run(cfg, "pipeline", stages)
}

fn run(cfg: &PipelineConfig, command: &str, stages: &[Stage]) -> RunResult {
    cfg.validate()?;
    let kind = cfg.input_kind()?;
    let hash = cfg.config_hash(command)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;

    let mut ctx = Context {
        cfg,
        kind,
        stamp: Stamp::new(hash.clone(), cfg.seed),
        artifacts: Vec::new(),
        messages: Vec::new(),
        warnings: Vec::new(),
        table: None,
        delta: None,
        embedding: None,
        combined: None,
    };
    let mut failure = None;
    for &stage in stages {
        let r = match stage {
            Stage::Ingest => ctx.ingest(),
            Stage::Hplot => ctx.hplot(),
            Stage::Ada => ctx.ada(),
            Stage::Compare => ctx.compare(),
        };
        if let Err(e) = r {
            failure = Some((stage, e));
            break;
        }
    }
    let manifest = Manifest {
        tool_version: TOOL_VERSION.into(),
        config_hash: hash,
        seed: cfg.seed,
        command: command.into(),
        status: if failure.is_some() { "partial" } else { "complete" }.into(),
        failed_stage: failure.as_ref().map(|(s, _)| *s),
        error: failure.as_ref().map(|(_, e)| e.to_string()),
        artifacts: std::mem::take(&mut ctx.artifacts),
    };
    let report = RunReport {
        manifest,
        messages: ctx.messages,
        warnings: ctx.warnings,
    };
    let mut text = serde_json::to_string_pretty(&report.manifest).map_err(Error::from)?;
    text.push('\n');
    let path = cfg.out_dir.join("manifest.json");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    match failure {
        None => Ok(report),
        Some((stage, error)) => Err(RunFailure {
            stage: Some(stage),
            error,
            report: Some(Box::new(report)),
        }),
    }
}

struct Context<'a> {
    cfg: &'a PipelineConfig,
    kind: InputKind,
    stamp: Stamp,
    artifacts: Vec<Artifact>,
    messages: Vec<String>,
    warnings: Vec<String>,
    table: Option<CitationTable>,
    delta: Option<Dissimilarity>,
    embedding: Option<HPlotEmbedding>,
    combined: Option<DataMatrix>,
}

impl Context<'_> {
    fn emit(&mut self, stage: Stage, name: &str, format: Format, content: &str) -> Result<()> {
        self.emit_as(stage, name, format, format.as_str(), content)
    }

    /// Write `content` if `gate` is among the selected formats.
    fn emit_as(&mut self, stage: Stage, name: &str, gate: Format, label: &str, content: &str) -> Result<()> {
        if !self.cfg.wants(gate) {
            return Ok(());
        }
        self.write_always(stage, name, label, content)
    }

    fn write_always(&mut self, stage: Stage, name: &str, label: &str, content: &str) -> Result<()> {
        let dir = self.cfg.out_dir.join(stage.as_str());
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(name);
        fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        self.artifacts.push(Artifact {
            path: format!("{}/{name}", stage.as_str()),
            stage,
            format: label.into(),
            sha256: hex(&Sha256::digest(content.as_bytes())),
        });
        Ok(())
    }

    fn table(&mut self) -> Result<Option<&CitationTable>> {
        if self.table.is_none() {
            self.table = match &self.kind {
                InputKind::Dissimilarity(_) => None,
                InputKind::CitationJson(p) => Some(io::load_citation_json(p)?),
                InputKind::CitationCsv(c, m) => Some(io::load_citation_csv(c, m)?),
            };
        }
        Ok(self.table.as_ref())
    }

    fn delta(&mut self) -> Result<&Dissimilarity> {
        if self.delta.is_none() {
            let delta = match &self.kind {
                InputKind::Dissimilarity(p) => io::load_dissimilarity(p)?,
                _ => {
                    let table = self.table()?.expect("citation input");
                    rank_transform(&compute_relatedness(table)?)?
                }
            };
            if delta.len() < 2 {
                return Err(Error::InvalidInput(format!(
                    "at least 2 objects are required, got {}",
                    delta.len()
                )));
            }
            self.delta = Some(delta);
        }
        Ok(self.delta.as_ref().expect("just set"))
    }

    fn embedding(&mut self) -> Result<&HPlotEmbedding> {
        if self.embedding.is_none() {
            let emb = embed(self.delta()?, 2)?;
            self.embedding = Some(emb);
        }
        Ok(self.embedding.as_ref().expect("just set"))
    }

    fn combined(&mut self) -> Result<&DataMatrix> {
        if self.combined.is_none() {
            let x = combine_profiles(self.embedding()?)?;
            self.combined = Some(x);
        }
        Ok(self.combined.as_ref().expect("just set"))
    }

    fn ingest(&mut self) -> Result<()> {
        let table = match self.table()? {
            Some(t) => t.clone(),
            None => {
                return Err(Error::InvalidInput(
                    "ingest needs a citation table (JSON, or count CSV plus meta CSV)".into(),
                ))
            }
        };
        if table.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "at least 2 objects are required, got {}",
                table.len()
            )));
        }
        let rel = compute_relatedness(&table)?;
        let delta = rank_transform(&rel)?;
        let prov = RankProvenance::new(&rel, &delta);
        let csv = dissimilarity_to_csv(&delta, &self.stamp.pairs());
        let mut body = serde_json::to_value(&prov)?;
        if let serde_json::Value::Object(m) = &mut body {
            let named: Vec<[&str; 2]> = prov
                .undefined_cells
                .iter()
                .map(|&[i, j]| [delta.labels()[i].as_str(), delta.labels()[j].as_str()])
                .collect();
            m.insert("undefined_cell_labels".into(), json!(named));
            m.insert("config_hash".into(), json!(self.stamp.config_hash));
            m.insert("seed".into(), json!(self.stamp.seed));
        }
        let mut prov_text = serde_json::to_string_pretty(&body)?;
        prov_text.push('\n');
        // the matrix and its sidecar are the stage's product, written in any format selection
        self.write_always(Stage::Ingest, "dissimilarity.csv", "csv", &csv)?;
        self.write_always(Stage::Ingest, "provenance.json", "json", &prov_text)?;
        self.messages.push(format!(
            "n = {}, max_rank = {}, sentinel = {}, undefined cells = {}, tie groups = {}",
            delta.len(),
            io::fmt_num(delta.max_rank()),
            io::fmt_num(delta.sentinel()),
            prov.undefined_count,
            prov.tie_groups
        ));
        self.delta = Some(delta);
        Ok(())
    }

    fn hplot(&mut self) -> Result<()> {
        let emb = self.embedding()?.clone();
        let report = asymmetry_scores(&emb);
        let stamp = self.stamp.clone();
        self.emit(
            Stage::Hplot,
            "embedding.csv",
            Format::Csv,
            &export::embedding_csv(&emb, &stamp),
        )?;
        self.emit(
            Stage::Hplot,
            "embedding.json",
            Format::Json,
            &export::embedding_json(&emb, &stamp)?,
        )?;
        self.emit(
            Stage::Hplot,
            "asymmetry.csv",
            Format::Csv,
            &export::asymmetry_csv(&report, &stamp),
        )?;
        self.emit(
            Stage::Hplot,
            "hplot.svg",
            Format::Svg,
            &svg::hplot_svg(&emb, None, &stamp)?,
        )?;

        self.messages.push(format!("gof = {:.3}", emb.gof()));
        let names = |idx: Vec<usize>| -> String {
            idx.iter()
                .map(|&i| emb.labels()[i].as_str())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let count = 3.min(emb.n());
        self.messages.push(format!(
            "most asymmetric: {}",
            names(report.most_asymmetric(count))
        ));
        self.messages
            .push(format!("most symmetric: {}", names(report.most_symmetric(count))));
        Ok(())
    }

    fn ada(&mut self) -> Result<()> {
        let x = self.combined()?.clone();
        let emb = self.embedding()?.clone();
        let n = x.n();
        let mut ks: BTreeSet<usize> = match self.cfg.k_range {
            Some(r) => r.iter().collect(),
            None if self.cfg.k.is_some() => BTreeSet::new(),
            None => (1..=DEFAULT_MAX_K.min(n)).collect(),
        };
        ks.extend(self.cfg.k);
        if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > n) {
            return Err(Error::InvalidInput(format!("k = {k} is outside 1..={n}")));
        }
        let (scree, models) = screeplot(&x, ks.iter().copied())?;
        let stamp = self.stamp.clone();
        let labels = x.labels().to_vec();
        for m in &models {
            let name = format!("model_k{}.json", m.k());
            self.emit(
                Stage::Ada,
                &name,
                Format::Json,
                &export::model_json(m, &labels, &stamp)?,
            )?;
            self.messages.push(format!(
                "k = {}: archetypoids {} (rss {:.6}){}",
                m.k(),
                join_labels(&labels, &m.archetypoid_indices),
                m.rss,
                if m.iteration_capped {
                    " [iteration cap reached]"
                } else {
                    ""
                }
            ));
        }
        self.emit(
            Stage::Ada,
            "screeplot.csv",
            Format::Csv,
            &export::screeplot_csv(&scree, &stamp),
        )?;
        self.emit(
            Stage::Ada,
            "screeplot.svg",
            Format::Svg,
            &svg::screeplot_svg(&scree, &stamp),
        )?;
        if let Some(e) = scree.elbow {
            self.messages.push(format!("suggested elbow: k = {e}"));
        }
        if let Some(m3) = models.iter().find(|m| m.k() == 3) {
            self.emit(
                Stage::Ada,
                "ternary_k3.svg",
                Format::Svg,
                &svg::ternary_svg(m3, &labels, &stamp)?,
            )?;
        }
        let primary = self.cfg.k.or(scree.elbow);
        if let Some(model) = primary.and_then(|k| models.iter().find(|m| m.k() == k)) {
            let text = svg::hplot_svg(&emb, Some(&model.archetypoid_indices), &stamp)?;
            self.emit(Stage::Ada, "hplot_archetypoids.svg", Format::Svg, &text)?;
        }
        if self.cfg.exhaustive {
            self.exhaustive(&x, &models)?;
        }
        Ok(())
    }

    fn exhaustive(&mut self, x: &DataMatrix, models: &[AdaModel]) -> Result<()> {
        let labels = x.labels();
        let mut rows = Vec::new();
        for m in models {
            let best = ada_exhaustive(x, m.k(), self.cfg.budget)?;
            let agrees = m.rss <= best.rss * (1.0 + 1e-9) + 1e-12;
            self.messages.push(if agrees {
                format!("k = {}: exhaustive search agrees (rss {:.6})", m.k(), best.rss)
            } else {
                format!(
                    "k = {}: exhaustive optimum {} (rss {:.6}) beats BUILD+SWAP (rss {:.6})",
                    m.k(),
                    join_labels(labels, &best.archetypoid_indices),
                    best.rss,
                    m.rss
                )
            });
            rows.push(json!({
                "k": m.k(),
                "agrees": agrees,
                "fitted_rss": m.rss,
                "exhaustive_rss": best.rss,
                "exhaustive_indices": best.archetypoid_indices,
            }));
        }
        let mut text = serde_json::to_string_pretty(&json!({
            "config_hash": self.stamp.config_hash,
            "seed": self.stamp.seed,
            "budget": self.cfg.budget.to_string(),
            "results": rows,
        }))?;
        text.push('\n');
        self.emit(Stage::Ada, "exhaustive.json", Format::Json, &text)
    }

    fn compare(&mut self) -> Result<()> {
        let delta = self.delta()?.clone();
        let stamp = self.stamp.clone();
        let opts = UnfoldingOptions {
            restarts: self.cfg.restarts,
            seed: self.cfg.seed,
            ..UnfoldingOptions::default()
        };
        let sols = [RoleOrder::RowsAsIndividuals, RoleOrder::ColumnsAsIndividuals]
            .into_iter()
            .map(|r| unfolding_fit(&delta, r, opts))
            .collect::<Result<Vec<_>>>()?;
        self.emit(
            Stage::Compare,
            "unfolding.csv",
            Format::Csv,
            &export::unfolding_csv(&sols, &stamp),
        )?;
        self.emit(
            Stage::Compare,
            "unfolding.json",
            Format::Json,
            &export::unfolding_json(&sols, &stamp)?,
        )?;
        self.emit(
            Stage::Compare,
            "unfolding.svg",
            Format::Svg,
            &svg::unfolding_svg(&sols, &stamp),
        )?;
        for s in &sols {
            self.messages.push(format!(
                "unfolding ({}): stress {:.6e}{}",
                s.role_order.as_str(),
                s.stress,
                if s.converged { "" } else { " [not converged]" }
            ));
        }

        let graph = build_network(&delta, self.cfg.threshold)?.with_layout(self.cfg.seed)?;
        if graph.edges.is_empty() {
            self.warnings.push(format!(
                "no dissimilarity is at or below the threshold {}; the network has no edges",
                self.cfg.threshold
            ));
        }
        let isolated = graph.isolated_nodes();
        self.emit_as(
            Stage::Compare,
            "network.dot",
            Format::Json,
            "dot",
            &export::graph_dot(&graph, &stamp),
        )?;
        self.emit(
            Stage::Compare,
            "network.json",
            Format::Json,
            &export::graph_json(&graph, &stamp)?,
        )?;
        self.emit(
            Stage::Compare,
            "network.svg",
            Format::Svg,
            &svg::network_svg(&graph, &stamp)?,
        )?;
        self.messages.push(format!(
            "network at threshold {}: {} edges, isolated: {}",
            io::fmt_num(self.cfg.threshold),
            graph.edges.len(),
            if isolated.is_empty() {
                "none".into()
            } else {
                join_labels(&graph.labels, &isolated)
            }
        ));

        let n = delta.len();
        let mut best_sil = None;
        if n >= 3 {
            let x = self.combined()?.clone();
            let results = kmedoids_silhouette(&x, 2..=SILHOUETTE_MAX_K.min(n - 1))?;
            self.emit(
                Stage::Compare,
                "silhouette.csv",
                Format::Csv,
                &export::silhouette_csv(&results, &stamp),
            )?;
            if results.iter().any(|c| c.degenerate) {
                self.warnings
                    .push("some silhouettes had a zero denominator and were set to 0".into());
            }
            if let Some(b) = best_by_silhouette(&results) {
                self.messages.push(format!(
                    "best average silhouette: {:.3} at k = {}",
                    b.average_silhouette, b.k
                ));
                best_sil = Some(json!({ "k": b.k, "average_silhouette": b.average_silhouette }));
            }
        } else {
            self.warnings
                .push("silhouettes need at least 3 objects; skipped".into());
        }

        let isolated_labels: Vec<&str> = isolated.iter().map(|&i| graph.labels[i].as_str()).collect();
        let mut text = serde_json::to_string_pretty(&json!({
            "config_hash": stamp.config_hash,
            "seed": stamp.seed,
            "threshold": self.cfg.threshold,
            "edge_count": graph.edges.len(),
            "isolated": isolated_labels,
            "unfolding_stress": sols.iter().map(|s| json!({
                "role_order": s.role_order.as_str(),
                "stress": s.stress,
            })).collect::<Vec<_>>(),
            "best_silhouette": best_sil,
        }))?;
        text.push('\n');
        self.emit(Stage::Compare, "report.json", Format::Json, &text)
    }
}

fn join_labels(labels: &[String], idx: &[usize]) -> String {
    idx.iter()
        .map(|&i| labels[i].as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_range_forms() {
        assert_eq!("1..10".parse::<KRange>().unwrap(), KRange { start: 1, end: 10 });
        assert_eq!("2..=4".parse::<KRange>().unwrap(), KRange { start: 2, end: 4 });
        assert!("0..3".parse::<KRange>().is_err());
        assert!("5..2".parse::<KRange>().is_err());
        assert!("3".parse::<KRange>().is_err());
    }

    #[test]
    fn formats_parse_case_insensitively() {
        assert_eq!("SVG".parse::<Format>().unwrap(), Format::Svg);
        assert!("png".parse::<Format>().is_err());
    }
}
