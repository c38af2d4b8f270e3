//! Serialisation of results to CSV, JSON, DOT and SVG.
//!
//! Every numeric artifact carries a [`Stamp`]: CSV files start with
//! `# config_hash=… ` / `# seed=…` lines, JSON documents hold the same two
//! fields, DOT and SVG files carry them in a comment.

pub mod svg;

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::archetypoids::{AdaModel, Screeplot};
use crate::comparators::{CitationGraph, MedoidClustering, UnfoldingSolution};
use crate::error::Result;
use crate::hplot::{AsymmetryReport, HPlotEmbedding};
use crate::io::{csv_field, directive_header, fmt_num};

/// Identifies the configuration that produced an artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stamp {
    pub config_hash: String,
    pub seed: u64,
}

impl Stamp {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Self {
            config_hash: config_hash.into(),
            seed,
        }
    }

    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("config_hash", self.config_hash.clone()),
            ("seed", self.seed.to_string()),
        ]
    }

    fn csv_header(&self) -> String {
        directive_header(&self.pairs())
    }

    fn inline(&self) -> String {
        format!("config_hash={} seed={}", self.config_hash, self.seed)
    }
}

fn stamped_json(stamp: &Stamp, body: Value) -> Result<String> {
    let mut doc = serde_json::Map::new();
    doc.insert("config_hash".into(), json!(stamp.config_hash));
    doc.insert("seed".into(), json!(stamp.seed));
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc))?;
    s.push('\n');
    Ok(s)
}

/// `label,role,x,y` (further dimensions as `dim3`, `dim4`, …).
pub fn embedding_csv(emb: &HPlotEmbedding, stamp: &Stamp) -> String {
    let n = emb.n();
    let p = emb.dim();
    let mut s = stamp.csv_header();
    s.push_str("label,role");
    for k in 0..p {
        match k {
            0 => s.push_str(",x"),
            1 => s.push_str(",y"),
            _ => {
                let _ = write!(s, ",dim{}", k + 1);
            }
        }
    }
    s.push('\n');
    for r in 0..2 * n {
        let role = if r < n { "to" } else { "from" };
        let _ = write!(s, "{},{role}", csv_field(&emb.labels()[r % n]));
        for k in 0..p {
            let _ = write!(s, ",{}", fmt_num(emb.coords()[(r, k)]));
        }
        s.push('\n');
    }
    s
}

pub fn embedding_json(emb: &HPlotEmbedding, stamp: &Stamp) -> Result<String> {
    stamped_json(
        stamp,
        json!({
            "dim": emb.dim(),
            "gof": emb.gof(),
            "spectrum": emb.eigenvalues(),
            "labels": emb.labels(),
        }),
    )
}

/// `rank,label,score`, most asymmetric first.
pub fn asymmetry_csv(report: &AsymmetryReport, stamp: &Stamp) -> String {
    let mut s = stamp.csv_header();
    s.push_str("rank,label,score\n");
    for (r, a) in report.scores.iter().enumerate() {
        let _ = writeln!(s, "{},{},{}", r + 1, csv_field(&a.label), fmt_num(a.score));
    }
    s
}

pub fn model_json(model: &AdaModel, labels: &[String], stamp: &Stamp) -> Result<String> {
    let alpha: Vec<Vec<f64>> = model
        .alpha
        .row_iter()
        .map(|r| r.iter().copied().collect())
        .collect();
    let arch_labels: Vec<&str> = model
        .archetypoid_indices
        .iter()
        .map(|&i| labels[i].as_str())
        .collect();
    stamped_json(
        stamp,
        json!({
            "k": model.k(),
            "archetypoid_labels": arch_labels,
            "archetypoid_indices": model.archetypoid_indices,
            "alpha": alpha,
            "rss": model.rss,
            "trace": model.trace,
            "iteration_capped": model.iteration_capped,
            "labels": labels,
        }),
    )
}

/// `k,rss,envelope`, with the suggested elbow as a directive.
pub fn screeplot_csv(scree: &Screeplot, stamp: &Stamp) -> String {
    let mut s = stamp.csv_header();
    if let Some(e) = scree.elbow {
        let _ = writeln!(s, "# elbow={e}");
    }
    s.push_str("k,rss,envelope\n");
    for p in &scree.points {
        let _ = writeln!(s, "{},{},{}", p.k, fmt_num(p.rss), fmt_num(p.envelope));
    }
    s
}

/// Both point sets of every solution, one row per point.
pub fn unfolding_csv(solutions: &[UnfoldingSolution], stamp: &Stamp) -> String {
    let mut s = stamp.csv_header();
    s.push_str("role_order,set,label,x,y\n");
    for sol in solutions {
        for (set, m) in [("individual", &sol.x1), ("object", &sol.x2)] {
            for (i, label) in sol.labels.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{set},{},{},{}",
                    sol.role_order.as_str(),
                    csv_field(label),
                    fmt_num(m[(i, 0)]),
                    fmt_num(m[(i, 1)])
                );
            }
        }
    }
    s
}

pub fn unfolding_json(solutions: &[UnfoldingSolution], stamp: &Stamp) -> Result<String> {
    let runs: Vec<Value> = solutions
        .iter()
        .map(|sol| {
            json!({
                "role_order": sol.role_order.as_str(),
                "stress": sol.stress,
                "converged": sol.converged,
                "restarts_used": sol.restarts_used,
                "best_restart": sol.best_restart,
                "restart_final_stress": sol.runs.iter().map(|r| r.final_stress()).collect::<Vec<_>>(),
                "restart_iterations": sol.runs.iter().map(|r| r.trace.len() - 1).collect::<Vec<_>>(),
            })
        })
        .collect();
    stamped_json(stamp, json!({ "solutions": runs }))
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn graph_dot(graph: &CitationGraph, stamp: &Stamp) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "// {}", stamp.inline());
    let _ = writeln!(s, "// threshold={}", fmt_num(graph.threshold));
    s.push_str("digraph citations {\n");
    for (i, l) in graph.labels.iter().enumerate() {
        match &graph.layout {
            Some(pos) => {
                let _ = writeln!(
                    s,
                    "  n{i} [label={}, pos=\"{},{}\"];",
                    dot_id(l),
                    fmt_num(pos[i][0]),
                    fmt_num(pos[i][1])
                );
            }
            None => {
                let _ = writeln!(s, "  n{i} [label={}];", dot_id(l));
            }
        }
    }
    for e in &graph.edges {
        let _ = writeln!(
            s,
            "  n{} -> n{} [weight={}];",
            e.source,
            e.target,
            fmt_num(e.weight)
        );
    }
    s.push_str("}\n");
    s
}

pub fn graph_json(graph: &CitationGraph, stamp: &Stamp) -> Result<String> {
    let isolated: Vec<&str> = graph
        .isolated_nodes()
        .into_iter()
        .map(|i| graph.labels[i].as_str())
        .collect();
    stamped_json(
        stamp,
        json!({
            "threshold": graph.threshold,
            "labels": graph.labels,
            "edges": graph.edges,
            "isolated": isolated,
            "layout": graph.layout,
        }),
    )
}

/// `k,average_silhouette`.
pub fn silhouette_csv(results: &[MedoidClustering], stamp: &Stamp) -> String {
    let mut s = stamp.csv_header();
    s.push_str("k,average_silhouette\n");
    for c in results {
        let _ = writeln!(s, "{},{}", c.k, fmt_num(c.average_silhouette));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparators::build_network;
    use crate::hplot::{asymmetry_scores, embed};
    use crate::ingest::Dissimilarity;
    use crate::io::read_directives;

    fn stamp() -> Stamp {
        Stamp::new("abc123", 7)
    }

    fn delta() -> Dissimilarity {
        Dissimilarity::from_rows(&[vec![1.0, 2.0, 4.0], vec![3.0, 1.0, 5.0], vec![6.0, 2.5, 1.0]]).unwrap()
    }

    #[test]
    fn csv_artifacts_carry_the_stamp() {
        let emb = embed(&delta(), 2).unwrap();
        for text in [
            embedding_csv(&emb, &stamp()),
            asymmetry_csv(&asymmetry_scores(&emb), &stamp()),
        ] {
            let d = read_directives(&text);
            assert_eq!(d["config_hash"], "abc123");
            assert_eq!(d["seed"], "7");
        }
    }

    #[test]
    fn embedding_csv_has_one_row_per_profile() {
        let emb = embed(&delta(), 2).unwrap();
        let text = embedding_csv(&emb, &stamp());
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "label,role,x,y");
        assert_eq!(rows.len(), 7);
        assert!(rows[1].starts_with("1,to,"));
        assert!(rows[4].starts_with("1,from,"));
    }

    #[test]
    fn json_artifacts_carry_the_stamp() {
        let emb = embed(&delta(), 2).unwrap();
        let v: Value = serde_json::from_str(&embedding_json(&emb, &stamp()).unwrap()).unwrap();
        assert_eq!(v["config_hash"], "abc123");
        assert_eq!(v["seed"], 7);
        assert_eq!(v["spectrum"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn dot_escapes_labels() {
        let d = Dissimilarity::with_max_rank(
            vec!["a\"b".into(), "c".into()],
            nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 1.0]),
            3.0,
        )
        .unwrap();
        let g = build_network(&d, 2.0).unwrap();
        let dot = graph_dot(&g, &stamp());
        assert!(dot.contains("label=\"a\\\"b\""));
        assert!(dot.contains("n0 -> n1 [weight=2];"));
    }
}
