//! Every stage on a synthetic citation table, as the CLI runs it.
//!
//! Run: `cargo run --example full_pipeline -- [out-dir]`

use asymap::demo::synthetic_citations;
use asymap::io::CitationTableJson;
use asymap::pipeline::{cmd_pipeline, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "pipeline-demo".into()));
    std::fs::create_dir_all(&out)?;
    let input = out.join("citations.json");
    let table = CitationTableJson::from(&synthetic_citations(12, 2024));
    std::fs::write(&input, serde_json::to_string_pretty(&table)?)?;

    let mut cfg = PipelineConfig::new(vec![input], out.join("results"));
    cfg.k_range = Some("1..6".parse()?);
    cfg.exhaustive = true;
    cfg.restarts = 5;
    cfg.threshold = 60.0;
    let report = cmd_pipeline(&cfg)?;
    for line in &report.messages {
        println!("{line}");
    }
    println!(
        "\n{} artifacts, config hash {}",
        report.manifest.artifacts.len(),
        report.manifest.config_hash
    );
    for a in &report.manifest.artifacts {
        println!("  {}", a.path);
    }
    Ok(())
}
