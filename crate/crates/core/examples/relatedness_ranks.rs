//! Citation counts to relatedness factors, ranks and similarities.
//!
//! Run: `cargo run --example relatedness_ranks -- [out.json]`. With a path,
//! the synthetic citation table is also saved as JSON for the CLI.

use asymap::demo::synthetic_citations;
use asymap::ingest::RankProvenance;
use asymap::io::CitationTableJson;
use asymap::{compute_relatedness, rank_transform, to_similarity};

fn main() -> asymap::Result<()> {
    let table = synthetic_citations(8, 42);
    let rel = compute_relatedness(&table)?;
    let delta = rank_transform(&rel)?;
    let prov = RankProvenance::new(&rel, &delta);

    println!("relatedness R(i -> j), '-' where no citations:");
    for i in 0..rel.len() {
        let row: Vec<String> = (0..rel.len())
            .map(|j| rel.get(i, j).map_or("     -".into(), |v| format!("{v:6.1}")))
            .collect();
        println!("  {}", row.join(" "));
    }
    println!(
        "\nmax_rank = {}, undefined cells get {}; {} tie groups",
        delta.max_rank(),
        delta.sentinel(),
        prov.tie_groups
    );
    println!("rank dissimilarities (1 = strongest):");
    for i in 0..delta.len() {
        let row: Vec<String> = (0..delta.len())
            .map(|j| format!("{:5.1}", delta.get(i, j)))
            .collect();
        println!("  {}", row.join(" "));
    }
    let sim = to_similarity(&delta);
    println!("similarity of the strongest cell: {}", sim.max());

    if let Some(path) = std::env::args().nth(1) {
        let json = serde_json::to_string_pretty(&CitationTableJson::from(&table))?;
        std::fs::write(&path, json).map_err(|e| asymap::Error::Io {
            path: path.into(),
            source: e,
        })?;
    }
    Ok(())
}
