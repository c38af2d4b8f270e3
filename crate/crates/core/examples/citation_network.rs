//! Thresholded citation network with a spring layout, written as DOT.
//!
//! Run: `cargo run --example citation_network -- [threshold]`

use asymap::comparators::build_network;
use asymap::demo::synthetic_citations;
use asymap::export::{graph_dot, Stamp};
use asymap::{compute_relatedness, rank_transform};

fn main() -> asymap::Result<()> {
    let delta = rank_transform(&compute_relatedness(&synthetic_citations(12, 11))?)?;
    let threshold = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(delta.max_rank() / 3.0);
    let graph = build_network(&delta, threshold)?.with_layout(0)?;
    println!("threshold {threshold}: {} edges", graph.edges.len());
    for c in graph.weak_components() {
        let names: Vec<&str> = c.iter().map(|&i| graph.labels[i].as_str()).collect();
        println!("component: {}", names.join(" "));
    }
    let iso: Vec<&str> = graph
        .isolated_nodes()
        .iter()
        .map(|&i| graph.labels[i].as_str())
        .collect();
    println!("isolated: {iso:?}\n");
    print!("{}", graph_dot(&graph, &Stamp::new("example", 0)));
    Ok(())
}
