//! Archetypoids of the combined to/from profiles for k = 1..5.

use asymap::demo::synthetic_citations;
use asymap::{combine_profiles, compute_relatedness, embed, rank_transform, screeplot};

fn main() -> asymap::Result<()> {
    let delta = rank_transform(&compute_relatedness(&synthetic_citations(15, 7))?)?;
    let x = combine_profiles(&embed(&delta, 2)?)?;
    let (scree, models) = screeplot(&x, 1..=5)?;
    for m in &models {
        let labels: Vec<&str> = m
            .archetypoid_indices
            .iter()
            .map(|&i| x.labels()[i].as_str())
            .collect();
        println!(
            "k = {}: {:?}  rss = {:.4}  swaps = {}",
            m.k(),
            labels,
            m.rss,
            m.trace.len() - 1
        );
    }
    println!("suggested elbow: {:?}", scree.elbow);

    let k3 = &models[2];
    println!("mixture weights at k = 3:");
    for i in 0..x.n() {
        let w: Vec<String> = (0..3).map(|a| format!("{:.2}", k3.alpha[(i, a)])).collect();
        println!("  {:>3}: {}", x.labels()[i], w.join(" "));
    }
    Ok(())
}
