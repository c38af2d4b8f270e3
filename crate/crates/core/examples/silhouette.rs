//! Average silhouette of PAM k-medoids over k = 2..6.

use asymap::comparators::kmedoids_silhouette;
use asymap::comparators::medoids::best_by_silhouette;
use asymap::demo::synthetic_citations;
use asymap::{combine_profiles, compute_relatedness, embed, rank_transform};

fn main() -> asymap::Result<()> {
    let delta = rank_transform(&compute_relatedness(&synthetic_citations(20, 4))?)?;
    let x = combine_profiles(&embed(&delta, 2)?)?;
    let results = kmedoids_silhouette(&x, 2..=6)?;
    for c in &results {
        let medoids: Vec<&str> = c.medoids.iter().map(|&i| x.labels()[i].as_str()).collect();
        println!(
            "k = {}: average silhouette {:.3}, medoids {:?}",
            c.k, c.average_silhouette, medoids
        );
    }
    if let Some(b) = best_by_silhouette(&results) {
        let verdict = if b.average_silhouette < 0.5 {
            "weak"
        } else {
            "reasonable"
        };
        println!("best k = {} ({verdict} structure)", b.k);
    }
    Ok(())
}
