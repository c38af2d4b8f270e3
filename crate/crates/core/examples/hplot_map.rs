//! H-plot of a small asymmetric matrix: coordinates, fit and asymmetry.
//!
//! Run: `cargo run --example hplot_map -- [figure.svg]`

use asymap::export::{svg, Stamp};
use asymap::hplot::{build_profile_matrix, profile_distance_check, ProfileRole};
use asymap::{asymmetry_scores, embed, Dissimilarity};

fn main() -> asymap::Result<()> {
    // journal 1 cites 3 heavily, 3 barely cites back
    let delta = Dissimilarity::from_rows(&[
        vec![1.0, 6.0, 2.0, 9.0],
        vec![5.0, 1.0, 7.0, 4.0],
        vec![12.0, 8.0, 1.0, 3.0],
        vec![10.0, 4.0, 3.0, 1.0],
    ])?;
    let emb = embed(&delta, 2)?;
    println!("gof = {:.3}", emb.gof());
    println!("spectrum: {:?}", &emb.eigenvalues()[..4]);
    for j in 0..emb.n() {
        let to = emb.point(ProfileRole::To, j);
        let from = emb.point(ProfileRole::From, j);
        println!(
            "{}: to ({:7.3}, {:7.3})  from ({:7.3}, {:7.3})",
            emb.labels()[j],
            to[0],
            to[1],
            from[0],
            from[1]
        );
    }
    for s in &asymmetry_scores(&emb).scores {
        println!("asymmetry {}: {:.3}", s.label, s.score);
    }

    // in full dimension map distances are standard deviations of differences
    let full = embed(&delta, delta.len() - 1)?;
    let d = build_profile_matrix(&delta);
    let (i, j) = (0, delta.len());
    let mapped = (full.coords().row(i) - full.coords().row(j)).norm();
    println!(
        "sd(d.1 - d1.) = {:.6}, full-map distance = {:.6}",
        profile_distance_check(&d, i, j),
        mapped
    );

    if let Some(path) = std::env::args().nth(1) {
        let text = svg::hplot_svg(&emb, None, &Stamp::new("example", 0))?;
        std::fs::write(&path, text).map_err(|e| asymap::Error::Io {
            path: path.into(),
            source: e,
        })?;
    }
    Ok(())
}
