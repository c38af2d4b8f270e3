//! Metric unfolding: recover a planted configuration, then fit both role
//! orders of an asymmetric matrix.

use asymap::comparators::{raw_stress, unfolding_fit, RoleOrder, UnfoldingOptions};
use asymap::demo::{planted_unfolding, random_dissimilarity};

fn main() -> asymap::Result<()> {
    let planted = planted_unfolding(8, 1);
    let opts = UnfoldingOptions {
        restarts: 10,
        seed: 3,
        ..Default::default()
    };
    let sol = unfolding_fit(&planted.delta, RoleOrder::RowsAsIndividuals, opts)?;
    println!(
        "planted distances: stress {:.3e} after restart {} ({} iterations)",
        sol.stress,
        sol.best_restart,
        sol.runs[sol.best_restart].trace.len() - 1
    );

    let delta = random_dissimilarity(10, 5);
    for role in [RoleOrder::RowsAsIndividuals, RoleOrder::ColumnsAsIndividuals] {
        let s = unfolding_fit(&delta, role, opts)?;
        let m = match role {
            RoleOrder::RowsAsIndividuals => delta.delta().clone(),
            RoleOrder::ColumnsAsIndividuals => delta.delta().transpose(),
        };
        let finals: Vec<String> = s
            .runs
            .iter()
            .map(|r| format!("{:.1}", r.final_stress()))
            .collect();
        println!(
            "{}: best stress {:.3} (check {:.3})",
            role.as_str(),
            s.stress,
            raw_stress(&m, &s.x1, &s.x2)
        );
        println!("  restart finals: {}", finals.join(" "));
    }
    Ok(())
}
