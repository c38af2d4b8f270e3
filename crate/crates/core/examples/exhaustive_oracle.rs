//! BUILD+SWAP against full enumeration on random point clouds.

use asymap::ada_fit;
use asymap::archetypoids::{ada_build, ada_exhaustive, binomial, solve_alpha, DEFAULT_BUDGET};
use asymap::demo::random_points;

fn main() -> asymap::Result<()> {
    let mut agree = 0;
    let trials = 30;
    for seed in 0..trials {
        let x = random_points(12, 2, seed);
        let k = 3;
        let build = solve_alpha(&x, &ada_build(&x, k)?)?.1;
        let fit = ada_fit(&x, k)?;
        let best = ada_exhaustive(&x, k, DEFAULT_BUDGET)?;
        let same = fit.rss <= best.rss * (1.0 + 1e-9);
        agree += same as usize;
        println!(
            "seed {seed:2}: build {build:.5}  swap {:.5}  optimum {:.5} over {} subsets{}",
            fit.rss,
            best.rss,
            binomial(12, k),
            if same { "" } else { "  <- local optimum" }
        );
    }
    println!("BUILD+SWAP reached the optimum in {agree}/{trials} instances");
    Ok(())
}
