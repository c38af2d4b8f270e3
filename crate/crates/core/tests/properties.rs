use asymap::archetypoids::{ada_build, ada_exhaustive, solve_alpha, DataMatrix, DEFAULT_BUDGET};
use asymap::comparators::network::{spring_layout, LayoutOptions};
use asymap::comparators::{build_network, kmedoids_silhouette, unfolding_fit, RoleOrder, UnfoldingOptions};
use asymap::hplot::goodness_of_fit;
use asymap::ingest::RelatednessMatrix;
use asymap::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("o{i}")).collect()
}

fn square(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(lo..hi, n * n).prop_map(move |v| DMatrix::from_vec(n, n, v))
}

fn points(n: usize, m: usize) -> impl Strategy<Value = DataMatrix> {
    prop::collection::vec(-5.0..5.0f64, n * m)
        .prop_map(move |v| DataMatrix::new(labels(n), DMatrix::from_vec(n, m, v)).unwrap())
}

/// Counts with about a quarter zeros, plus positive paper and reference totals.
fn citation_table(n: usize) -> impl Strategy<Value = CitationTable> {
    (
        prop::collection::vec(prop_oneof![1 => Just(0u64), 3 => 1u64..60], n * n),
        prop::collection::vec(10u64..400, n),
        prop::collection::vec(100u64..9000, n),
    )
        .prop_map(move |(c, p, r)| CitationTable::new(labels(n), DMatrix::from_vec(n, n, c), p, r).unwrap())
        .prop_filter("needs a citation", |t| t.cites().iter().any(|&h| h > 0))
}

fn max_col_sign_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|k| {
            let plus = (a.column(k) - b.column(k)).amax();
            let minus = (a.column(k) + b.column(k)).amax();
            plus.min(minus)
        })
        .fold(0.0, f64::max)
}

fn assert_feasible(x: &DataMatrix, idx: &[usize], alpha: &DMatrix<f64>, rss: f64) {
    for i in 0..alpha.nrows() {
        let s: f64 = alpha.row(i).sum();
        assert!((s - 1.0).abs() <= 1e-9, "row {i} sums to {s}");
        assert!(alpha.row(i).iter().all(|&v| v >= -1e-12));
    }
    for (j, &i) in idx.iter().enumerate() {
        for a in 0..idx.len() {
            let want = if a == j { 1.0 } else { 0.0 };
            assert!((alpha[(i, a)] - want).abs() <= 1e-6);
        }
    }
    let z = x.matrix().select_rows(idx);
    let recomputed = (x.matrix() - alpha * z).norm_squared();
    assert!((recomputed - rss).abs() <= 1e-8 * rss.max(1e-12) + 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ranks_reverse_relatedness_order(vals in prop::collection::vec(prop::option::weighted(0.8, 0.01..100.0f64), 16)) {
        prop_assume!(vals.iter().any(Option::is_some));
        let rel = RelatednessMatrix::new(labels(4), DMatrix::from_vec(4, 4, vals.clone())).unwrap();
        let d = rank_transform(&rel).unwrap();
        for a in 0..16 {
            for b in 0..16 {
                if let (Some(ra), Some(rb)) = (vals[a], vals[b]) {
                    let (da, db) = (d.delta()[a], d.delta()[b]);
                    if ra > rb { prop_assert!(da < db); }
                    if ra == rb { prop_assert_eq!(da, db); }
                }
            }
            if vals[a].is_none() {
                prop_assert_eq!(d.delta()[a], d.max_rank() + 1.0);
            } else {
                prop_assert!(d.delta()[a] >= 1.0 && d.delta()[a] <= d.max_rank());
            }
        }
    }

    #[test]
    fn defined_ranks_sum_to_triangular_number(vals in prop::collection::vec(prop::option::weighted(0.7, prop_oneof![Just(1.0), Just(2.0), 0.1..5.0f64]), 25)) {
        let m = vals.iter().filter(|v| v.is_some()).count();
        prop_assume!(m > 0);
        let rel = RelatednessMatrix::new(labels(5), DMatrix::from_vec(5, 5, vals.clone())).unwrap();
        let d = rank_transform(&rel).unwrap();
        let sum: f64 = (0..25).filter(|&k| vals[k].is_some()).map(|k| d.delta()[k]).sum();
        prop_assert!((sum - (m * (m + 1)) as f64 / 2.0).abs() < 1e-9);
    }

    #[test]
    fn ranks_ignore_uniform_rescaling_of_totals(t in citation_table(5), c in 2u64..7) {
        let scaled = CitationTable::new(
            t.labels().to_vec(),
            t.cites().clone(),
            t.papers().iter().map(|p| p * c).collect(),
            t.refs().iter().map(|r| r * c).collect(),
        ).unwrap();
        let a = rank_transform(&compute_relatedness(&t).unwrap()).unwrap();
        let b = rank_transform(&compute_relatedness(&scaled).unwrap()).unwrap();
        prop_assert_eq!(a.delta(), b.delta());
        prop_assert_eq!(a.max_rank(), b.max_rank());
    }

    #[test]
    fn similarity_applied_twice_is_identity(t in citation_table(4)) {
        let d = rank_transform(&compute_relatedness(&t).unwrap()).unwrap();
        let s = Dissimilarity::with_max_rank(d.labels().to_vec(), to_similarity(&d), d.max_rank()).unwrap();
        prop_assert_eq!(&to_similarity(&s), d.delta());
    }

    #[test]
    fn embedding_is_scale_equivariant(m in square(5, 0.0, 20.0), a in 0.1..10.0f64, b in -5.0..5.0f64) {
        let d = Dissimilarity::new(labels(5), m.clone()).unwrap();
        // keep entries nonnegative
        let shift = b.max(-a * m.min());
        let scaled = Dissimilarity::new(labels(5), m.map(|v| a * v + shift)).unwrap();
        let e1 = embed(&d, 2).unwrap();
        let e2 = embed(&scaled, 2).unwrap();
        prop_assume!(e1.eigenvalues()[1] - e1.eigenvalues()[2] > 1e-6 * e1.eigenvalues()[0]);
        prop_assume!(e1.eigenvalues()[0] - e1.eigenvalues()[1] > 1e-6 * e1.eigenvalues()[0]);
        let err = max_col_sign_err(&(e1.coords() * a), e2.coords());
        prop_assert!(err <= 1e-8 * (1.0 + a * e1.coords().amax()), "err {}", err);
        prop_assert!((e1.gof() - e2.gof()).abs() <= 1e-12);
        for (l1, l2) in e1.eigenvalues().iter().zip(e2.eigenvalues()) {
            prop_assert!((l1 * a * a - l2).abs() <= 1e-9 * (1.0 + l2));
        }
    }

    #[test]
    fn spectrum_is_ordered_and_coords_carry_eigenvalues(m in square(6, 1.0, 30.0)) {
        let e = embed(&Dissimilarity::new(labels(6), m).unwrap(), 3).unwrap();
        let l = e.eigenvalues();
        prop_assert!(l.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(l.iter().all(|&v| v >= 0.0));
        for k in 0..3 {
            let sq = e.coords().column(k).norm_squared();
            prop_assert!((sq - l[k]).abs() <= 1e-9 * l[0].max(1.0));
        }
    }

    #[test]
    fn gof_grows_with_dimension(spectrum in prop::collection::vec(0.0..10.0f64, 2..10)) {
        let mut s = spectrum;
        s.sort_by(|a, b| b.total_cmp(a));
        prop_assume!(s[0] > 0.0);
        let g: Vec<f64> = (1..=s.len()).map(|p| goodness_of_fit(&s, p).unwrap()).collect();
        prop_assert!(g.windows(2).all(|w| w[0] <= w[1] + 1e-15));
        prop_assert!((g[g.len() - 1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_input_has_zero_asymmetry(m in square(5, 0.0, 10.0)) {
        let sym = &m + m.transpose();
        let e = embed(&Dissimilarity::new(labels(5), sym).unwrap(), 2);
        if let Ok(e) = e {
            prop_assert!(asymmetry_scores(&e).scores.iter().all(|s| s.score == 0.0));
        }
    }

    #[test]
    fn embedding_is_deterministic(m in square(5, 0.0, 10.0)) {
        let d = Dissimilarity::new(labels(5), m).unwrap();
        let a = embed(&d, 2).unwrap();
        let b = embed(&d, 2).unwrap();
        prop_assert_eq!(a.coords().as_slice(), b.coords().as_slice());
    }

    #[test]
    fn edges_grow_with_threshold(m in square(6, 1.0, 40.0), t1 in 0.5..40.0f64, dt in 0.0..20.0f64) {
        let d = Dissimilarity::new(labels(6), m).unwrap();
        let small = build_network(&d, t1).unwrap();
        let large = build_network(&d, t1 + dt).unwrap();
        for e in &small.edges {
            prop_assert!(d.get(e.source, e.target) <= t1);
            prop_assert!(large.edges.iter().any(|f| f.source == e.source && f.target == e.target));
        }
    }

    #[test]
    fn layout_is_reproducible(m in square(5, 1.0, 10.0), seed in 0u64..1000) {
        let g = build_network(&Dissimilarity::new(labels(5), m).unwrap(), 5.0).unwrap();
        let opts = LayoutOptions { iterations: 50, ..Default::default() };
        let a = spring_layout(&g, seed, opts).unwrap();
        prop_assert_eq!(&a, &spring_layout(&g, seed, opts).unwrap());
        prop_assert!(a.iter().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn silhouettes_lie_in_unit_interval(x in points(8, 4)) {
        for c in kmedoids_silhouette(&x, 2..=7).unwrap() {
            prop_assert!(c.silhouettes.iter().all(|s| (-1.0..=1.0).contains(s)));
            prop_assert!((-1.0..=1.0).contains(&c.average_silhouette));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fitted_models_are_feasible(x in points(9, 3), k in 1usize..=4) {
        let m = ada_fit(&x, k).unwrap();
        assert_feasible(&x, &m.archetypoid_indices, &m.alpha, m.rss);
        let mut sorted = m.sorted_indices();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), k);
        prop_assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn exhaustive_dominates_fit_dominates_build(x in points(8, 2), k in 1usize..=3) {
        let build = solve_alpha(&x, &ada_build(&x, k).unwrap()).unwrap().1;
        let fit = ada_fit(&x, k).unwrap().rss;
        let best = ada_exhaustive(&x, k, DEFAULT_BUDGET).unwrap();
        assert_feasible(&x, &best.archetypoid_indices, &best.alpha, best.rss);
        let tol = 1e-12 * build.max(1.0);
        prop_assert!(best.rss <= fit + tol);
        prop_assert!(fit <= build + tol);
    }

    #[test]
    fn exhaustive_rss_never_increases_with_k(x in points(7, 2)) {
        let rss: Vec<f64> = (1..=7).map(|k| ada_exhaustive(&x, k, DEFAULT_BUDGET).unwrap().rss).collect();
        prop_assert!(rss.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].max(1.0)));
        prop_assert!(rss[6].abs() < 1e-12);
    }

    #[test]
    fn single_archetypoid_is_the_squared_distance_medoid(x in points(10, 3)) {
        let m = ada_fit(&x, 1).unwrap();
        let cost = |j: usize| (0..10).map(|i| (x.matrix().row(i) - x.matrix().row(j)).norm_squared()).sum::<f64>();
        let best = (0..10).min_by(|&a, &b| cost(a).total_cmp(&cost(b))).unwrap();
        prop_assert_eq!(m.archetypoid_indices, vec![best]);
    }

    #[test]
    fn rigid_motion_leaves_archetypoids_unchanged(
        x in points(9, 2),
        angle in 0.0..std::f64::consts::TAU,
        shift in (-10.0..10.0f64, -10.0..10.0f64),
        k in 1usize..=3,
    ) {
        let (c, s) = (angle.cos(), angle.sin());
        let moved = DMatrix::from_fn(9, 2, |i, j| {
            let (a, b) = (x.matrix()[(i, 0)], x.matrix()[(i, 1)]);
            if j == 0 { c * a - s * b + shift.0 } else { s * a + c * b + shift.1 }
        });
        let y = DataMatrix::new(labels(9), moved).unwrap();
        let m1 = ada_fit(&x, k).unwrap();
        let m2 = ada_fit(&y, k).unwrap();
        // near-ties between candidate sets can legitimately flip under rounding
        let gap = (0..9).filter(|i| !m1.archetypoid_indices.contains(i)).map(|cand| {
            let mut alt = m1.archetypoid_indices.clone();
            alt[0] = cand;
            (solve_alpha(&x, &alt).unwrap().1 - m1.rss).abs()
        }).fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-9);
        prop_assert_eq!(&m1.archetypoid_indices, &m2.archetypoid_indices);
        prop_assert!((&m1.alpha - &m2.alpha).amax() <= 1e-8);
        prop_assert!((m1.rss - m2.rss).abs() <= 1e-8 * m1.rss.max(1.0));
    }

    #[test]
    fn unfolding_traces_never_increase(m in square(4, 0.5, 8.0), seed in 0u64..100) {
        let d = Dissimilarity::new(labels(4), m).unwrap();
        let opts = UnfoldingOptions { restarts: 3, seed, max_iter: 300, ..Default::default() };
        for role in [RoleOrder::RowsAsIndividuals, RoleOrder::ColumnsAsIndividuals] {
            let sol = unfolding_fit(&d, role, opts).unwrap();
            prop_assert!(sol.stress >= 0.0);
            // rounding error of one stress evaluation
            let noise = 16.0 * (4.0 * f64::EPSILON * d.delta().max()).powi(2);
            for run in &sol.runs {
                prop_assert!(run.trace.windows(2).all(|w| w[1] <= w[0] + noise));
            }
        }
    }
}
