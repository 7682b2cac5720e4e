use lcx_core::classify;
use lcx_core::io::{parse_grid, parse_pmf, write_grid, write_pmf};
use lcx_core::oracle::{
    convolve, convolve_all, dump_corpus, gen_log_concave, gen_log_concave_density, mc_tail,
    mc_tail_side, GenClass,
};
use lcx_core::{ContinuousDist, DiscreteFamily, Side};
use proptest::prelude::*;

#[test]
fn convolution_keeps_log_concavity() {
    for seed in 0..100u64 {
        let a = gen_log_concave(seed, 1 + (seed % 12) as usize, GenClass::Lc).unwrap();
        let b = gen_log_concave(seed + 1000, 1 + (seed % 7) as usize, GenClass::Lc).unwrap();
        let s = convolve(&a, &b).unwrap();
        assert!(
            classify::is_log_concave_discrete(&s).is_member,
            "seed {seed}"
        );
        assert!((s.mean() - a.mean() - b.mean()).abs() < 1e-10 * s.mean().max(1.0));
        assert_eq!(s.min_k(), a.min_k() + b.min_k());
    }
}

#[test]
fn sums_of_geometrics_are_negative_binomial() {
    let g = DiscreteFamily::geometric_from(0.5, 0)
        .unwrap()
        .materialize()
        .unwrap();
    let s = convolve_all(&[g.clone(), g.clone(), g]).unwrap();
    for k in 0..30i64 {
        let exact = ((k + 1) * (k + 2)) as f64 / 2.0 * 0.5f64.powi(k as i32 + 3);
        assert!((s.pmf(k) - exact).abs() < 1e-14, "k {k}");
    }
    assert!(convolve_all(&[]).is_err());
}

#[test]
fn monte_carlo_matches_triangular_tail() {
    let u = ContinuousDist::uniform(0.0, 2.0).unwrap();
    for t in [1.25, 1.5, 1.75] {
        let est = mc_tail(&[u.clone(), u.clone()], &[1.0, 1.0], t, 200_000, 11).unwrap();
        let exact = (4.0 - 2.0 * t) * (4.0 - 2.0 * t) / 8.0;
        assert!(
            (est.estimate - exact).abs() <= est.ci_halfwidth * 1.5,
            "t {t}: {} vs {exact}",
            est.estimate
        );
        assert_eq!(est.samples, 200_000);
    }
    let low = mc_tail_side(&[u.clone(), u], &[1.0, 1.0], 0.5, Side::Lower, 200_000, 11).unwrap();
    assert!((low.estimate - 0.125).abs() <= low.ci_halfwidth * 1.5);
}

#[test]
fn monte_carlo_is_reproducible_and_seeds_agree() {
    let e = ContinuousDist::exponential(1.0).unwrap();
    let ds = [e.clone(), e];
    let a = mc_tail(&ds, &[1.0, 2.0], 1.5, 100_000, 3).unwrap();
    assert_eq!(a, mc_tail(&ds, &[1.0, 2.0], 1.5, 100_000, 3).unwrap());
    let b = mc_tail(&ds, &[1.0, 2.0], 1.5, 100_000, 4).unwrap();
    assert_ne!(a.estimate, b.estimate);
    assert!((a.estimate - b.estimate).abs() <= 3.0 * (a.ci_halfwidth + b.ci_halfwidth));
    assert!(mc_tail(&ds, &[1.0], 1.5, 100_000, 3).is_err());
    assert!(mc_tail(&ds, &[1.0, 2.0], 1.5, 9_999, 3).is_err());
}

#[test]
fn generators_are_deterministic_and_in_class() {
    for seed in 0..50u64 {
        for class in [GenClass::Lc, GenClass::Ulc, GenClass::UlcN(6)] {
            let size = if let GenClass::UlcN(n) = class {
                n as usize + 1
            } else {
                10
            };
            let a = gen_log_concave(seed, size, class).unwrap();
            assert_eq!(a, gen_log_concave(seed, size, class).unwrap());
            assert!(a.len() <= size && a.min_k() >= 0);
            assert!((a.head_mass() - 1.0).abs() < 1e-12);
        }
        let d = gen_log_concave_density(seed, 12).unwrap();
        assert_eq!(d, gen_log_concave_density(seed, 12).unwrap());
        let grid = d.as_grid().unwrap();
        assert!(classify::is_log_concave_continuous(&d, grid.breakpoints()).is_member);
        assert!((grid.mass() - 1.0).abs() < 1e-9);
    }
    assert_ne!(
        gen_log_concave(1, 10, GenClass::Lc).unwrap(),
        gen_log_concave(2, 10, GenClass::Lc).unwrap()
    );
}

#[test]
fn corpus_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let paths = dump_corpus(dir.path(), GenClass::UlcN(5), &[3, 4, 5], 6).unwrap();
    assert_eq!(paths.len(), 3);
    assert!(paths[0].ends_with("ulc5_3.csv"));
    for (path, seed) in paths.iter().zip(3..) {
        let text = std::fs::read_to_string(path).unwrap();
        let back = parse_pmf(&text).unwrap();
        let orig = gen_log_concave(seed, 6, GenClass::UlcN(5)).unwrap();
        for (k, p) in orig.iter() {
            assert!(
                (back.pmf(k) - p).abs() < 1e-11 * p.max(1e-300) + 1e-300,
                "seed {seed} k {k}"
            );
        }
    }
}

proptest! {
    #[test]
    fn pmf_text_round_trips(seed in any::<u64>(), size in 1usize..20, offset in -5i64..5) {
        let d = gen_log_concave(seed, size, GenClass::Lc).unwrap().shifted(offset);
        let back = parse_pmf(&write_pmf(&d)).unwrap();
        prop_assert_eq!(back.min_k(), d.min_k());
        prop_assert_eq!(back.len(), d.len());
        for (k, p) in d.iter() {
            prop_assert!((back.pmf(k) - p).abs() <= 1e-11 * p);
        }
    }

    #[test]
    fn grid_text_round_trips(seed in any::<u64>(), segments in 4usize..30) {
        let d = gen_log_concave_density(seed, segments).unwrap();
        let g = d.as_grid().unwrap();
        let back = parse_grid(&write_grid(g)).unwrap();
        prop_assert_eq!(back.breakpoints().len(), g.breakpoints().len());
        for (a, b) in back.values().iter().zip(g.values()) {
            prop_assert!((a - b).abs() <= 1e-11 * b.abs().max(1e-300));
        }
    }
}
