use mcfse::fse::{
    evaluate_model, evaluate_model_direct, full_region, generate_model, generate_model_direct, select_basis,
    weighted_projection, weighted_projection_direct, BasisSpec, Dims3, WeightVolume,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_weights(rng: &mut impl Rng, dims: Dims3, lost: f64) -> WeightVolume {
    let w = (0..dims.len())
        .map(|_| if rng.gen_bool(lost) { 0.0 } else { rng.gen_range(0.05..1.0) })
        .collect();
    WeightVolume { dims, w, rho_hat: 0.8, delta: 0.2 }
}

/// Planted real signal made of three conjugate pairs on a native grid.
fn planted(dims: Dims3, pairs: &[(usize, Complex64)]) -> Vec<f64> {
    let basis = BasisSpec::new(dims);
    (0..dims.len())
        .map(|i| {
            let (m, n, p) = dims.coords(i);
            pairs
                .iter()
                .map(|&(k, c)| 2.0 * (c * basis.eval(k, m, n, p)).re)
                .sum()
        })
        .collect()
}

#[test]
fn planted_pairs_are_recovered_exactly() {
    let dims = Dims3::new(8, 6, 3);
    let basis = BasisSpec::new(dims);
    let pairs = [
        (dims.index(1, 0, 0), Complex64::new(3.0, -1.0)),
        (dims.index(2, 1, 1), Complex64::new(-0.5, 2.0)),
        (dims.index(3, 2, 0), Complex64::new(1.5, 0.25)),
    ];
    let f = planted(dims, &pairs);
    let fit = generate_model(&f, &WeightVolume::uniform(dims), &basis, 3, 1.0).unwrap();
    for &(k, c) in &pairs {
        let lower = k.min(basis.mirror(k));
        let want = if lower == k { c } else { c.conj() };
        assert!((fit.model.coefficient(lower) - want).norm() < 1e-9);
    }
    assert!(fit.steps.last().unwrap().energy < 1e-9 * fit.initial_energy.max(1.0));
}

#[test]
fn fast_and_direct_paths_agree_on_random_volumes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..20 {
        let dims = Dims3::new(rng.gen_range(2..=9), rng.gen_range(2..=9), rng.gen_range(1..=3));
        let grid = if case % 2 == 0 {
            dims
        } else {
            Dims3::new(dims.m + rng.gen_range(0..4), dims.n + rng.gen_range(0..4), dims.p + rng.gen_range(0..2))
        };
        let basis = BasisSpec::new(grid);
        let weights = random_weights(&mut rng, dims, 0.3);
        if weights.sum() == 0.0 {
            continue;
        }
        let f: Vec<f64> = (0..dims.len()).map(|_| rng.gen_range(0.0..255.0)).collect();

        let fast = weighted_projection(&f, &weights, &basis).unwrap();
        let direct = weighted_projection_direct(&f, &weights, &basis).unwrap();
        let scale = direct.iter().map(|v| v.norm()).fold(1e-12, f64::max);
        for (a, b) in fast.iter().zip(&direct) {
            assert!((a - b).norm() <= 1e-9 * scale);
        }

        let gamma = if case % 3 == 0 { 1.0 } else { 0.7 };
        let a = generate_model(&f, &weights, &basis, 12, gamma).unwrap();
        let b = generate_model_direct(&f, &weights, &basis, 12, gamma).unwrap();
        let ia: Vec<usize> = a.steps.iter().map(|s| s.index).collect();
        let ib: Vec<usize> = b.steps.iter().map(|s| s.index).collect();
        assert_eq!(ia, ib, "case {case}");
        let region = full_region(dims);
        let ga = evaluate_model(&a.model, &region);
        let gb = evaluate_model_direct(&b.model, &region);
        for (x, y) in ga.iter().zip(&gb) {
            assert!((x - y.re).abs() <= 1e-6 * (1.0 + y.re.abs()));
            assert!(y.im.abs() < 1e-6);
        }
    }
}

#[test]
fn selection_minimizes_the_weighted_distance() {
    // brute force: energy removed by each basis function on its own, summed
    // over the two members of a conjugate pair
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let dims = Dims3::new(rng.gen_range(2..=5), rng.gen_range(2..=5), rng.gen_range(1..=2));
        let grid = Dims3::new(dims.m + 1, dims.n, dims.p + 1);
        let basis = BasisSpec::new(grid);
        let weights = random_weights(&mut rng, dims, 0.25);
        if weights.sum() == 0.0 {
            continue;
        }
        let r: Vec<f64> = (0..dims.len()).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let p = weighted_projection_direct(&r, &weights, &basis).unwrap();
        let energy: f64 = r.iter().zip(&weights.w).map(|(x, w)| w * x * x).sum();
        let reduction = |k: usize| {
            let dist: f64 = (0..dims.len())
                .map(|i| {
                    let (m, n, q) = dims.coords(i);
                    weights.w[i] * (Complex64::new(r[i], 0.0) - p[k] * basis.eval(k, m, n, q)).norm_sqr()
                })
                .sum();
            energy - dist
        };
        let mut best = (f64::NEG_INFINITY, 0);
        for k in 0..grid.len() {
            let mirror = basis.mirror(k);
            if mirror < k {
                continue;
            }
            let score = if mirror == k { reduction(k) } else { reduction(k) + reduction(mirror) };
            if score > best.0 + 1e-9 * energy.max(1.0) {
                best = (score, k);
            }
        }
        let sel = select_basis(&p, weights.sum(), &basis);
        assert!((sel.score - best.0).abs() <= 1e-8 * energy.max(1.0));
        let score_of = |k: usize| {
            let mirror = basis.mirror(k);
            if mirror == k { reduction(k) } else { reduction(k) + reduction(mirror) }
        };
        assert!((score_of(sel.index) - best.0).abs() <= 1e-8 * energy.max(1.0));
    }
}

#[test]
fn tracked_energy_matches_the_model_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let dims = Dims3::new(10, 8, 3);
    let basis = BasisSpec::new(Dims3::new(16, 16, 4));
    let weights = random_weights(&mut rng, dims, 0.2);
    let f: Vec<f64> = (0..dims.len()).map(|_| rng.gen_range(0.0..255.0)).collect();
    let fit = generate_model(&f, &weights, &basis, 40, 0.7).unwrap();
    let g = evaluate_model(&fit.model, &full_region(dims));
    let energy: f64 = f
        .iter()
        .zip(&g)
        .zip(&weights.w)
        .map(|((a, b), w)| w * (a - b) * (a - b))
        .sum();
    let tracked = fit.steps.last().unwrap().energy;
    assert!((energy - tracked).abs() <= 1e-7 * fit.initial_energy);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residual_energy_never_increases(
        seed in any::<u64>(),
        gamma in 0.1f64..=1.0,
        m in 2usize..12, n in 2usize..12, p in 1usize..4,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = Dims3::new(m, n, p);
        let weights = random_weights(&mut rng, dims, 0.3);
        prop_assume!(weights.sum() > 0.0);
        let f: Vec<f64> = (0..dims.len()).map(|_| rng.gen_range(0.0..255.0)).collect();
        let basis = BasisSpec::new(Dims3::new(16, 16, 4));
        let fit = generate_model(&f, &weights, &basis, 60, gamma).unwrap();
        let mut prev = fit.initial_energy;
        for s in &fit.steps {
            prop_assert!(s.energy <= prev * (1.0 + 1e-9) + 1e-9);
            prev = s.energy;
        }
    }

    #[test]
    fn models_of_real_volumes_are_real(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = Dims3::new(6, 5, 2);
        let basis = BasisSpec::new(Dims3::new(8, 8, 2));
        let weights = random_weights(&mut rng, dims, 0.2);
        prop_assume!(weights.sum() > 0.0);
        let f: Vec<f64> = (0..dims.len()).map(|_| rng.gen_range(0.0..255.0)).collect();
        let fit = generate_model(&f, &weights, &basis, 15, 0.7).unwrap();
        for v in evaluate_model_direct(&fit.model, &full_region(dims)) {
            prop_assert!(v.im.abs() < 1e-9);
        }
    }
}
