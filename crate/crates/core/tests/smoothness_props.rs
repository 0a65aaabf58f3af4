mod common;

use cantor_scaling::realization::Correspondence;
use cantor_scaling::smoothness::dd::{divided_difference, variation_lower_bound};
use cantor_scaling::smoothness::lemma::{lemma_check, LemmaPair, Polynomial};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Increasing points in `[0, 1]` with spacing at least `0.05 / n`.
fn spaced(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1.0f64..20.0, n).prop_map(|steps| {
        let total: f64 = steps.iter().sum();
        let mut acc = 0.0;
        steps
            .iter()
            .map(|s| {
                let x = acc / total;
                acc += s;
                x
            })
            .collect()
    })
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divided_difference_ignores_order(
        nodes in spaced(6),
        values in prop::collection::vec(-10.0f64..10.0, 6),
        seed in any::<u64>(),
    ) {
        let want = divided_difference(&nodes, &values, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx: Vec<usize> = (0..6).collect();
        for _ in 0..500 {
            idx.shuffle(&mut rng);
            let xs: Vec<f64> = idx.iter().map(|&i| nodes[i]).collect();
            let ys: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
            prop_assert!(rel_close(divided_difference(&xs, &ys, 5).unwrap(), want, 1e-9));
        }
    }

    #[test]
    fn polynomial_divided_differences(
        coeffs in prop::collection::vec(-5.0f64..5.0, 1..=7),
        lead in prop_oneof![-5.0f64..-0.5, 0.5f64..5.0],
        nodes in spaced(8),
    ) {
        let mut c = coeffs;
        let m = c.len() - 1;
        c[m] = lead;
        let scale: f64 = c.iter().map(|x| x.abs()).sum();
        let p = Polynomial::new(c);
        let ys: Vec<f64> = nodes.iter().map(|&x| p.eval(x)).collect();
        let top = divided_difference(&nodes[..m + 1], &ys[..m + 1], m).unwrap();
        prop_assert!(rel_close(top, lead, 1e-9), "order {m}: {top} vs {lead}");
        let next = divided_difference(&nodes[..m + 2], &ys[..m + 2], m + 1).unwrap();
        prop_assert!(next.abs() <= 1e-8 * scale, "order {}: {next}", m + 1);
    }

    #[test]
    fn variation_bound_is_renormalization_invariant(
        src in spaced(7),
        tgt in spaced(7),
        a in 0.1f64..10.0, b in -5.0f64..5.0,
        c in 0.1f64..10.0, e in -5.0f64..5.0,
        k in 1usize..=4,
    ) {
        let base = Correspondence::new(src.clone(), tgt.clone(), "base").unwrap().renormalized();
        let moved = Correspondence::new(
            src.iter().map(|x| a * x + b).collect(),
            tgt.iter().map(|y| c * y + e).collect(),
            "moved",
        ).unwrap().renormalized();
        let v0 = variation_lower_bound(&base, k).unwrap();
        let v1 = variation_lower_bound(&moved, k).unwrap();
        prop_assert_eq!(v0.flagged, v1.flagged);
        prop_assert!(rel_close(v0.value, v1.value, 1e-9), "{} vs {}", v0.value, v1.value);
    }

    #[test]
    fn bound_is_sound_for_polynomials(
        coeffs in prop::collection::vec(-3.0f64..3.0, 2..=6),
        src in spaced(8),
        k in 1usize..=3,
    ) {
        let p = Polynomial::new(coeffs);
        // Add a dominant linear term so the map is increasing.
        let slope = 1.0 + (1..p.coeffs.len()).map(|i| (i as f64) * p.coeffs[i].abs()).sum::<f64>();
        let phi = p.add(&Polynomial::new(vec![0.0, 2.0 * slope]));
        let tgt: Vec<f64> = src.iter().map(|&x| phi.eval(x)).collect();
        let corr = Correspondence::new(src.clone(), tgt, "poly").unwrap();
        let bound = variation_lower_bound(&corr, k).unwrap().value;
        let grid: Vec<f64> = (0..=4000).map(|i| src[0] + (src[7] - src[0]) * i as f64 / 4000.0).collect();
        let (lo, hi) = grid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            let v = phi.derivative(x, k);
            (lo.min(v), hi.max(v))
        });
        prop_assert!(bound <= hi - lo + 1e-8, "{bound} > {}", hi - lo);
    }

    /// The bound that the zero-plus-variation argument supports.
    #[test]
    fn lemma_pairs_stay_within_twice_m(seed in any::<u64>()) {
        for pair in LemmaPair::suite(seed, 3, 4) {
            for k in 1..=4 {
                let r = lemma_check(&pair, k, 2001).unwrap();
                prop_assert!(r.hypothesis_holds && r.holds_2m);
            }
        }
    }
}

#[test]
fn bound_is_sound_for_the_power_branch() {
    let sys = common::power3();
    let branch = sys.branch(1).unwrap();
    let (lo, hi) = (branch.lo, branch.hi);
    let xs: Vec<f64> = (0..9).map(|i| lo + (hi - lo) * (i as f64 / 8.0).powi(2)).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| branch.forward(x)).collect();
    let corr = Correspondence::new(xs, ys, "power branch").unwrap();
    for k in 1..=2 {
        let bound = variation_lower_bound(&corr, k).unwrap().value;
        let vals: Vec<f64> = (0..=4000)
            .map(|i| branch.derivative(lo + (hi - lo) * i as f64 / 4000.0, k).unwrap())
            .collect();
        let spread =
            vals.iter().copied().fold(f64::NEG_INFINITY, f64::max) - vals.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(bound > 0.0 && bound <= spread + 1e-8, "k = {k}: {bound} vs {spread}");
    }
}

#[test]
fn tight_nodes_are_flagged_and_excluded() {
    let xs = vec![0.0, 0.3, 0.5, 0.5 + 1e-11, 0.8, 1.0];
    let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let mut bumped = ys.clone();
    bumped[3] += 1e-12;
    let corr = Correspondence::new(xs, bumped, "tight").unwrap();
    let b = variation_lower_bound(&corr, 2).unwrap();
    assert!(b.conditioning_flag && b.flagged > 0);
    // Without exclusion the tight pair would push the second difference to ~1e-1.
    assert!(b.value < 1e-6, "{}", b.value);
}

/// The single-`M` form fails on rare pairs at the top order; this one is
/// frozen from the seeded suite.
#[test]
fn single_m_bound_can_fail_at_top_order() {
    let pair = &LemmaPair::suite(1, 3, 175)[174];
    let r = lemma_check(pair, 2, 2001).unwrap();
    assert!(r.hypothesis_holds);
    assert!(!r.holds && r.holds_2m);
    assert!(r.orders[..2].iter().all(|o| o.holds));
    assert!(!r.orders[2].holds);
}
