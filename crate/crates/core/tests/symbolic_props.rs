use cantor_scaling::symbolic::{lcp, regroup, regroup_with, rho_delta, ungroup_with, BlockOrder, DualPoint, Word};
use proptest::prelude::*;
use std::collections::HashSet;

fn word(d: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=d, 0..=max_len).prop_map(Word::from_symbols)
}

fn dual(d: u32) -> impl Strategy<Value = DualPoint> {
    (word(d, 6), prop::collection::vec(1..=d, 1..=4))
        .prop_map(|(p, q)| DualPoint::new(p, Word::from_symbols(q)).unwrap())
}

proptest! {
    #[test]
    fn lcp_is_symmetric(a in word(3, 12), b in word(3, 12)) {
        let x = lcp(&a, &b, None).unwrap();
        let y = lcp(&b, &a, None).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn lcp_with_own_truncation(p in dual(3), m in 0usize..40) {
        let t = p.truncate(m);
        prop_assert_eq!(lcp(&p, &t, None).unwrap().length, m);
    }

    #[test]
    fn truncation_is_monotone(p in dual(4)) {
        for n in 0..64 {
            prop_assert!(p.truncate(n).is_prefix_of(&p.truncate(n + 1)));
        }
    }

    #[test]
    fn rho_delta_is_ultrametric(a in word(2, 10), b in word(2, 10), c in word(2, 10), delta in 0.1f64..3.0) {
        let r = |x: &Word, y: &Word| rho_delta(delta, x, y, None).unwrap();
        prop_assert!(r(&a, &c) <= r(&a, &b).max(r(&b, &c)));
    }

    #[test]
    fn regroup_round_trip(blocks in prop::collection::vec(prop::collection::vec(1u32..=3, 2), 0..6)) {
        let w = Word::from_symbols(blocks.concat());
        for order in [BlockOrder::AsWritten, BlockOrder::Reversed] {
            let g = regroup_with(&w, 3, 2, order).unwrap();
            prop_assert!(g.symbols().iter().all(|&s| (1..=9).contains(&s)));
            prop_assert_eq!(ungroup_with(&g, 3, 2, order).unwrap(), w.clone());
        }
    }

    #[test]
    fn regrouped_lcp_is_floor(common in prop::collection::vec(1u32..=2, 0..12), a in prop::collection::vec(1u32..=2, 12), b in prop::collection::vec(1u32..=2, 12)) {
        let x: Vec<u32> = common.iter().chain(&a).copied().take(12).collect();
        let y: Vec<u32> = common.iter().chain(&b).copied().take(12).collect();
        let (x, y) = (Word::from_symbols(x), Word::from_symbols(y));
        let l = lcp(&x, &y, None).unwrap().length;
        let g = lcp(&regroup(&x, 2, 2).unwrap(), &regroup(&y, 2, 2).unwrap(), None).unwrap().length;
        prop_assert_eq!(g, l / 2);
    }
}

#[test]
fn regroup_is_injective_on_length_four() {
    let images: HashSet<Word> = Word::all_of_length(4, 2).map(|w| regroup(&w, 2, 2).unwrap()).collect();
    assert_eq!(images.len(), 16);
}

#[test]
fn regroup_rejects_ragged_words() {
    assert!(regroup(&Word::from_symbols(vec![1, 2, 1]), 2, 2).is_err());
}
