mod common;

use cantor_scaling::symbolic::Word;

const DEPTH: usize = 8;

#[test]
fn refinement_holds_exhaustively() {
    for (name, sys) in common::suite() {
        let d = sys.d();
        for n in 0..DEPTH {
            for w in Word::all_of_length(n, d) {
                let parent = sys.cylinder_hull(&w).unwrap();
                for j0 in 1..=d as u32 {
                    let child = sys.cylinder_hull(&w.prepend(j0)).unwrap();
                    // Outer children share an endpoint with the parent up to the
                    // relative 1e-15 of the inverse-branch solve, twice over.
                    assert!(
                        parent.contains(&child, 1e-14),
                        "{name}: {:?} not inside {:?}",
                        w.prepend(j0),
                        w
                    );
                }
            }
        }
    }
}

#[test]
fn forward_map_shifts_cylinders() {
    for (name, sys) in common::suite() {
        let d = sys.d();
        for n in 1..=DEPTH {
            for w in Word::all_of_length(n, d) {
                let h = sys.cylinder_hull(&w).unwrap();
                let up = sys.cylinder_hull(&w.shift_drop_last().unwrap()).unwrap();
                let branch = sys.branch(w.symbols()[n - 1]).unwrap();
                let a = branch.forward(h.a);
                let b = branch.forward(h.b());
                assert!((a - up.a).abs() < 1e-10 && (b - up.b()).abs() < 1e-10, "{name}: {w:?}");
            }
        }
    }
}

#[test]
fn children_increase_with_symbol() {
    for (name, sys) in common::suite() {
        let d = sys.d();
        for n in 0..6 {
            for w in Word::all_of_length(n, d) {
                let dec = sys.child_decomposition(&w).unwrap();
                for pair in dec.children.windows(2) {
                    assert!(pair[0].b() < pair[1].a, "{name}: children of {w:?} out of order");
                }
            }
        }
    }
}

#[test]
fn lengths_contract() {
    for (name, sys) in common::suite() {
        let lambda = sys.contraction_factor();
        assert!(lambda < 1.0, "{name}");
        for n in 0..=DEPTH {
            for w in Word::all_of_length(n, sys.d()) {
                let len = sys.cylinder_hull(&w).unwrap().len();
                assert!(len <= lambda.powi(n as i32) * (1.0 + 1e-12), "{name}: {w:?}");
            }
        }
    }
}

#[test]
fn log_length_matches_direct_subtraction() {
    for (name, sys) in common::suite() {
        let d = sys.d() as u32;
        for n in 1..=20usize {
            let w = Word::from_symbols((0..n).map(|i| (i as u32 * 7 + n as u32) % d + 1).collect());
            let h = sys.cylinder_hull(&w).unwrap();
            let direct = (h.b() - h.a).ln();
            // Subtraction loses eps·|b| / |I_w| of relative accuracy.
            let slack = 1e-9 + 4.0 * f64::EPSILON * h.b().abs() / h.len();
            assert!((direct - h.log_len).abs() < slack, "{name}: depth {n}");
        }
    }
}

#[test]
fn hulls_ending_at_a_domain_end_keep_their_length() {
    // Pieces of I_{3..3 1} end at the top of J_1, where the inverse solve's
    // rounding is comparable to the piece lengths.
    let sys = common::power3();
    let mut s = vec![1];
    s.extend([3; 10]);
    s.push(1);
    let r = cantor_scaling::ratio::log_length_residual(&sys, &Word::from_symbols(s)).unwrap();
    assert!(r < 1e-12, "residual {r:e}");
}
