"""Smoke test for the `cantor` extension module.

Build and install first:  pip install -e crates/python --no-build-isolation
Then run:                 python3 python/smoke_test.py
"""

import math

import cantor


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    thirds = cantor.BranchSystem.affine(2, [1 / 3, 1 / 3, 1 / 3])
    a, b, log_len = thirds.cylinder("12")
    assert close(b - a, 1 / 9, 1e-15) and close(log_len, math.log(1 / 9), 1e-12)
    assert close(sum(thirds.ratio_geometry("1")), 1.0, 1e-12)

    power = cantor.BranchSystem.power_example(3, 2, 0.5)
    assert power.d == 3 and not power.is_affine
    assert close(sum(power.ratio_geometry("1211")), 1.0, 1e-12)
    assert power.log_length_residual("3111111111121") < 1e-9
    assert power.regroup(2).d == 9

    fit = cantor.smoothness_exponent(power, 2)
    assert close(fit["slope"], 1.5, 0.15) and fit["r_squared"] >= 0.97, fit
    probe = cantor.refutation_probe(power, 2, 0.8)
    assert probe["refuted"] and probe["monotone"], probe

    flat = cantor.PrescribedScaling.constant([0.2, 0.1, 0.3, 0.15, 0.25])
    tree = cantor.realize(flat, "13(21)", 6)
    assert tree.depth == 6 and tree.d == 3
    want = flat.ratio("231", "13(21)")
    got = tree.node_ratio("231")
    assert max(abs(x - y) for x, y in zip(got, want)) < 1e-12

    holder = cantor.holder_exponent(cantor.BranchSystem.power_example(2, 1, 0.5))
    assert close(holder["exponent"], 0.5, 0.1), holder
    assert cantor.holder_exponent(flat)["constant"]

    w = cantor.whitney_check(power, 2, 0.5)
    assert w["passed"] and not w["exact_case"], w

    t2 = cantor.realize(power, "(2)", 6)
    t3 = cantor.realize(power, "(3)", 6)
    assert cantor.conjugacy_smoothness(t2, t3, 2)["exact"]

    lemma = cantor.lemma_suite(pairs=5, k_max=2, grid=501)
    assert lemma["checks"] == 10 and lemma["failures_2m"] == 0, lemma

    assert cantor.lcp_length("1212", "1221", 2) == 2
    assert close(cantor.rho_delta(0.5, "12", "21", 2), 1.0, 1e-15)

    try:
        cantor.BranchSystem.power_example(2, 3, 0.5)
    except cantor.CantorError as e:
        assert "k < 2d - 1" in str(e)
    else:
        raise AssertionError("invalid order accepted")
    try:
        power.cylinder("14")
    except ValueError:
        pass
    else:
        raise AssertionError("symbol outside the alphabet accepted")

    print(f"cantor {cantor.__version__}: smoke test passed "
          f"(exponent {fit['slope']:.4f}, Hölder {holder['exponent']:.4f})")


if __name__ == "__main__":
    main()
