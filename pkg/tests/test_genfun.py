import doctest
import math
import random

import pytest

from orbifold.exact import HalfExpLaurent, monomial
from orbifold.geometry import derive_params, modified_euler_characteristic
from orbifold.genfun import (
    crosscheck,
    rank1_series,
    rank2_vb_closed_p12,
    rank2_vb_csets,
    rank2_vb_lambda,
    rank2_vb_r0,
    vb_to_tf,
)
from orbifold.sheafdata import tensor_shift

P120 = derive_params(1, 2, 0)

# Frozen rank-2 locally-free windows for the (1,2,0) surface, keyed by
# doubled exponent.  Every engine reproduces these exactly; a handful of
# coefficients deliberately differ from older hand-expanded tables (the
# per-family corrections are documented in genfun.py), so the numbers below
# are the cross-validated lattice counts, not transcriptions.  Absent keys
# mean coefficient 0.
GOLD_120 = {
    (0, 0): {4: 2, 0: 5, -4: 10, -8: 18, -12: 18, -16: 36},
    (1, 0): {8: 1, 6: 3, 4: 4, 2: 7, 0: 9, -2: 12, -4: 13, -6: 15,
             -8: 20, -10: 18, -12: 21, -14: 28, -16: 25},
    (0, 1): {8: 2, 4: 6, 0: 10, -2: 4, -4: 14, -6: -4, -8: 18, -10: 8,
             -12: 24, -16: 26},
    (1, 1): {12: 2, 10: 4, 8: 6, 6: 8, 4: 10, 2: 12, 0: 14, -2: 16,
             -4: 18, -6: 24, -8: 22, -10: 24, -12: 32, -14: 28, -16: 30},
}

# Same engines on the product surfaces used by the r = 0 double check.
GOLD_110 = {0: -1, -4: 4, -8: 12, -10: 4, -12: 3, -14: 8, -16: 20,
            -20: 40, -22: 8}
GOLD_130 = {8: 1, 6: 2, 4: 2, 2: 2, 0: 6, -2: 2, -4: 8, -6: 6, -8: 11,
            -10: 4, -12: 18}
GOLD_230 = {16: 1, 12: 2, 8: 7, 4: 5, 0: 4, -4: 19}


def assert_window(series, expected):
    """Every slot of the sound window matches, including the implicit zeros."""
    top = max(max(expected), series.max2exp)
    for e2 in range(series.min2exp, top + 1):
        assert series.coeff2(e2) == expected.get(e2, 0), "exp2=%d" % e2


@pytest.fixture(scope="module")
def engines120():
    out = {}
    for cls in GOLD_120:
        out[cls] = {
            "csets": rank2_vb_csets(P120, cls, min2exp=-16),
            "r0": rank2_vb_r0(1, 2, cls, min2exp=-16),
            "closed": rank2_vb_closed_p12(cls, min2exp=-16),
            "lambda": rank2_vb_lambda(P120, cls, min2exp=-16),
        }
    return out


# ------------------------------------------------------------ rank 2 gold


def test_csets_matches_gold_windows(engines120):
    for cls, gold in GOLD_120.items():
        assert_window(engines120[cls]["csets"], gold)


def test_all_engines_agree_on_112_surface(engines120):
    # window spans at least 11 coefficient slots from each leading term
    for cls, wins in engines120.items():
        lead2 = wins["csets"].max2exp
        assert (lead2 + 16) // 2 + 1 >= 11
        for name in ("r0", "closed", "lambda"):
            assert wins["csets"].same_window_coeffs(wins[name]), (cls, name)
            assert_window(wins[name], GOLD_120[cls])


def test_csets_r0_agree_on_product_surfaces():
    # 12 slots measured from the leading exponent of each series
    for (a, b), gold, lo2 in [((1, 1), GOLD_110, -22),
                              ((1, 3), GOLD_130, -14),
                              ((2, 3), GOLD_230, -6)]:
        pr = derive_params(a, b, 0)
        sc = rank2_vb_csets(pr, (0, 0), min2exp=lo2)
        sr = rank2_vb_r0(a, b, (0, 0), min2exp=lo2)
        assert (sc.max2exp - lo2) // 2 + 1 >= 12
        assert sc.same_window_coeffs(sr)
        for e2, coeff in gold.items():
            assert sc.coeff2(e2) == coeff


def test_lambda_agrees_at_positive_twist():
    pr = derive_params(2, 3, 1)
    for cls, lo2 in [((0, 0), 0), ((1, 0), 2)]:
        sc = rank2_vb_csets(pr, cls, min2exp=lo2)
        sl = rank2_vb_lambda(pr, cls, min2exp=lo2)
        assert not sc.is_zero
        assert sc.same_window_coeffs(sl)


def test_negative_coefficient_is_real(engines120):
    # the (0,1) window carries a genuinely negative signed count
    for name in ("csets", "r0", "closed", "lambda"):
        assert engines120[(0, 1)][name].coeff2(-6) == -4


# ------------------------------------------------------------ rank 1


def partition_counts(limit):
    p = [1] + [0] * limit
    for part in range(1, limit + 1):
        for n in range(part, limit + 1):
            p[n] += p[n - part]
    return p


def quadruple_counts(a, b, limit):
    """Partition quadruples with per-cell costs (a, b, b, a), by deficit.

    Two of the four partitions pay a per cell and two pay b, so the count
    at deficit d convolves two pair-counts over the splittings a*s + b*t = d.
    This is a from-scratch oracle: no series arithmetic involved.
    """
    p = partition_counts(limit)
    pairs = [sum(p[i] * p[d - i] for i in range(d + 1))
             for d in range(limit + 1)]
    out = []
    for d in range(limit + 1):
        total = 0
        for s in range(d // a + 1):
            rem = d - a * s
            if rem % b == 0:
                total += pairs[s] * pairs[rem // b]
        out.append(total)
    return out


def test_rank1_series_examples():
    assert_window(rank1_series(P120, (0, 0), -6),
                  {4: 1, 2: 2, 0: 7, -2: 14, -4: 35, -6: 66})
    # on the (1,1) product the series leads at q^1 (the hull characteristic)
    assert_window(rank1_series(derive_params(1, 1, 0), (0, 0), -6),
                  {2: 1, 0: 4, -2: 14, -4: 40, -6: 105})
    assert_window(rank1_series(derive_params(2, 3, 1), (0, 0), -6),
                  {10: 1, 6: 2, 4: 2, 2: 5, 0: 4, -2: 15, -4: 10, -6: 30})


def test_rank1_matches_partition_counts():
    deficits = 14
    for a, b, r in [(1, 1, 0), (1, 2, 0), (2, 3, 1), (1, 3, 2)]:
        pr = derive_params(a, b, r)
        oracle = quadruple_counts(a, b, deficits)
        for cls in [(0, 0), (1, 1)]:
            series = rank1_series(pr, cls, 0)
            lead2 = series.max2exp
            series = rank1_series(pr, cls, lead2 - 2 * deficits)
            for e2 in range(series.min2exp, lead2 + 1):
                off = lead2 - e2
                want = oracle[off // 2] if off % 2 == 0 else 0
                assert series.coeff2(e2) == want, (a, b, r, cls, e2)


def test_rank1_lead_is_hull_characteristic():
    rng = random.Random(1207)
    for _ in range(40):
        while True:
            a = rng.randrange(1, 6)
            b = rng.randrange(1, 6)
            if math.gcd(a, b) == 1:
                break
        pr = derive_params(a, b, rng.randrange(0, 4))
        cls = (rng.randrange(-2, 3), rng.randrange(-2, 3))
        chi = modified_euler_characteristic(pr, cls)
        series = rank1_series(pr, cls, 2 * chi - 6)
        assert series.max2exp == 2 * chi
        assert series.coeff2(2 * chi) == 1


def test_rank1_class_only_moves_the_lead():
    # the quadruple-partition tail never depends on the hull class, so any
    # two classes give the same series up to the characteristic shift
    rng = random.Random(41)
    for pr in (P120, derive_params(2, 3, 1)):
        for _ in range(25):
            c1 = (rng.randrange(-2, 3), rng.randrange(-2, 3))
            c2 = (rng.randrange(-2, 3), rng.randrange(-2, 3))
            d2 = 2 * (modified_euler_characteristic(pr, c2)
                      - modified_euler_characteristic(pr, c1))
            base = rank1_series(pr, c1, -8)
            moved = rank1_series(pr, c2, -8 + d2)
            assert moved == base.shift2(d2)


# ------------------------------------------------------------ vb -> tf


def test_vb_to_tf_unit_rank_reproduces_rank1():
    for a, b, r in [(1, 2, 0), (1, 1, 0), (2, 3, 1)]:
        pr = derive_params(a, b, r)
        for cls in [(0, 0), (1, 0), (0, 1)]:
            chi = modified_euler_characteristic(pr, cls)
            lo2 = 2 * chi - 16
            one = monomial(chi, 1, min2exp=lo2)
            assert vb_to_tf(one, 1, pr) == rank1_series(pr, cls, lo2)


def test_vb_to_tf_zero_and_rank_guard():
    zero = HalfExpLaurent(-4, {})
    assert vb_to_tf(zero, 3, P120).is_zero
    with pytest.raises(ValueError):
        vb_to_tf(monomial(0), 0, P120)


def test_vb_to_tf_rank2_first_correction():
    pr = derive_params(1, 1, 0)
    tf = vb_to_tf(monomial(0, 1, min2exp=-8), 2, pr)
    assert tf.coeff2(0) == 1
    # 2*rank factors of step one from each of the two coordinate lines
    assert tf.coeff2(-2) == 8


def test_vb_to_tf_rank2_on_gold_window(engines120):
    # convolving the frozen vb window stays exact on the shared window and
    # only adds nonnegative combinations
    vb = engines120[(0, 0)]["csets"]
    tf = vb_to_tf(vb, 2, P120)
    assert tf.min2exp == vb.min2exp
    assert tf.coeff2(4) == vb.coeff2(4)
    assert tf.coeff2(2) == vb.coeff2(2) + 4 * vb.coeff2(4)


# ------------------------------------------------------------ covariance


def test_rank2_shift_covariance(engines120):
    base = engines120[(0, 0)]["csets"]
    for (i, j), g in [((1, 0), 2), ((0, 1), 4), ((1, 1), 8)]:
        assert tensor_shift(i, j, (0, 0), P120) == g
        moved = rank2_vb_csets(P120, (2 * i, 2 * j), min2exp=-16 + 2 * g)
        assert moved == base.shift2(2 * g)


# ------------------------------------------------------------ plumbing


def test_explicit_bounds_match_stabilized(engines120):
    auto = engines120[(0, 0)]["csets"].truncate(-12)
    for bound in (64, 128):
        assert rank2_vb_csets(P120, (0, 0), min2exp=-12, bound=bound) == auto
    auto_l = engines120[(0, 0)]["lambda"].truncate(-12)
    assert rank2_vb_lambda(P120, (0, 0), min2exp=-12, bound=64) == auto_l


def test_window_truncation_consistency(engines120):
    deep = engines120[(1, 0)]["csets"]
    assert deep.truncate(-6) == rank2_vb_csets(P120, (1, 0), min2exp=-6)


def test_thread_count_does_not_change_windows(monkeypatch):
    monkeypatch.setenv("ORBIFOLD_THREADS", "1")
    serial = rank2_vb_csets(P120, (0, 1), min2exp=-10)
    monkeypatch.setenv("ORBIFOLD_THREADS", "3")
    threaded = rank2_vb_csets(P120, (0, 1), min2exp=-10)
    assert serial == threaded


def test_engine_domain_errors():
    with pytest.raises(ValueError):
        rank2_vb_csets(derive_params(1, 2, -1), (0, 0), -4)
    with pytest.raises(ValueError):
        rank2_vb_lambda(derive_params(1, 2, -1), (0, 0), -4)
    with pytest.raises(ValueError):
        rank2_vb_closed_p12((2, 0), -4)
    with pytest.raises(ValueError):
        rank2_vb_r0(2, 4, (0, 0), -4)


# ------------------------------------------------------------ crosscheck


def test_crosscheck_collects_applicable_engines():
    rep = crosscheck(P120, (0, 0), -8)
    assert rep.engines == ("csets", "r0", "closed")
    assert rep.agree and rep.first_disagreement2 is None

    rep4 = crosscheck(P120, (0, 0), -8, include_lambda=True)
    assert rep4.engines == ("csets", "r0", "closed", "lambda")
    assert rep4.agree

    rep23 = crosscheck(derive_params(2, 3, 0), (0, 0), 4)
    assert rep23.engines == ("csets", "r0")
    assert rep23.agree


def test_crosscheck_reports_shared_coefficients():
    rep = crosscheck(P120, (0, 1), -8, include_lambda=True)
    assert rep.agree
    for _, win in rep.windows:
        assert win.coeff2(-6) == -4

    data = rep.to_json()
    assert data["surface"] == {"a": 1, "b": 2, "r": 0}
    assert data["c1"] == {"m": 0, "n": 1}
    assert set(data["engines"]) == {"csets", "r0", "closed", "lambda"}
    assert data["agree"] is True
    assert data["first_disagreement_exp2"] is None


def test_module_doctests():
    import orbifold.genfun as mod

    assert doctest.testmod(mod).failed == 0
