import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparsemix import empirical as E
from sparsemix import normal_dist as nd
from sparsemix.mixture import TwoPointMixture, sample

SMALL = E.SortedSample([2.5, -0.5, 1.0, 0.3])


def test_sorted_sample_basics():
    assert list(SMALL.values) == [-0.5, 0.3, 1.0, 2.5]
    assert SMALL.n == 4
    with pytest.raises(ValueError):
        E.SortedSample([])
    with pytest.raises(ValueError):
        E.SortedSample([0.0, float("nan")])
    with pytest.raises(ValueError):
        SMALL.values[0] = 3.0


def test_ecdf_examples():
    assert E.ecdf_at(SMALL, 0.3) == 0.5
    assert E.ecdf_at(SMALL, -10.0) == 0.0
    assert E.ecdf_at(SMALL, 2.5) == 1.0
    assert E.ecdf_at(SMALL, 99.0) == 1.0
    assert SMALL.esf(0.3) == 0.5


def test_envelope_examples():
    env = E.envelope(0.0, 1.0, 100)
    assert env.lower == 0.0
    assert env.upper == pytest.approx(0.01 / 1.01, rel=1e-14)
    env = E.envelope(0.5, 1.0, 100)
    half = 0.1 / (2 * math.sqrt(1.01))
    assert env.lower == pytest.approx(0.5 - half, rel=1e-14)
    assert env.upper == pytest.approx(0.5 + half, rel=1e-14)
    env = E.envelope(0.5, 0.0, 1000)
    assert env.lower == env.upper == 0.5
    with pytest.raises(ValueError):
        E.envelope(0.5, -1.0, 10)
    with pytest.raises(ValueError):
        E.envelope(1.5, 1.0, 10)


def _relation_residual(fn, a, n, v, v_c):
    """Relative gap in sqrt(n)|fn - v| = a sqrt(v (1 - v)), with 1 - v taken as v_c."""
    fn, a, n, v, v_c = (mpmath.mpf(float(x)) for x in (fn, a, n, v, v_c))
    gap = abs(fn - v) if v <= 0.5 else abs((1 - fn) - v_c)
    lhs = mpmath.sqrt(n) * gap
    rhs = a * mpmath.sqrt(v * v_c)
    scale = max(lhs, rhs)
    return abs(lhs - rhs) / scale if scale else mpmath.mpf(0)


def _worst_residual(fn, a, n):
    env = E.envelope(fn, a, n)
    assert env.lower <= fn <= env.upper
    return max(_relation_residual(fn, a, n, env.lower, env.lower_c),
               _relation_residual(fn, a, n, env.upper, env.upper_c))


def test_envelope_relation_random_triples():
    rng = np.random.default_rng(20)
    fn = rng.uniform(0, 1, 10_000)
    a = rng.uniform(0.01, 10, 10_000)
    n = np.floor(10 ** rng.uniform(1, 8, 10_000)).astype(int)
    worst = max(_worst_residual(f, aa, int(nn)) for f, aa, nn in zip(fn, a, n))
    assert worst <= 1e-10


# below ~1e-150 the smaller root (about fn**2) is no longer a normal double
@given(st.floats(0, 1).filter(lambda f: f == 0 or f > 1e-150), st.floats(0.01, 50),
       st.integers(1, 10**8))
@settings(max_examples=300)
def test_envelope_relation_property(fn, a, n):
    assert _worst_residual(fn, a, n) <= 1e-10


def test_envelope_complements_consistent():
    fn = np.linspace(0, 1, 101)
    lo, hi, lo_c, hi_c = E.envelope_bounds(fn, 2.5, 50, complements=True)
    np.testing.assert_allclose(lo + lo_c, 1.0, atol=2e-16)
    np.testing.assert_allclose(hi + hi_c, 1.0, atol=2e-16)


@given(st.floats(0, 1), st.floats(0, 20), st.floats(0, 20), st.integers(1, 10**7))
def test_envelope_nesting(fn, a1, a2, n):
    a_small, a_big = sorted((a1, a2))
    lo1, hi1 = E.envelope_bounds(fn, a_small, n)
    lo2, hi2 = E.envelope_bounds(fn, a_big, n)
    assert lo2 <= lo1 and hi1 <= hi2
    assert 0.0 <= lo2 <= hi2 <= 1.0


def test_envelope_survival_symmetry():
    fn = np.array([1e-6, 0.01, 0.3, 0.5])
    lo, hi = E.envelope_bounds(fn, 2.0, 1000)
    lo_c, hi_c = E.envelope_bounds(1 - fn, 2.0, 1000)
    np.testing.assert_allclose(lo, 1 - hi_c, rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose(hi, 1 - lo_c, rtol=1e-9, atol=1e-15)


def _brute_y(values, cdf, n):
    # dense scan plus one-sided limits at every sample point, in mpmath
    top = math.sqrt(2 * math.log(n)) if n > 1 else 0.0
    pts = [float(x) for x in np.linspace(0, top, 2001)] + [x for x in values if 0 <= x <= top]
    best = mpmath.mpf(0)
    for t in pts:
        f = mpmath.ncdf(t)
        for count in (int(sum(v <= t for v in values)), int(sum(v < t for v in values))):
            dev = abs(mpmath.mpf(count) / n - f) / mpmath.sqrt(f * (1 - f))
            best = max(best, dev)
    return float(mpmath.sqrt(n) * best)


def test_y_n_examples():
    assert E.y_n_statistic(E.SortedSample([0.0]), nd.cdf) == pytest.approx(1.0)
    ref = _brute_y(list(SMALL.values), nd.cdf, 4)
    assert E.y_n_statistic(SMALL, nd.cdf) == pytest.approx(ref, rel=1e-10)


def test_y_n_dense_scan_never_exceeds_exact():
    m = TwoPointMixture(0.05, 2.0)
    x = sample(m, 300, seed=11)
    exact = E.y_n_statistic(x, m)
    t = np.linspace(0, math.sqrt(2 * math.log(300)), 20001)
    f = m.cdf(t)
    scan = math.sqrt(300) * np.max(np.abs(x.ecdf(t) - f) / np.sqrt(f * (1 - f)))
    assert scan <= exact * (1 + 1e-12)
    assert scan >= exact * 0.98


def test_y_n_rejects_degenerate():
    with pytest.raises(ValueError):
        E.y_n_statistic(SMALL, lambda t: np.ones_like(np.asarray(t, float)))


def test_weighted_sup_hand_values():
    u = np.array([0.2, 0.6])
    # candidates: |1/2 - .2|, |0 - .2| at .2 ; |1 - .6|, |1/2 - .6| at .6
    expect = math.sqrt(2) * max(0.3 / math.sqrt(0.16), 0.2 / math.sqrt(0.16),
                                0.4 / math.sqrt(0.24), 0.1 / math.sqrt(0.24))
    assert E.weighted_sup(u, 1 - u) == pytest.approx(expect, rel=1e-14)


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
@settings(max_examples=100)
def test_weighted_sup_matches_dense_scan(n, seed):
    u, v = E.sorted_uniforms(np.random.default_rng(seed), n)
    exact = E.weighted_sup(u, v)
    # dense scan of the flat pieces, including points next to each jump
    t = np.concatenate([np.linspace(1e-9, 1 - 1e-9, 4001), u, np.nextafter(u, 0)])
    vn = np.searchsorted(u, t, side="right") / n
    scan = math.sqrt(n) * np.max(np.abs(vn - t) / np.sqrt(t * (1 - t)))
    assert scan <= exact * (1 + 1e-9)
    assert scan >= exact * (1 - 1e-6)


def test_sorted_uniforms_complement():
    u, v = E.sorted_uniforms(np.random.default_rng(0), 1000)
    assert np.all(np.diff(u) > 0)
    np.testing.assert_allclose(u + v, 1.0, rtol=0, atol=1e-14)


def test_sup_statistic_dominance():
    for k in range(30):
        u, v = E.sorted_uniforms(E.cycle_rng(7, k), 2000)
        plus = E.sup_statistic("wn_plus", u, v)
        star = E.sup_statistic("wn_star", u, v)
        assert plus <= star


def test_sup_statistic_window_check():
    u, v = E.sorted_uniforms(E.cycle_rng(1, 0), 5000)
    with pytest.raises(ValueError):
        E.sup_statistic("nope", u, v)
    assert E.sup_statistic("wn_plus_plus", u, v) > 0


def test_simulate_deterministic():
    a = E.simulate_sup_statistic("wn_plus", 500, reps=3, seed=1)
    b = E.simulate_sup_statistic("wn_plus", 500, reps=3, seed=1)
    c = E.simulate_sup_statistic("wn_plus", 500, reps=3, seed=2)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, c)
    one = E.simulate_sup_statistic("wn_star", 100, reps=1, seed=5)
    two = E.simulate_sup_statistic("wn_star", 100, reps=1, seed=6)
    assert one[0] != two[0]


def test_simulate_parallel_identical():
    a = E.simulate_sup_statistic("wn_plus_plus", 2000, reps=8, seed=3, workers=1)
    b = E.simulate_sup_statistic("wn_plus_plus", 2000, reps=8, seed=3, workers=3)
    assert a.tobytes() == b.tobytes()


def test_simulate_rejects():
    with pytest.raises(ValueError):
        E.simulate_sup_statistic("wn_plus", 100, reps=0)
    with pytest.raises(ValueError):
        E.simulate_sup_statistic("bad", 100, reps=2)


@pytest.mark.slow
@pytest.mark.parametrize("n", [10**4, 10**5])
def test_wn_star_median_lil_scale(n):
    draws = E.simulate_sup_statistic("wn_star", n, reps=1000, seed=n)
    med = np.median(draws) / math.sqrt(2 * math.log(math.log(n)))
    assert 0.8 <= med <= 1.3


def test_critical_value_examples():
    assert E.critical_value(list(range(1, 101)), 0.05) == 95
    assert E.critical_value([7.0], 0.3) == 7.0
    assert E.critical_value(list(range(1, 101)), 0.5) == 50
    with pytest.raises(ValueError):
        E.critical_value([1.0, 2.0], 0.0)
    with pytest.raises(ValueError):
        E.critical_value([1.0, 2.0], 1.0)
    with pytest.raises(ValueError):
        E.critical_value([], 0.1)


def test_table_round_trip(tmp_path):
    draws = np.arange(1.0, 1001.0)
    table = E.CriticalValueTable.from_draws("wn_plus_plus", 1000, draws, [0.05, 0.5], seed=9)
    assert table.c0 == 3.0
    assert table.value(0.05) == 950.0
    assert E.critical_value(table, 0.5) == 500.0
    path = tmp_path / "t.json"
    table.save(path)
    doc = json.loads(path.read_text())
    assert set(doc) == {"statistic", "n", "c0", "reps", "seed", "quantiles"}
    assert doc["quantiles"][0] == {"alpha": 0.05, "a": 950.0}
    loaded = E.CriticalValueTable.load(path, n=1000, statistic="wn_plus_plus")
    assert loaded == table
    with pytest.raises(ValueError):
        E.CriticalValueTable.load(path, n=999)
    with pytest.raises(ValueError):
        E.CriticalValueTable.load(path, statistic="wn_star")
    with pytest.raises(KeyError):
        table.value(0.1)


def test_table_errors(tmp_path):
    with pytest.raises(ValueError):
        E.CriticalValueTable("wn_plus", 10, 1000, 0, {0.05: 1.0, 0.5: 2.0})
    with pytest.raises(FileNotFoundError):
        E.CriticalValueTable.load(tmp_path / "missing.json")
    table = E.CriticalValueTable("wn_star", 10, 1000, 0, {0.05: 2.0})
    with pytest.raises(OSError, match="nodir"):
        table.save(tmp_path / "nodir" / "t.json")
