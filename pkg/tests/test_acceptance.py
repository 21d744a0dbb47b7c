"""Acceptance criteria, one test group per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

import csv
import itertools
import json
import math
import time
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from oneswitch import du, verify
from oneswitch.cli import main
from oneswitch.core import PowerUtility, PreferenceModel
from oneswitch.discount import (
    Exponential,
    Hyperbolic,
    Impatience,
    LinearTimesExponential,
    ParamOutOfRange,
    SumOfExponentials,
    classify_impatience,
    to_json,
    validate,
)
from oneswitch.mixture import mix
from oneswitch.verify import SHAPE_TO_IMPATIENCE, SwitchKind

from oracles import D_mp, rate_derivative_mp, rate_mp
from test_mixture import random_lottery_sequence

SIGMA_MAX, GRID_POINTS = 500.0, 50_001
N_INSTANCES = 10_000
WITNESS_SEED = 20240601


def criterion(n):
    return pytest.mark.criterion(n)


# ---------------------------------------------------------------- 1


def _accepts(obj):
    try:
        validate(obj)
    except ParamOutOfRange:
        return False
    return True


SUM_A = ["-0.5", "0", "0.5", "1", "1.2", "1.5", "1.6", "2", "3", "4"]
SUM_B = ["-0.01", "0", "0.01", "0.03", "0.05", "0.1", "0.3", "0.5", "1", "2"]
SUM_C = ["-0.05", "0", "0.01", "0.03", "0.05", "0.1", "0.25", "0.5", "1", "2"]
LIN_C1 = ["-1", "0", "0.5", "0.9", "0.99", "1", "1.01", "1.1", "2", "3"]
LIN_C2 = ["-0.05", "0", "0.01", "0.02", "0.03", "0.05", "0.1", "0.5", "1", "2"]
LIN_R1 = ["-2", "-1", "-0.5", "-0.1", "-0.05", "-0.03", "-0.01", "0", "0.01", "0.05"]
LIN_R = ["-0.03", "0", "0.01", "0.02", "0.03", "0.05", "0.1", "0.5", "1", "2"]


@criterion(1)
def test_parameter_gate_sum_exp():
    t0 = time.perf_counter()
    boundary = 0
    for a, b, c in itertools.product(SUM_A, SUM_B, SUM_C):
        A, B, C = map(Fraction, (a, b, c))
        expected = A > 0 and B > 0 and C > 0 and A <= B / C + 1
        boundary += C > 0 and A == B / C + 1
        got = _accepts({"sum_exp": {"a": float(a), "b": float(b), "c": float(c)}})
        assert got == expected, (a, b, c)
    assert boundary >= 5
    assert time.perf_counter() - t0 < 1.0


@criterion(1)
def test_parameter_gate_lin_exp():
    t0 = time.perf_counter()
    boundary = 0
    for c1, c2, r1 in itertools.product(LIN_C1, LIN_C2, LIN_R1):
        C1, C2, R = Fraction(c1), Fraction(c2), -Fraction(r1)
        expected = C1 == 1 and R > 0 and C2 >= 0 and R >= C2
        boundary += C1 == 1 and R == C2 and R > 0
        got = _accepts({"lin_exp": {"c1": float(c1), "c2": float(c2), "r1": float(r1)}})
        assert got == expected, (c1, c2, r1)
    for c, r in itertools.product(LIN_C2, LIN_R):
        C, R = Fraction(c), Fraction(r)
        assert _accepts({"lin_exp": {"c": float(c), "r": float(r)}}) == (R > 0 and C >= 0 and R >= C)
    for r in LIN_R:
        assert _accepts({"exponential": {"r": float(r)}}) == (Fraction(r) > 0)
        assert _accepts({"hyperbolic": {"k": float(r)}}) == (Fraction(r) > 0)
    assert boundary >= 3
    assert time.perf_counter() - t0 < 1.0


# ---------------------------------------------------------------- 2, 3, 9


@pytest.fixture(scope="module")
def one_switch_family_runs():
    """Numeric scans of 10,000 random instances per one-switch family."""
    runs = {}
    for family, seed in (("lin_exp", 101), ("sum_exp", 202)):
        rng = np.random.default_rng(seed)
        items, elapsed = [], 0.0
        for _ in range(N_INSTANCES):
            model = PreferenceModel(PowerUtility(), verify.random_discount(family, rng))
            a, b = verify.random_pair(rng, model.utility)
            t0 = time.perf_counter()
            an = du.switch_numeric(model, a, b, SIGMA_MAX, GRID_POINTS)
            elapsed += time.perf_counter() - t0
            items.append((model, a, b, an))
        runs[family] = (items, elapsed)
    return runs


@criterion(2)
@pytest.mark.parametrize("family", ["lin_exp", "sum_exp"])
def test_at_most_one_sign_change(one_switch_family_runs, family):
    items, _ = one_switch_family_runs[family]
    assert len(items) == N_INSTANCES
    worst = max(an.n_crossings for *_, an in items)
    assert worst <= 1


@criterion(2)
def test_one_switch_runtime(one_switch_family_runs):
    total = sum(elapsed for _, elapsed in one_switch_family_runs.values())
    print(f"numeric scans of {2 * N_INSTANCES} instances: {total:.1f} s")
    assert total < 120.0


@criterion(3)
@pytest.mark.parametrize("family", ["lin_exp", "sum_exp"])
def test_closed_form_matches_numeric(one_switch_family_runs, family):
    items, _ = one_switch_family_runs[family]
    unique = 0
    for model, a, b, an in items:
        if an.verdict is not du.Verdict.UNIQUE_SWITCH:
            continue
        unique += 1
        cf = du.switch_closed_form(model, a, b)
        assert cf.verdict is du.Verdict.UNIQUE_SWITCH
        assert abs(cf.sigma_star - an.sigma_star) <= 1e-9
    assert unique > 100


@criterion(9)
@pytest.mark.parametrize("family", ["lin_exp", "sum_exp"])
def test_zero_set_contiguous(one_switch_family_runs, family):
    items, _ = one_switch_family_runs[family]
    for *_, an in items:
        assert verify.zero_set_is_interval(an, (0.0, SIGMA_MAX)).is_interval


@criterion(9)
def test_zero_set_sinusoidal_control():
    an = du.scan(lambda s: (np.sin(s) * np.exp(-0.01 * s), np.ones_like(s)), 0.5, SIGMA_MAX, GRID_POINTS)
    check = verify.zero_set_is_interval(an, (0.5, SIGMA_MAX))
    assert not check.is_interval and check.gap is not None


# ---------------------------------------------------------------- 4


@criterion(4)
def test_hyperbolic_violation(hyperbolic_witness):
    obj, fa, fb = hyperbolic_witness
    assert obj["seed"] == WITNESS_SEED and obj["budget"] == 10**6
    model = PreferenceModel(PowerUtility(), Hyperbolic(1.0))
    res = verify.double_switch_search(model, WITNESS_SEED, 10**6)
    assert isinstance(res, verify.OneSwitchVerdict) and res.kind is SwitchKind.VIOLATION
    w = res.witness
    assert (w.seq_a, w.seq_b) == (fa, fb)
    dense = du.switch_numeric(model, w.seq_a, w.seq_b, SIGMA_MAX, 2 * GRID_POINTS - 1)
    assert dense.n_crossings >= 2
    np.testing.assert_allclose(dense.crossings, obj["crossings"], atol=1e-9)
    # opposite strict signs around each crossing
    for c in dense.crossings:
        left, right = du.delta(model, fa, fb, c - 1e-3), du.delta(model, fa, fb, c + 1e-3)
        assert left * right < 0


# ---------------------------------------------------------------- 5


@criterion(5)
@pytest.mark.parametrize("family", ["exponential", "lin_exp", "sum_exp", "hyperbolic"])
def test_impatience_agreement(family):
    rng = np.random.default_rng(5)
    for _ in range(100):
        D = verify.random_discount(family, rng)
        rule = classify_impatience(D).tag
        ratio = verify.impatience_oracle(D).tag
        shape = SHAPE_TO_IMPATIENCE[verify.log_concavity_oracle(D).shape]
        assert rule is ratio is shape, (D, rule, ratio, shape)


@criterion(5)
@pytest.mark.parametrize(
    "D, tag",
    [
        (LinearTimesExponential(0.01, 0.03), Impatience.STRICTLY_II),
        (SumOfExponentials(0.5, 0.03, 0.05), Impatience.STRICTLY_DI),
        (SumOfExponentials(1.2, 0.03, 0.05), Impatience.STRICTLY_II),
        (SumOfExponentials(1.0, 0.03, 0.05), Impatience.STATIONARY),
        (LinearTimesExponential(0.0, 0.03), Impatience.STATIONARY),
    ],
)
def test_impatience_named_cases(D, tag):
    assert classify_impatience(D).tag is tag
    assert verify.impatience_oracle(D).tag is tag
    assert SHAPE_TO_IMPATIENCE[verify.log_concavity_oracle(D).shape] is tag


# ---------------------------------------------------------------- 6


@criterion(6)
def test_rate_formulas_match_finite_differences():
    rng = np.random.default_rng(6)
    families = ["exponential", "lin_exp", "sum_exp", "hyperbolic"]
    for k in range(1000):
        fam = families[k % 4]
        D = verify.random_discount(fam, rng)
        t = float(rng.uniform(0.0, 100.0))
        params = to_json(D)[fam]
        r_ref = rate_mp(fam, params, t)
        assert math.isclose(float(D.rate(t)), float(r_ref), rel_tol=1e-6)
        rd = float(D.rate_derivative(t))
        rd_ref = rate_derivative_mp(fam, params, t)
        if classify_impatience(D).tag is Impatience.STATIONARY:
            assert abs(rd) <= 1e-14 and abs(rd_ref) <= 1e-14
        else:
            assert math.isclose(rd, float(rd_ref), rel_tol=1e-6), (D, t)


@criterion(6)
def test_lin_exp_rate_at_zero():
    D = LinearTimesExponential(0.01, 0.03)
    assert abs(float(D.rate(0.0)) - (D.r - D.c)) <= 1e-15


@criterion(6)
def test_lin_exp_rate_asymptote():
    D = LinearTimesExponential(0.01, 0.03)
    assert abs(float(D.rate(1e4)) - 0.03) <= 1e-6


# ---------------------------------------------------------------- 7


@criterion(7)
@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize(
    "D",
    [LinearTimesExponential(0.01, 0.03), SumOfExponentials(0.5, 0.03, 0.05), SumOfExponentials(1.2, 0.03, 0.05)],
    ids=["lin_exp", "sum_exp_a05", "sum_exp_a12"],
)
def test_indifference_propagates(D, sigma):
    triple = verify.build_indifference_triple(D, sigma)
    check = verify.difference_equation_check(D, triple, np.linspace(0.0, 200.0, 2001))
    assert check.passed and check.max_residual <= 1e-10


@criterion(7)
@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0, 5.0])
def test_hyperbolic_breaks_recurrence(sigma):
    D = Hyperbolic(1.0)
    triple = verify.build_indifference_triple(D, sigma)
    check = verify.difference_equation_check(D, triple, np.linspace(0.0, 200.0, 2001))
    assert not check.passed and check.max_residual > 1e-4


# ---------------------------------------------------------------- 8


@criterion(8)
def test_mixture_linearity_and_axioms():
    rng = np.random.default_rng(8)
    for k in range(1000):
        D = verify.random_discount(["lin_exp", "sum_exp", "exponential"][k % 3], rng)
        model = PreferenceModel(PowerUtility(float(rng.uniform(0.3, 2.0))), D)
        U = lambda s: du.utility(model, s)
        x, y = random_lottery_sequence(rng), random_lottery_sequence(rng)
        lam, mu = (float(v) for v in rng.uniform(size=2))
        assert math.isclose(U(mix(x, lam, y)), lam * U(x) + (1 - lam) * U(y), rel_tol=1e-12)
        assert math.isclose(U(mix(x, 1.0, y)), U(x), rel_tol=1e-12)
        assert math.isclose(U(mix(x, lam, y)), U(mix(y, 1 - lam, x)), rel_tol=1e-12)
        assert math.isclose(U(mix(mix(x, mu, y), lam, y)), U(mix(x, lam * mu, y)), rel_tol=1e-12)


# ---------------------------------------------------------------- 10


@criterion(10)
def test_plot_data_shapes(tmp_path):
    path = tmp_path / "reference_curves.csv"
    assert main(["plot-data", "--out", str(path)]) == 0
    with path.open() as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    col = {name: body[:, i] for i, name in enumerate(header)}
    assert col["t"][0] == 0 and col["t"][-1] == 200 and np.all(np.diff(col["t"]) == 0.5)
    for name in ("D_linexp", "D_exp", "D_sumexp_a05", "D_sumexp_a12"):
        assert col[name][0] == 1.0
        assert np.all(np.diff(col[name]) < 0)
    assert col["rate_linexp"][0] == pytest.approx(0.02, abs=1e-15)
    assert np.all(np.diff(col["rate_linexp"]) > 0)
    assert np.all(col["rate_exp"] == 0.03)
    assert np.all(np.diff(col["rate_sumexp_a05"]) < 0)
    assert np.all(np.diff(col["rate_sumexp_a12"]) > 0)
    # the quoted parameter sets, checked against closed forms in high precision
    for t in (0.0, 50.0, 200.0):
        i = int(t / 0.5)
        assert col["D_linexp"][i] == pytest.approx(float(D_mp("lin_exp", {"c": 0.01, "r": 0.03}, t)), rel=1e-14)
        assert col["D_sumexp_a12"][i] == pytest.approx(
            float(1.2 * mp.e ** (-0.03 * t) - 0.2 * mp.e ** (-0.08 * t)), rel=1e-13
        )


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
