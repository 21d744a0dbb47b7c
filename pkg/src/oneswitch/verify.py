"""Brute-force oracles that confirm or falsify switch and impatience claims.

Everything here is deliberately numeric and independent of the closed-form
rules in :mod:`oneswitch.discount` and :mod:`oneswitch.du`, so the two can
be checked against each other.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from oneswitch import du
from oneswitch.core import DatedSequence, DomainError, Lottery, PowerUtility, PreferenceModel, make_sequence
from oneswitch.jsonio import sequence_to_json
from oneswitch.discount import (
    DiscountFunction,
    Exponential,
    Hyperbolic,
    Impatience,
    ImpatienceClass,
    LinearTimesExponential,
    NumericWitness,
    SumOfExponentials,
    classify_impatience,
    ratio_gap,
)

# Fixed instance distribution for randomized suites.
MAX_LEN = 3
TIME_RANGE = (0.0, 50.0)
UTILITY_MAX = 10.0

STATIONARY_TOL = 1e-12
LOG_CURVATURE_TOL = 1e-13
TRIPLE_TOL = 1e-10
RECURRENCE_TOL = 1e-10
SCREEN_POINTS = 2001
_SEARCH_BATCH = 128


class DegenerateConstruction(DomainError):
    pass


# ---------------------------------------------------------------- sampling


def random_discount(family: str, rng: np.random.Generator) -> DiscountFunction:
    """Draw a valid discount function of ``family`` with rates in [0.01, 0.1]."""
    if family == "exponential":
        return Exponential(float(rng.uniform(0.01, 0.1)))
    if family == "lin_exp":
        r = float(rng.uniform(0.01, 0.1))
        return LinearTimesExponential(c=float(rng.uniform(0.0, r)), r=r)
    if family == "sum_exp":
        b, c = (float(v) for v in rng.uniform(0.01, 0.1, size=2))
        a = (b / c + 1.0) * (1.0 - float(rng.uniform()))  # (0, b/c + 1]
        return SumOfExponentials(a=a, b=b, c=c)
    if family == "hyperbolic":
        return Hyperbolic(float(rng.uniform(0.05, 2.0)))
    raise ValueError(f"unknown family {family!r}")


def random_sequence(rng: np.random.Generator, utility: PowerUtility, max_len: int = MAX_LEN) -> DatedSequence:
    n = int(rng.integers(1, max_len + 1))
    while True:
        times = np.sort(rng.uniform(*TIME_RANGE, size=n))
        if np.all(np.diff(times) > 0):
            break
    values = UTILITY_MAX * (1.0 - rng.uniform(size=n))  # (0, UTILITY_MAX]
    return make_sequence([utility.inverse(v) for v in values], times)


def random_pair(rng: np.random.Generator, utility: PowerUtility, max_len: int = MAX_LEN):
    return random_sequence(rng, utility, max_len), random_sequence(rng, utility, max_len)


# ---------------------------------------------------------------- one-switch


class SwitchKind(enum.Enum):
    ZERO_SWITCH = "zero_switch"
    ONE_SWITCH = "one_switch"
    WEAK_ONE_SWITCH = "weak_one_switch"
    VIOLATION = "violation"


@dataclass(frozen=True)
class Witness:
    seq_a: DatedSequence
    seq_b: DatedSequence
    crossings: tuple[float, ...]


@dataclass(frozen=True)
class OneSwitchVerdict:
    kind: SwitchKind
    sigma_star: Optional[float] = None
    zero_interval: Optional[tuple[float, float]] = None
    witness: Optional[Witness] = None
    analysis: Optional[du.SwitchAnalysis] = None


@dataclass(frozen=True)
class NotFound:
    seed: int
    budget: int


def _run_inside(bracket, runs):
    a, b = bracket
    for lo, hi in runs:
        if a < lo and hi < b:
            return (lo, hi)
    return None


def one_switch_oracle(
    model: PreferenceModel,
    seq_a: DatedSequence,
    seq_b: DatedSequence,
    sigma_max: float = du.DEFAULT_SIGMA_MAX,
    grid_points: int = du.DEFAULT_GRID_POINTS,
) -> OneSwitchVerdict:
    """Classify the switch behaviour of one pair from a numeric scan.

    Two or more crossings are only reported as a violation if they survive a
    rescan at doubled grid density.
    """
    an = du.switch_numeric(model, seq_a, seq_b, sigma_max, grid_points)
    if an.n_crossings >= 2:
        dense = du.switch_numeric(model, seq_a, seq_b, sigma_max, 2 * grid_points - 1)
        if dense.n_crossings >= 2:
            return OneSwitchVerdict(
                SwitchKind.VIOLATION, witness=Witness(seq_a, seq_b, dense.crossings), analysis=dense
            )
        an = dense
    if an.n_crossings == 1:
        run = _run_inside(an.brackets[0], an.zero_runs)
        if run is not None:
            return OneSwitchVerdict(SwitchKind.WEAK_ONE_SWITCH, zero_interval=run, analysis=an)
        return OneSwitchVerdict(SwitchKind.ONE_SWITCH, sigma_star=an.sigma_star, analysis=an)
    if an.verdict is du.Verdict.UNIQUE_SWITCH:
        return OneSwitchVerdict(SwitchKind.ONE_SWITCH, sigma_star=an.sigma_star, analysis=an)
    return OneSwitchVerdict(SwitchKind.ZERO_SWITCH, analysis=an)


@dataclass(frozen=True)
class ZeroSetCheck:
    is_interval: bool
    interval: Optional[tuple[float, float]] = None
    gap: Optional[tuple[float, float]] = None


def zero_set_is_interval(analysis: du.SwitchAnalysis, window: tuple[float, float]) -> ZeroSetCheck:
    """Whether the scanned zero set of Delta is one contiguous piece.

    The zero set is the union of the zero-tolerance grid runs and the refined
    crossings; a crossing refined across a zero run belongs to that run.
    ``gap`` is a pair of zero-set points separated by non-zero grid values.
    """
    if analysis.verdict is du.Verdict.IDENTICALLY_ZERO:
        return ZeroSetCheck(True, interval=window)
    pieces = [list(r) for r in analysis.zero_runs]
    for c, bracket in zip(analysis.crossings, analysis.brackets):
        run = _run_inside(bracket, analysis.zero_runs)
        if run is None:
            pieces.append([c, c])
        else:
            piece = pieces[analysis.zero_runs.index(run)]
            piece[0], piece[1] = min(piece[0], c), max(piece[1], c)
    pieces.sort()
    if not pieces:
        return ZeroSetCheck(True)
    if len(pieces) == 1:
        return ZeroSetCheck(True, interval=tuple(pieces[0]))
    return ZeroSetCheck(False, gap=(pieces[0][1], pieces[1][0]))


def zero_set_interval_check(
    model: PreferenceModel,
    seq_a: DatedSequence,
    seq_b: DatedSequence,
    sigma_max: float = du.DEFAULT_SIGMA_MAX,
    grid_points: int = du.DEFAULT_GRID_POINTS,
) -> ZeroSetCheck:
    an = du.switch_numeric(model, seq_a, seq_b, sigma_max, grid_points)
    return zero_set_is_interval(an, (0.0, float(sigma_max)))


# ---------------------------------------------------------------- impatience


DEFAULT_T_SAMPLES = np.linspace(0.0, 100.0, 21)
DEFAULT_SIGMA_SAMPLES = np.array([0.5, 1.0, 5.0, 20.0, 50.0])


def impatience_oracle(
    D: DiscountFunction,
    t_samples: Sequence[float] = DEFAULT_T_SAMPLES,
    sigma_samples: Sequence[float] = DEFAULT_SIGMA_SAMPLES,
) -> ImpatienceClass:
    """Classify impatience from the ratio inequality on sampled (t, s, sigma).

    DI means D(t)/D(t+sigma) > D(s)/D(s+sigma) whenever t < s; II reverses
    the inequality; equality within STATIONARY_TOL counts as stationary.
    """
    t = np.unique(np.asarray(t_samples, dtype=float))
    sig = np.asarray(sigma_samples, dtype=float)
    if t.size < 2 or sig.size == 0 or np.any(sig <= 0):
        raise ValueError("need at least two distinct t samples and positive sigmas")
    i, j = np.triu_indices(t.size, k=1)
    T, S, SIG = t[i][:, None], t[j][:, None], sig[None, :]
    gaps = np.broadcast_to(ratio_gap(D, T, S, SIG), (i.size, sig.size))
    T, S, SIG = (np.broadcast_to(x, gaps.shape) for x in (T, S, SIG))

    def point(flat):
        return (float(T.flat[flat]), float(S.flat[flat]), float(SIG.flat[flat]))

    hi, lo = int(np.argmax(gaps)), int(np.argmin(gaps))
    pos, neg = gaps.flat[hi] > STATIONARY_TOL, gaps.flat[lo] < -STATIONARY_TOL
    if pos and neg:
        return ImpatienceClass(
            Impatience.NON_MONOTONE,
            NumericWitness((point(hi), point(lo)), (float(gaps.flat[hi]), float(gaps.flat[lo]))),
        )
    if pos:
        return ImpatienceClass(Impatience.STRICTLY_DI, NumericWitness((point(hi),), (float(gaps.flat[hi]),)))
    if neg:
        return ImpatienceClass(Impatience.STRICTLY_II, NumericWitness((point(lo),), (float(gaps.flat[lo]),)))
    worst = int(np.argmax(np.abs(gaps)))
    return ImpatienceClass(Impatience.STATIONARY, NumericWitness((point(worst),), (float(gaps.flat[worst]),)))


class LogShape(enum.Enum):
    LOG_CONVEX = "log_convex"
    LOG_CONCAVE = "log_concave"
    LOG_LINEAR = "log_linear"
    NEITHER = "neither"


@dataclass(frozen=True)
class LogShapeResult:
    shape: LogShape
    # (t, second difference) at the most convex and most concave grid points
    most_convex: tuple[float, float]
    most_concave: tuple[float, float]


DEFAULT_LOG_GRID = np.linspace(0.0, 100.0, 201)

# Impatience class each log-shape corresponds to for a DU discount function.
SHAPE_TO_IMPATIENCE = {
    LogShape.LOG_CONVEX: Impatience.STRICTLY_DI,
    LogShape.LOG_CONCAVE: Impatience.STRICTLY_II,
    LogShape.LOG_LINEAR: Impatience.STATIONARY,
    LogShape.NEITHER: Impatience.NON_MONOTONE,
}


def log_concavity_oracle(D, grid: Sequence[float] = DEFAULT_LOG_GRID) -> LogShapeResult:
    """Sign pattern of second central differences of ln D on a uniform grid."""
    g = np.asarray(grid, dtype=float)
    if g.size < 64:
        raise ValueError("log-concavity oracle needs at least 64 grid points")
    h = np.diff(g)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0) or h[0] <= 0:
        raise ValueError("grid must be uniform and increasing")
    L = np.log(D(g))
    d2 = L[:-2] - 2.0 * L[1:-1] + L[2:]
    hi, lo = int(np.argmax(d2)), int(np.argmin(d2))
    pos, neg = d2[hi] > LOG_CURVATURE_TOL, d2[lo] < -LOG_CURVATURE_TOL
    if pos and neg:
        shape = LogShape.NEITHER
    elif pos:
        shape = LogShape.LOG_CONVEX
    elif neg:
        shape = LogShape.LOG_CONCAVE
    else:
        shape = LogShape.LOG_LINEAR
    return LogShapeResult(shape, (float(g[hi + 1]), float(d2[hi])), (float(g[lo + 1]), float(d2[lo])))


# ---------------------------------------------------------------- indifference propagation


@dataclass(frozen=True)
class IndifferenceTriple:
    """Utilities making ((alpha, beta), (0, 2 sigma)) ~ (gamma, sigma) at delays 0 and sigma."""

    u_alpha: float
    u_beta: float
    u_gamma: float
    sigma: float

    def residuals(self, D) -> tuple[float, float]:
        s = self.sigma
        d1, d2, d3 = (float(D(k * s)) for k in (1, 2, 3))
        first = (self.u_alpha + self.u_beta * d2 - self.u_gamma * d1) / (self.u_gamma * d1)
        second = (self.u_alpha * d1 + self.u_beta * d3 - self.u_gamma * d2) / (self.u_gamma * d2)
        return first, second

    def as_sequences(self, utility: PowerUtility = PowerUtility()) -> tuple[DatedSequence, DatedSequence]:
        s = self.sigma
        x = make_sequence([utility.inverse(self.u_alpha), utility.inverse(self.u_beta)], [0.0, 2 * s])
        y = make_sequence([utility.inverse(self.u_gamma)], [s])
        return x, y


def build_indifference_triple(D, sigma: float) -> IndifferenceTriple:
    """Solve u(a) + u(b) D(2s) = u(c) D(s) and u(a) D(s) + u(b) D(3s) = u(c) D(2s), u(c) = 1."""
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    d1, d2, d3 = (float(D(k * sigma)) for k in (1, 2, 3))
    if classify_impatience(D).tag is Impatience.STATIONARY:
        # both equations hold for any u_beta; this choice keeps u_alpha = D(sigma)/2
        u_beta = 0.5 * d1 / d2
    else:
        u_beta = (d2 - d1 * d1) / (d3 - d1 * d2)
    u_alpha = d1 - u_beta * d2
    if not (u_alpha > 0 and u_beta > 0):
        raise DegenerateConstruction(
            f"construction gives u_alpha={u_alpha!r}, u_beta={u_beta!r}; D lacks monotone impatience"
        )
    triple = IndifferenceTriple(u_alpha, u_beta, 1.0, float(sigma))
    worst = max(abs(r) for r in triple.residuals(D))
    if worst > TRIPLE_TOL:
        raise DegenerateConstruction(f"indifference identities hold only to {worst!r}")
    return triple


@dataclass(frozen=True)
class RecurrenceCheck:
    passed: bool
    max_residual: float
    worst_t: float


def difference_equation_check(D, triple: IndifferenceTriple, t_grid: Sequence[float]) -> RecurrenceCheck:
    """Check u_alpha D(t) + u_beta D(t + 2s) = u_gamma D(t + s) along ``t_grid``."""
    t = np.asarray(t_grid, dtype=float)
    s = triple.sigma
    lhs = triple.u_alpha * D(t) + triple.u_beta * D(t + 2 * s)
    rhs = triple.u_gamma * D(t + s)
    res = np.abs(lhs - rhs) / (1.0 + rhs)
    k = int(np.argmax(res))
    return RecurrenceCheck(bool(res[k] <= RECURRENCE_TOL), float(res[k]), float(t[k]))


# ---------------------------------------------------------------- falsification search


def _screen(D, ta, ua, tb, ub, grid) -> np.ndarray:
    """Strict sign-change counts of Delta on a coarse grid, one per candidate."""
    xa = D(ta[:, :, None] + grid) * ua[:, :, None]
    xb = D(tb[:, :, None] + grid) * ub[:, :, None]
    d = xa.sum(axis=1) - xb.sum(axis=1)
    tol = du.ZERO_RTOL * np.maximum(xa.max(axis=1), xb.max(axis=1))
    sgn = np.where(np.abs(d) <= tol, 0, np.sign(d))
    counts = np.zeros(len(d), dtype=int)
    for k, row in enumerate(sgn):
        nz = row[row != 0]
        counts[k] = np.count_nonzero(nz[1:] != nz[:-1])
    return counts


def _draw_batch(rng: np.random.Generator, size: int):
    n = rng.integers(1, MAX_LEN + 1, size=size)
    raw = rng.uniform(*TIME_RANGE, size=(size, MAX_LEN))
    vals = UTILITY_MAX * (1.0 - rng.uniform(size=(size, MAX_LEN)))
    unused = np.arange(MAX_LEN)[None, :] >= n[:, None]
    times = np.sort(np.where(unused, np.inf, raw), axis=1)
    vals = np.where(unused, 0.0, vals)
    return n, np.where(unused, 0.0, times), vals


def double_switch_search(
    model: PreferenceModel,
    rng_seed: int,
    budget: int,
    sigma_max: float = du.DEFAULT_SIGMA_MAX,
    grid_points: int = du.DEFAULT_GRID_POINTS,
) -> Union[OneSwitchVerdict, NotFound]:
    """Randomized search for a pair whose Delta changes sign at least twice.

    Candidates are drawn in fixed-size batches from ``rng_seed`` and screened
    on a coarse grid; screened hits go through :func:`one_switch_oracle`,
    which rescans at full and doubled density. The first confirmed witness
    (in draw order) is returned, so the result depends only on the seed
    and budget.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    rng = np.random.default_rng(rng_seed)
    grid = np.linspace(0.0, sigma_max, SCREEN_POINTS)
    D, u = model.discount, model.utility
    done = 0
    while done < budget:
        size = min(_SEARCH_BATCH, budget - done)
        na, ta, va = _draw_batch(rng, _SEARCH_BATCH)
        nb, tb, vb = _draw_batch(rng, _SEARCH_BATCH)
        na, ta, va, nb, tb, vb = (x[:size] for x in (na, ta, va, nb, tb, vb))
        counts = _screen(D, ta, va, tb, vb, grid)
        for k in np.flatnonzero(counts >= 2):
            try:
                seq_a = make_sequence([u.inverse(v) for v in va[k, : na[k]]], ta[k, : na[k]])
                seq_b = make_sequence([u.inverse(v) for v in vb[k, : nb[k]]], tb[k, : nb[k]])
            except DomainError:
                continue
            verdict = one_switch_oracle(model, seq_a, seq_b, sigma_max, grid_points)
            if verdict.kind is SwitchKind.VIOLATION:
                return verdict
        done += size
    return NotFound(rng_seed, budget)


# ---------------------------------------------------------------- suites


@dataclass
class SuiteReport:
    instances: int
    seed: int
    violations: list = field(default_factory=list)
    max_residual: float = 0.0
    checked_indifference: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "instances": self.instances,
            "violations": self.violations,
            "max_residual": self.max_residual,
            "seed": self.seed,
        }


def witness_to_json(w: Witness) -> dict:
    return {"seqA": sequence_to_json(w.seq_a), "seqB": sequence_to_json(w.seq_b), "crossings": list(w.crossings)}


def one_switch_suite(
    model: PreferenceModel,
    n_instances: int,
    rng_seed: int,
    sigma_max: float = du.DEFAULT_SIGMA_MAX,
    grid_points: int = du.DEFAULT_GRID_POINTS,
) -> SuiteReport:
    """Run :func:`one_switch_oracle` over random pairs from the fixed distribution."""
    rng = np.random.default_rng(rng_seed)
    report = SuiteReport(n_instances, rng_seed)
    for k in range(n_instances):
        a, b = random_pair(rng, model.utility)
        v = one_switch_oracle(model, a, b, sigma_max, grid_points)
        if v.kind is SwitchKind.VIOLATION:
            report.violations.append({"instance": k, **witness_to_json(v.witness)})
    return report


def zero_set_suite(
    model: PreferenceModel,
    n_instances: int,
    rng_seed: int,
    sigma_max: float = du.DEFAULT_SIGMA_MAX,
    grid_points: int = du.DEFAULT_GRID_POINTS,
) -> SuiteReport:
    rng = np.random.default_rng(rng_seed)
    report = SuiteReport(n_instances, rng_seed)
    for k in range(n_instances):
        a, b = random_pair(rng, model.utility)
        check = zero_set_interval_check(model, a, b, sigma_max, grid_points)
        if not check.is_interval:
            report.violations.append(
                {"instance": k, "gap": list(check.gap), "seqA": sequence_to_json(a), "seqB": sequence_to_json(b)}
            )
    return report


def _strict_changes(d: np.ndarray, scale: np.ndarray) -> int:
    sgn = np.where(np.abs(d) <= du.ZERO_RTOL * scale, 0, np.sign(d))
    nz = sgn[sgn != 0]
    return int(np.count_nonzero(nz[1:] != nz[:-1]))


def weak_one_switch_property_suite(
    model: PreferenceModel,
    n_instances: int,
    rng_seed: int,
    sigma_max: float = du.DEFAULT_SIGMA_MAX,
    grid_points: int = 2001,
    deu: bool = False,
) -> SuiteReport:
    """Weak one-switch check on single dated outcomes, including advancements.

    Each instance draws (x, t), (y, s) and scans Delta over
    [-min(t, s), sigma_max]; a strict (+, -, +) or (-, +, -) pattern is a
    violation. With ``deu=True`` each instance is additionally turned into a
    lottery pair made indifferent at a random delay sigma_1; if it is also
    indifferent at a second delay, Delta must vanish on the whole grid.
    """
    cls = classify_impatience(model.discount).tag
    if cls is Impatience.NON_MONOTONE:
        raise DomainError("suite applies to DI, II or stationary models only")
    rng = np.random.default_rng(rng_seed)
    u = model.utility
    D = model.discount
    report = SuiteReport(n_instances, rng_seed)
    for k in range(n_instances):
        (a, b) = random_pair(rng, u, max_len=1)
        lo = -min(a.times[0], b.times[0])
        pair = du.PairDelta(model, a, b)
        grid = np.linspace(lo, sigma_max, grid_points)
        d, s = pair.delta_and_scale(grid)
        if _strict_changes(d, s) > 1:
            report.violations.append(
                {"instance": k, "kind": "double_switch", "seqA": sequence_to_json(a), "seqB": sequence_to_json(b)}
            )
        if not deu:
            continue
        # indifference at sigma_1 by construction, with y a genuine lottery
        sigma_1, sigma_2 = np.sort(rng.uniform(0.0, 50.0, size=2))
        t, s_ = a.times[0], b.times[0]
        target = u(a.outcomes[0]) * float(D(t + sigma_1)) / float(D(s_ + sigma_1))
        top = 1.5 * max(target, UTILITY_MAX)
        p = target / top
        y = Lottery.of([(u.inverse(top), p), (0.0, 1.0 - p)])
        la = a.promote()
        lb = DatedSequence((y,), b.times)
        lpair = du.PairDelta(model, la, lb)
        d2, sc2 = lpair.delta_and_scale(np.array([sigma_2]))
        if abs(d2[0]) > du.ZERO_RTOL * sc2[0]:
            continue
        report.checked_indifference += 1
        dg, sg = lpair.delta_and_scale(np.linspace(0.0, sigma_max, grid_points))
        residual = float(np.max(np.abs(dg) / sg))
        report.max_residual = max(report.max_residual, residual)
        if residual > 1e-10:
            report.violations.append(
                {"instance": k, "kind": "indifference_not_propagated", "residual": residual,
                 "seqA": sequence_to_json(la), "seqB": sequence_to_json(lb)}
            )
    return report


def impatience_suite(D: DiscountFunction) -> SuiteReport:
    """Pairwise agreement of the closed-form rule, ratio oracle and log-shape oracle."""
    rule = classify_impatience(D).tag
    ratio = impatience_oracle(D).tag
    shape = SHAPE_TO_IMPATIENCE[log_concavity_oracle(D).shape]
    report = SuiteReport(1, 0)
    if not (rule is ratio is shape):
        report.violations.append({"closed_form": rule.value, "ratio_oracle": ratio.value, "log_shape": shape.value})
    return report
