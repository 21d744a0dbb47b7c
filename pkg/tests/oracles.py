"""Independent high-precision reference formulas used by the tests."""

import mpmath as mp

mp.mp.dps = 40


def D_mp(family: str, params: dict, t):
    t = mp.mpf(t)
    p = {k: mp.mpf(repr(float(v))) for k, v in params.items()}
    if family == "exponential":
        return mp.e ** (-p["r"] * t)
    if family == "lin_exp":
        return (1 + p["c"] * t) * mp.e ** (-p["r"] * t)
    if family == "sum_exp":
        a, b, c = p["a"], p["b"], p["c"]
        return a * mp.e ** (-b * t) + (1 - a) * mp.e ** (-(b + c) * t)
    if family == "hyperbolic":
        return 1 / (1 + p["k"] * t)
    raise ValueError(family)


def diff_mp(f, t, h=mp.mpf("1e-15")):
    t = mp.mpf(t)
    return (f(t + h) - f(t - h)) / (2 * h)


def rate_mp(family, params, t):
    return -diff_mp(lambda x: mp.log(D_mp(family, params, x)), t)


def rate_derivative_mp(family, params, t):
    return diff_mp(lambda x: rate_mp(family, params, x), t, h=mp.mpf("1e-8"))
