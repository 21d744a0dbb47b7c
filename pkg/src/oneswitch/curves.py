"""Plot data for the four reference discount curves and their rates."""

from __future__ import annotations

import numpy as np

from oneswitch.discount import Exponential, LinearTimesExponential, SumOfExponentials

# Exponents are decay rates: 0.5e^{-0.03t} + 0.5e^{-0.08t} and 1.2e^{-0.03t} - 0.2e^{-0.08t}.
REFERENCE_MODELS = {
    "linexp": LinearTimesExponential(c=0.01, r=0.03),
    "exp": Exponential(r=0.03),
    "sumexp_a05": SumOfExponentials(a=0.5, b=0.03, c=0.05),
    "sumexp_a12": SumOfExponentials(a=1.2, b=0.03, c=0.05),
}

COLUMNS = ["t"] + [f"D_{k}" for k in REFERENCE_MODELS] + [f"rate_{k}" for k in REFERENCE_MODELS]


def reference_curves(t_max: float = 200.0, step: float = 0.5) -> np.ndarray:
    """Rows of (t, D for each model, rate for each model), t = 0, step, ..., t_max."""
    n = int(round(t_max / step)) + 1
    t = np.arange(n) * step
    cols = [t]
    cols += [D(t) for D in REFERENCE_MODELS.values()]
    cols += [D.rate(t) for D in REFERENCE_MODELS.values()]
    return np.column_stack(cols)
