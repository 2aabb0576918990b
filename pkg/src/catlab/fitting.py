"""Log-linear decay-rate fits with a fixed measurement window.

Values below the floor of the window sit in the floating-point noise of
the quantities being compared; values above the ceiling are still in
the pre-asymptotic regime.  Fits are ordinary least squares on
``log(y)`` restricted to the window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = ["DecayRateFit", "fit_decay_rate", "FIT_WINDOW"]

# gap values are trusted between the double-precision floor and the
# onset of the asymptotic regime
FIT_WINDOW = (1e-12, 1e-2)
MIN_FIT_POINTS = 3


@dataclass(frozen=True)
class DecayRateFit:
    """Result of fitting ``y ~ C * exp(-rate * x)``."""

    rate: float
    stderr: float
    intercept: float
    n_points: int
    span_decades: float
    r_value: float

    @property
    def ci95(self) -> tuple[float, float]:
        return (self.rate - 1.96 * self.stderr, self.rate + 1.96 * self.stderr)


def fit_decay_rate(x, y, window: tuple[float, float] = FIT_WINDOW) -> DecayRateFit | None:
    """Fit an exponential decay rate over the points inside ``window``.

    Returns ``None`` when fewer than three points fall in the window
    (callers report that as an unfittable sweep rather than an error).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = window
    mask = np.isfinite(y) & (y >= lo) & (y <= hi) & np.isfinite(x)
    if int(mask.sum()) < MIN_FIT_POINTS or np.unique(x[mask]).size < MIN_FIT_POINTS:
        return None
    xs, ys = x[mask], np.log(y[mask])
    res = stats.linregress(xs, ys)
    span = float(np.log10(y[mask].max() / y[mask].min()))
    return DecayRateFit(
        rate=float(-res.slope),
        stderr=float(res.stderr),
        intercept=float(res.intercept),
        n_points=int(mask.sum()),
        span_decades=span,
        r_value=float(res.rvalue),
    )
