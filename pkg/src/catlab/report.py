"""Figure rendering for the report path (files only, never interactive)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["sweep_figure", "ensemble_figure", "demo_figure"]

_DPI = 150


def _finite_rows(rows, xattr):
    xs, ys = [], []
    for r in rows:
        if r.status == "ok" and np.isfinite(r.gap_abs) and r.gap_abs > 0:
            xs.append(getattr(r, xattr))
            ys.append(r.gap_abs)
    return np.array(xs), np.array(ys)


def sweep_figure(result, path: str) -> None:
    """Correspondence distance against horizon, with the fitted rates."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5), constrained_layout=True)
    styles = {
        "tb": ("o", "future horizon swept"),
        "ta": ("s", "past horizon swept"),
        "diag": ("^", "both horizons swept"),
    }
    rows = list(result.rows)
    hi = max((max(r.t_minus_ta, r.tb_minus_t) for r in rows), default=1.0)
    for side, (marker, label) in styles.items():
        if side == "tb":
            sel = [r for r in rows if r.t_minus_ta == hi]
            xattr = "tb_minus_t"
        elif side == "ta":
            sel = [r for r in rows if r.tb_minus_t == hi]
            xattr = "t_minus_ta"
        else:
            sel = [r for r in rows if r.t_minus_ta == r.tb_minus_t]
            xattr = "t_minus_ta"
        xs, ys = _finite_rows(sel, xattr)
        if xs.size == 0:
            continue
        ax.semilogy(xs, ys, marker, ms=4, ls="none", label=label)
        fit = result.fits.get(side)
        if fit is not None:
            xf = np.linspace(xs.min(), xs.max(), 50)
            ax.semilogy(xf, np.exp(fit.intercept - fit.rate * xf), "-", lw=1,
                        alpha=0.7, label=f"{label}: rate {fit.rate:.3g}")
    pred = result.predicted_rates.get("tb")
    title = "correspondence distance vs horizon"
    if pred is not None:
        title += f" (predicted rate {pred:.3g})"
    ax.set_title(title)
    ax.set_xlabel("horizon")
    ax.set_ylabel("|two-boundary - metric expectation|")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def ensemble_figure(rows, path: str) -> None:
    """Fitted vs predicted rates across the seed ensemble."""
    ok = [r for r in rows if r.status == "ok"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0), constrained_layout=True)
    if ok:
        pred = np.array([r.predicted_rate for r in ok])
        fit = np.array([r.fitted_rate for r in ok])
        ax1.plot(pred, fit, "o", ms=4)
        lim = [0.0, max(pred.max(), fit.max()) * 1.1]
        ax1.plot(lim, lim, "k--", lw=1, alpha=0.5)
        ax1.set_xlabel("predicted rate")
        ax1.set_ylabel("fitted rate")
        ax1.set_title("rate recovery")
        rel = np.array([r.rel_error for r in ok])
        ax2.hist(rel, bins=20)
        ax2.set_xlabel("relative rate error")
        ax2.set_ylabel("count")
        ax2.set_title("fit error distribution")
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def demo_figure(payload: dict, path: str) -> None:
    """Spectrum of the worked example and its correspondence decay."""
    block = payload["worked_2x2"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0), constrained_layout=True)
    lam = np.array([complex(re, im) for re, im in block["eigenvalues"]])
    surv = set(block["survivors"])
    for i, z in enumerate(lam):
        mk = "o" if i in surv else "x"
        ax1.plot(z.real, z.imag, mk, ms=9,
                 color="tab:red" if i in surv else "tab:gray")
    ax1.axhline(block["b_max"], color="tab:red", lw=0.8, ls=":", alpha=0.7)
    ax1.set_xlabel("Re eigenvalue")
    ax1.set_ylabel("Im eigenvalue")
    ax1.set_title("spectrum (survivors circled)")
    ax1.grid(alpha=0.3)
    decay = np.array(block["decay_rows"])
    if decay.size:
        ax2.semilogy(decay[:, 0], decay[:, 1], "o-", ms=4)
    ax2.set_xlabel("future horizon")
    ax2.set_ylabel("correspondence distance")
    ax2.set_title("two-boundary vs metric expectation")
    ax2.grid(True, which="both", alpha=0.3)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
