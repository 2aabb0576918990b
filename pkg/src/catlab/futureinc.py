"""Future-included matrix elements and the derived metrics they induce.

The central quantity is the normalized two-boundary matrix element

    ``<O> = <B(t)| O |A(t)> / <B(t)|A(t)>``,

built from a past state evolved forward and a future state evolved
backward to the common present ``t``.  Smearing the present over a small
window turns the future-state projector ``|B><B|`` into a hermitian
positive operator; at long future horizons only survivor modes remain,
and the window average becomes (up to a known growth factor) the
derived metric built from the future state's survivor coefficients.
Under that metric the ordinary single-boundary expectation of the
forward state reproduces the two-boundary value, and
:func:`correspondence_gap` measures how fast the two agree as the
horizons grow.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .dynamics import EffectiveData, Sector, StateVector, evolve
from .errors import (
    DegenerateRealPartsError,
    DimensionMismatchError,
    InvariantViolationError,
    NullStateError,
    OrthogonalBoundaryError,
)
from .spectral import MetricOperator, SpectralData, _freeze

__all__ = [
    "BoundaryData",
    "MetricKind",
    "DerivedMetric",
    "weak_value",
    "smeared_projector",
    "default_smearing_width",
    "q2_metric",
    "qprime_metric",
    "q_expectation",
    "CorrespondenceResult",
    "correspondence_gap",
]

DEFAULT_SMEAR_SAMPLES = 129
RE_DEGENERACY_RTOL = 1e-9
_DENOMINATOR_FLOOR = 1e-300


class MetricKind(enum.Enum):
    Q2_DIRECT = "q2_direct"
    QPRIME_FUNCTIONAL = "qprime_functional"


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Past and future boundary states with their anchor times."""

    a_initial: StateVector
    b_final: StateVector
    t_a: float
    t_b: float

    def __post_init__(self):
        if not self.t_a < self.t_b:
            raise ValueError(f"need t_a < t_b, got {self.t_a} >= {self.t_b}")
        if self.a_initial.sector is not Sector.A:
            raise ValueError("a_initial must live in sector A")
        if self.b_final.sector is not Sector.B:
            raise ValueError("b_final must live in sector B")
        if self.a_initial.time != self.t_a or self.b_final.time != self.t_b:
            raise ValueError("boundary state timestamps must match t_a and t_b")
        if self.a_initial.dim != self.b_final.dim:
            raise DimensionMismatchError("boundary states have different dimensions")
        for name, st in (("a_initial", self.a_initial), ("b_final", self.b_final)):
            if not np.linalg.norm(st.amplitudes) > 0.0:
                raise NullStateError(f"{name} has zero norm")
        object.__setattr__(self, "t_a", float(self.t_a))
        object.__setattr__(self, "t_b", float(self.t_b))

    @property
    def dim(self) -> int:
        return self.a_initial.dim


@dataclass(frozen=True, eq=False)
class DerivedMetric:
    """Hermitian positive-semidefinite metric derived from boundary or
    weight data; ``restricted`` marks validity only on the survivor
    subspace."""

    matrix: np.ndarray
    kind: MetricKind
    restricted: bool

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"metric must be square, got {m.shape}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-10 * max(
            1.0, float(np.max(np.abs(m), initial=0.0))
        ):
            raise InvariantViolationError("derived metric is not hermitian")
        m = (m + m.conj().T) / 2.0
        evals = np.linalg.eigvalsh(m)
        floor = -1e-12 * max(1.0, float(evals[-1]) if evals.size else 0.0)
        if evals.size and evals[0] < floor:
            raise InvariantViolationError(
                f"derived metric has negative eigenvalue {evals[0]:.3e}"
            )
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _boundary_states_at(bd: BoundaryData, s: SpectralData, t: float
                        ) -> tuple[StateVector, StateVector]:
    a_t = evolve(bd.a_initial, s, t - bd.t_a)
    b_t = evolve(bd.b_final, s, t - bd.t_b)
    return a_t, b_t


def weak_value(obs: np.ndarray, bd: BoundaryData, s: SpectralData, t: float) -> complex:
    """Two-boundary normalized matrix element of ``obs`` at time ``t``.

    Invariant under independent rescaling of either boundary state.
    Near-orthogonal boundaries produce arbitrarily large values; that is
    a genuine pole of the construction, reported rather than clamped,
    and only an underflowing denominator raises.

    Raises
    ------
    OrthogonalBoundaryError
        When ``|<B(t)|A(t)>|`` falls below ``1e-300 * |B| * |A|``.
    """
    obs = np.asarray(obs, dtype=complex)
    if obs.shape != (bd.dim, bd.dim) or bd.dim != s.dim:
        raise DimensionMismatchError(
            f"observable {obs.shape} against boundary dim {bd.dim}, spectral dim {s.dim}"
        )
    if not bd.t_a <= t <= bd.t_b:
        raise ValueError(f"need t_a <= t <= t_b, got t={t}")
    a_t, b_t = _boundary_states_at(bd, s, t)
    den = complex(b_t.amplitudes.conj() @ a_t.amplitudes)
    scale = np.linalg.norm(b_t.amplitudes) * np.linalg.norm(a_t.amplitudes)
    if abs(den) < _DENOMINATOR_FLOOR * scale or den == 0.0:
        raise OrthogonalBoundaryError(
            "boundary states are orthogonal at the evaluation time"
        )
    num = complex(b_t.amplitudes.conj() @ (obs @ a_t.amplitudes))
    return num / den


def default_smearing_width(s: SpectralData, eff: EffectiveData) -> float:
    """Smearing half-width making every survivor-pair oscillation
    complete at least ten full periods across the window.

    With that choice the slowest off-diagonal suppression factor is
    ``sin(dRe * w / hbar) / (dRe * w / hbar)`` at ``dRe * w / hbar = 20 pi``,
    i.e. exactly zero for a single pair and below ``1/(20 pi)`` always.
    """
    re = s.eigenvalues.real[list(eff.survivor_set)]
    if re.size < 2:
        return 2.0 * np.pi * s.hbar
    seps = np.abs(np.subtract.outer(re, re))[np.triu_indices(re.size, k=1)]
    min_sep = float(seps.min())
    if min_sep <= RE_DEGENERACY_RTOL * max(1.0, float(np.max(np.abs(re)))):
        warnings.warn(
            "two surviving modes share a real part; time smearing cannot "
            "separate them and the default width is unbounded",
            RuntimeWarning,
            stacklevel=2,
        )
        return 2.0 * np.pi * s.hbar
    return 20.0 * np.pi * s.hbar / min_sep


def smeared_projector(bd: BoundaryData, s: SpectralData, t: float, delta_t: float,
                      n_samples: int = DEFAULT_SMEAR_SAMPLES) -> np.ndarray:
    """Window average of the future-state projector around ``t``.

    Composite trapezoid over ``n_samples`` points of
    ``|B(tau)><B(tau)|`` for ``tau`` in ``[t - delta_t, t + delta_t]``,
    normalized by the window length.  Hermitian positive-semidefinite
    by construction (positive weights on rank-one terms).
    """
    if not delta_t > 0:
        raise ValueError("delta_t must be positive")
    n_samples = int(n_samples)
    if n_samples < 3 or n_samples % 2 == 0:
        raise ValueError("n_samples must be odd and at least 3")
    taus = np.linspace(t - delta_t, t + delta_t, n_samples)
    weights = np.full(n_samples, 1.0 / (n_samples - 1))
    weights[0] *= 0.5
    weights[-1] *= 0.5
    out = np.zeros((s.dim, s.dim), dtype=complex)
    for tau, wt in zip(taus, weights):
        b_tau = evolve(bd.b_final, s, tau - bd.t_b).amplitudes
        out += wt * np.outer(b_tau, b_tau.conj())
    return (out + out.conj().T) / 2.0


def _survivor_coefficients(bd: BoundaryData, s: SpectralData, eff: EffectiveData
                           ) -> np.ndarray:
    """Expansion coefficients of the future state on the conjugate-sector
    eigenvectors, zeroed outside the survivor set."""
    coeff = s.pb_inverse @ bd.b_final.amplitudes
    keep = np.zeros(s.dim, dtype=bool)
    keep[list(eff.survivor_set)] = True
    return np.where(keep, coeff, 0.0)


def q2_metric(bd: BoundaryData, s: SpectralData, eff: EffectiveData) -> DerivedMetric:
    """Derived metric from the future state's survivor coefficients.

    Spectral assembly ``sum_i |b_i|^2 v_i v_i^dag`` over survivors,
    where ``v_i`` are conjugate-sector eigenvectors.  Equals the
    long-horizon limit of the growth-rescaled smeared projector up to
    terms decaying at twice the spectral gap rate.

    Raises
    ------
    NullStateError
        When the future state has no survivor overlap at all.
    """
    coeff = _survivor_coefficients(bd, s, eff)
    weights = np.abs(coeff) ** 2
    if not np.max(weights) > 0.0:
        raise NullStateError("future state has zero overlap with every survivor")
    pb = s.pb_matrix
    out = (pb * weights) @ pb.conj().T
    return DerivedMetric(
        matrix=out, kind=MetricKind.Q2_DIRECT, restricted=eff.n_survivors < s.dim
    )


def qprime_metric(f_values: Mapping[float, float], s: SpectralData,
                  eff: EffectiveData) -> DerivedMetric:
    """Derived metric from a nonnegative weight function of the
    surviving real parts.

    ``f_values`` maps each survivor's ``Re lam`` to its weight
    ``F(Re lam) >= 0`` (keys matched within relative tolerance 1e-9);
    the result is ``sum_i F(Re lam_i) v_i v_i^dag`` over survivors with
    the extension off the survivor subspace set to zero.  When the
    weights are the squared survivor coefficients of a boundary state
    this coincides with :func:`q2_metric`.

    Raises
    ------
    DegenerateRealPartsError
        When two survivors share a real part within tolerance, so a
        function of the real part cannot tell them apart.
    """
    re = s.eigenvalues.real[list(eff.survivor_set)]
    scale = max(1.0, float(np.max(np.abs(re))))
    if re.size >= 2:
        seps = np.abs(np.subtract.outer(re, re))[np.triu_indices(re.size, k=1)]
        if float(seps.min()) <= RE_DEGENERACY_RTOL * scale:
            raise DegenerateRealPartsError(
                "surviving real parts are degenerate within tolerance "
                f"{RE_DEGENERACY_RTOL:g}; a weight of Re(lam) is ill-defined"
            )
    keys = np.fromiter(f_values.keys(), dtype=float, count=len(f_values))
    weights = np.zeros(s.dim)
    for idx, r in zip(eff.survivor_set, re):
        if keys.size == 0:
            raise ValueError(f"no weight supplied for survivor Re(lam) = {r!r}")
        j = int(np.argmin(np.abs(keys - r)))
        if abs(keys[j] - r) > RE_DEGENERACY_RTOL * max(1.0, abs(r)):
            raise ValueError(f"no weight supplied for survivor Re(lam) = {r!r}")
        val = float(f_values[float(keys[j])])
        if not (np.isfinite(val) and val >= 0.0):
            raise ValueError(f"weight for Re(lam) = {r!r} must be finite and >= 0")
        weights[idx] = val
    pb = s.pb_matrix
    out = (pb * weights) @ pb.conj().T
    return DerivedMetric(matrix=out, kind=MetricKind.QPRIME_FUNCTIONAL, restricted=True)


def q_expectation(obs: np.ndarray, state: StateVector,
                  m: Union[DerivedMetric, MetricOperator]) -> complex:
    """Single-state expectation under a (possibly restricted) metric:
    ``(state^dag m obs state) / (state^dag m state)``.

    Real for observables that are hermitian with respect to ``m`` on
    its support.

    Raises
    ------
    NullStateError
        When the denominator vanishes, i.e. the state lies outside the
        restricted support of the metric.
    """
    obs = np.asarray(obs, dtype=complex)
    mat = m.matrix
    if obs.shape != mat.shape or state.dim != mat.shape[0]:
        raise DimensionMismatchError(
            f"observable {obs.shape}, metric {mat.shape}, state dim {state.dim}"
        )
    amp = state.amplitudes
    den = complex(amp.conj() @ (mat @ amp))
    floor = 1e-13 * float(np.linalg.norm(mat)) * float(np.linalg.norm(amp)) ** 2
    if abs(den) <= floor:
        raise NullStateError(
            "state lies outside the support of the metric (vanishing denominator)"
        )
    num = complex(amp.conj() @ (mat @ (obs @ amp)))
    return num / den


@dataclass(frozen=True)
class CorrespondenceResult:
    """Both sides of the two-boundary / single-boundary comparison."""

    gap_abs: float
    lhs: complex
    rhs: complex


def correspondence_gap(obs: np.ndarray, bd: BoundaryData, s: SpectralData,
                       eff: EffectiveData, t: float) -> CorrespondenceResult:
    """Distance between the two-boundary matrix element and the derived
    metric expectation of the forward state at time ``t``.

    The distance vanishes as both horizons grow (in units of
    ``hbar/gap``) whenever both boundary states overlap the survivor
    subspace.  Errors from either side propagate unchanged.
    """
    if not bd.t_a < t < bd.t_b:
        raise ValueError(f"need t_a < t < t_b, got t={t}")
    lhs = weak_value(obs, bd, s, t)
    a_t = evolve(bd.a_initial, s, t - bd.t_a)
    rhs = q_expectation(obs, a_t, q2_metric(bd, s, eff))
    return CorrespondenceResult(gap_abs=abs(lhs - rhs), lhs=lhs, rhs=rhs)
