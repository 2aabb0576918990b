"""Time development in both sectors and the automatic hermiticity data.

States tagged with sector ``A`` evolve under ``H``; states tagged ``B``
evolve under ``H_B = H^dag``.  Propagation is spectral,
``P exp(-i D dt / hbar) P^{-1}``, which is exact for diagonalizable
generators including backward evolution (negative ``dt``).

After a long forward development only the eigenmodes whose imaginary
parts attain the spectral maximum survive in a normalized state; the
effective generator on that surviving subspace is the metric-hermitian
``H_eff = P diag(Re lam restricted) P^{-1}``.  :func:`effective`
packages the survivor bookkeeping, :func:`evolve_normalized` realizes
the normalized flow, and :func:`survivor_projection` extracts the
surviving component of a state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmplitudeOverflowError,
    DimensionMismatchError,
    InvariantViolationError,
    NullStateError,
)
from .spectral import MetricOperator, SpectralData, _freeze, q_adjoint

__all__ = [
    "Sector",
    "StateVector",
    "EffectiveData",
    "evolve",
    "effective",
    "evolve_normalized",
    "evolve_effective",
    "survivor_projection",
]

DEFAULT_OVERFLOW_CAP = 1e300
DEFAULT_EPS_A = 1e-9


class Sector(enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes tagged with their sector and timestamp.

    Construction is permissive about the zero vector because
    :func:`survivor_projection` legitimately produces it; operations
    that need a normalizable state raise ``NullStateError`` instead.
    """

    amplitudes: np.ndarray
    sector: Sector = Sector.A
    time: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size < 1:
            raise DimensionMismatchError(f"amplitudes must be a vector, got {amp.shape}")
        if not np.all(np.isfinite(amp.view(float))):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _freeze(amp))
        object.__setattr__(self, "sector", Sector(self.sector))
        object.__setattr__(self, "time", float(self.time))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def with_amplitudes(self, amp: np.ndarray, time: float | None = None) -> "StateVector":
        return StateVector(amp, self.sector, self.time if time is None else time)


@dataclass(frozen=True, eq=False)
class EffectiveData:
    """Survivor set, spectral ceiling, and the effective generators.

    ``survivor_set`` holds the indices (a prefix of the canonical
    eigenvalue order) whose imaginary parts reach the maximum ``b_max``
    within the membership tolerance; ``gap`` is the distance from
    ``b_max`` down to the best excluded mode and sets every exponential
    convergence rate downstream (``inf`` when nothing is excluded).
    """

    survivor_set: tuple[int, ...]
    b_max: float
    h_eff: np.ndarray
    h_eff_b: np.ndarray
    gap: float

    def __post_init__(self):
        if len(self.survivor_set) == 0:
            raise InvariantViolationError("survivor set is empty")
        object.__setattr__(self, "survivor_set", tuple(int(i) for i in self.survivor_set))
        object.__setattr__(self, "h_eff", _freeze(np.asarray(self.h_eff, dtype=complex)))
        object.__setattr__(self, "h_eff_b", _freeze(np.asarray(self.h_eff_b, dtype=complex)))

    @property
    def n_survivors(self) -> int:
        return len(self.survivor_set)


def _propagate(amplitudes: np.ndarray, s: SpectralData, dt: float, phases: np.ndarray,
               sector: Sector) -> np.ndarray:
    if sector is Sector.A:
        coeff = s.p_inverse @ amplitudes
        return s.p_matrix @ (phases * coeff)
    coeff = s.pb_inverse @ amplitudes
    return s.pb_matrix @ (phases * coeff)


def _check_amplitudes(amp: np.ndarray, cap: float) -> None:
    finite = np.all(np.isfinite(amp.view(float)))
    if not finite or np.max(np.abs(amp)) > cap:
        raise AmplitudeOverflowError(
            f"amplitude magnitude exceeded cap {cap:.2e}; renormalize or shorten dt"
        )


def evolve(state: StateVector, s: SpectralData, dt: float,
           overflow_cap: float = DEFAULT_OVERFLOW_CAP) -> StateVector:
    """Propagate a state by ``dt`` (negative for backward evolution).

    Sector ``A`` uses the generator ``H``; sector ``B`` uses ``H^dag``
    through the conjugate eigen-system, which is the conjugate-transpose
    propagator.  Satisfies the composition law
    ``evolve(evolve(x, t1), t2) == evolve(x, t1 + t2)``.

    Raises
    ------
    AmplitudeOverflowError
        If any output amplitude magnitude exceeds ``overflow_cap``;
        the caller must renormalize or shorten ``dt``.
    """
    if state.dim != s.dim:
        raise DimensionMismatchError(
            f"state dim {state.dim} against spectral data dim {s.dim}"
        )
    dt = float(dt)
    if not np.isfinite(dt):
        raise ValueError("dt must be finite")
    lam = s.eigenvalues if state.sector is Sector.A else np.conj(s.eigenvalues)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        phases = np.exp(-1j * lam * dt / s.hbar)
        new_amp = _propagate(state.amplitudes, s, dt, phases, state.sector)
    _check_amplitudes(new_amp, overflow_cap)
    return state.with_amplitudes(new_amp, time=state.time + dt)


def effective(s: SpectralData, eps_a: float = DEFAULT_EPS_A) -> EffectiveData:
    """Identify the surviving modes and build the effective generators.

    A mode ``i`` survives when ``b_max - Im lam_i <= eps_a * max(1, |b_max|)``.
    Floating-point spectra never tie exactly, hence the relative
    tolerance.  The survivor set is never empty: the top mode always
    qualifies.
    """
    if not eps_a > 0:
        raise ValueError("eps_a must be positive")
    im = s.eigenvalues.imag
    b_max = float(im[0])
    tol = eps_a * max(1.0, abs(b_max))
    member = (b_max - im) <= tol
    n_surv = int(np.argmin(member)) if not member.all() else s.dim
    survivors = tuple(range(n_surv))
    gap = float("inf") if n_surv == s.dim else float(b_max - im[n_surv])
    d_tilde = np.where(np.arange(s.dim) < n_surv, s.eigenvalues.real, 0.0)
    h_eff = (s.p_matrix * d_tilde) @ s.p_inverse
    h_eff_b = h_eff.conj().T
    _validate_effective(s, survivors, h_eff)
    return EffectiveData(
        survivor_set=survivors, b_max=b_max, h_eff=h_eff, h_eff_b=h_eff_b, gap=gap
    )


def _validate_effective(s: SpectralData, survivors: tuple[int, ...], h_eff: np.ndarray) -> None:
    scale = max(float(np.linalg.norm(h_eff)), float(np.linalg.norm(s.hamiltonian.matrix)))
    if scale == 0.0:
        return
    tol = 1e-10 * s.cond_p**2 * scale
    adj = q_adjoint(h_eff, s.q_metric)
    if np.linalg.norm(adj - h_eff) > tol:
        raise InvariantViolationError("effective generator is not metric-hermitian")
    target = np.where(np.arange(s.dim) < len(survivors), s.eigenvalues.real, 0.0)
    resid = np.linalg.norm(h_eff @ s.p_matrix - s.p_matrix * target)
    if resid > tol:
        raise InvariantViolationError("effective generator mis-acts on eigenvectors")


def survivor_projection(state: StateVector, s: SpectralData, eff: EffectiveData) -> StateVector:
    """Project onto the span of the surviving eigenvectors.

    Zeroes the eigen-coefficients outside the survivor set and maps
    back.  May return the zero vector when the state has no survivor
    overlap; downstream consumers must treat that as a null state
    rather than normalize it.
    """
    if state.dim != s.dim:
        raise DimensionMismatchError(
            f"state dim {state.dim} against spectral data dim {s.dim}"
        )
    keep = np.zeros(s.dim)
    keep[list(eff.survivor_set)] = 1.0
    if state.sector is Sector.A:
        coeff = keep * (s.p_inverse @ state.amplitudes)
        amp = s.p_matrix @ coeff
    else:
        coeff = keep * (s.pb_inverse @ state.amplitudes)
        amp = s.pb_matrix @ coeff
    return state.with_amplitudes(amp)


def _sector_metric(state: StateVector, s: SpectralData) -> MetricOperator:
    return s.q_metric if state.sector is Sector.A else s.qb_metric


def evolve_normalized(state: StateVector, s: SpectralData, q: MetricOperator, dt: float,
                      overflow_cap: float = DEFAULT_OVERFLOW_CAP) -> StateVector:
    """Propagate and rescale to unit metric norm.

    Overflow is avoided internally by splitting large ``dt`` into steps
    short enough that no mode grows by more than ``e^{1/2}`` per step
    before the rescaling; the step rule uses the largest ``|Im lam|``
    so strongly decaying spectra cannot underflow either.
    """
    if state.dim != s.dim:
        raise DimensionMismatchError(
            f"state dim {state.dim} against spectral data dim {s.dim}"
        )
    norm0 = q.norm(state)
    if not norm0 > 0.0:
        raise NullStateError("cannot normalize a state of zero metric norm")
    dt = float(dt)
    rate = float(np.max(np.abs(s.eigenvalues.imag)))
    if dt != 0.0 and rate > 0.0:
        n_steps = max(1, int(np.ceil(abs(dt) * rate / (0.5 * s.hbar))))
    else:
        n_steps = 1
    step = dt / n_steps
    out = state.with_amplitudes(state.amplitudes / norm0)
    for _ in range(n_steps):
        out = evolve(out, s, step, overflow_cap=overflow_cap)
        norm = q.norm(out)
        if not norm > 0.0:
            raise NullStateError("state norm underflowed to zero during evolution")
        out = out.with_amplitudes(out.amplitudes / norm)
    return out


def evolve_effective(state: StateVector, s: SpectralData, eff: EffectiveData,
                     dt: float) -> StateVector:
    """Propagate under the effective generator (metric-unitary flow).

    The flow is spectral in the same eigenbasis: survivors rotate with
    ``exp(-i Re(lam) dt / hbar)``, excluded modes are frozen.  The
    metric norm is conserved, which is the operational content of the
    generator being metric-hermitian.
    """
    if state.dim != s.dim:
        raise DimensionMismatchError(
            f"state dim {state.dim} against spectral data dim {s.dim}"
        )
    d_tilde = np.where(
        np.arange(s.dim) < eff.n_survivors, s.eigenvalues.real, 0.0
    )
    phases = np.exp(-1j * d_tilde * float(dt) / s.hbar)
    amp = _propagate(state.amplitudes, s, dt, phases, state.sector)
    return state.with_amplitudes(amp, time=state.time + float(dt))
