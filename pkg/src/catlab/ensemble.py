"""Reproducible random Hamiltonians with planted spectral structure.

Draws are deterministic in the seed (PCG64 streams, byte-identical
across platforms for a fixed numpy arithmetic profile) and come with
their ground truth attached, so property tests can compare recovered
spectra against what was planted instead of trusting the solver twice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Sector, StateVector
from .spectral import Hamiltonian, canonical_gauge

__all__ = ["EnsembleSpec", "PlantedTruth", "sample_hamiltonian", "sample_state"]


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for one random draw.

    ``n_survivors`` eigenvalues share the maximal imaginary part (up to
    a perturbation well below the default membership tolerance); the
    best excluded mode sits exactly ``im_gap`` below it.  Real parts of
    survivors are separated on the scale of ``re_spread``.  The
    eigenvector matrix is shaped to a prescribed condition number.
    """

    dim: int
    seed: int
    cond_target: float = 50.0
    im_gap: float = 0.5
    n_survivors: int = 1
    re_spread: float = 1.5

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if not self.cond_target >= 1.0:
            raise ValueError("cond_target must be >= 1")
        if not self.im_gap >= 0.0:
            raise ValueError("im_gap must be >= 0")
        if not 1 <= self.n_survivors <= self.dim:
            raise ValueError("need 1 <= n_survivors <= dim")
        if not self.re_spread > 0.0:
            raise ValueError("re_spread must be positive")


@dataclass(frozen=True, eq=False)
class PlantedTruth:
    """Ground truth of a draw, in canonical eigenvalue order."""

    eigenvalues: np.ndarray
    p_matrix: np.ndarray
    b_max: float
    gap: float
    survivors: tuple[int, ...]
    cond_p: float


# Survivor imaginary parts are perturbed by at most a tenth of the
# default membership tolerance, so the planted set is always recovered.
_SURVIVOR_JITTER = 1e-10


def _random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    # fix the QR phase ambiguity for reproducibility across backends
    d = np.diagonal(r)
    return q * np.where(np.abs(d) > 0, np.conj(d) / np.abs(d), 1.0)


def _planted_eigenvalues(rng: np.random.Generator, spec: EnsembleSpec) -> np.ndarray:
    dim, k = spec.dim, spec.n_survivors
    b_max = float(rng.normal(0.0, 0.5))
    im = np.empty(dim)
    im[0] = b_max
    jitter_scale = _SURVIVOR_JITTER * max(1.0, abs(b_max))
    im[1:k] = b_max - rng.uniform(0.1, 0.5, size=k - 1) * jitter_scale
    for j in range(k, dim):
        im[j] = b_max - spec.im_gap * (1.0 + 1.5 * (j - k)) - (j > k) * float(
            rng.uniform(0.0, 0.5) * spec.im_gap
        )
    re = spec.re_spread * (np.arange(dim) + 0.25 * rng.uniform(-1.0, 1.0, size=dim))
    lam = re + 1j * im
    order = np.lexsort((lam.real, -lam.imag))
    return lam[order]


def sample_hamiltonian(spec: EnsembleSpec, hbar: float = 1.0
                       ) -> tuple[Hamiltonian, PlantedTruth]:
    """Draw a diagonalizable Hamiltonian with planted spectrum.

    The eigenvector matrix is ``U diag(s) V^dag`` with independent
    random unitaries and singular values spaced geometrically over
    ``cond_target``, then pushed to the canonical gauge; the actual
    condition number lands within a factor of two of the target.
    Deterministic in ``spec.seed``.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    lam = _planted_eigenvalues(rng, spec)
    dim = spec.dim
    u = _random_unitary(rng, dim)
    v = _random_unitary(rng, dim)
    svals = spec.cond_target ** (-np.linspace(0.0, 1.0, dim)) if dim > 1 else np.ones(1)
    p = canonical_gauge((u * svals) @ v.conj().T)
    h = Hamiltonian((p * lam) @ np.linalg.inv(p), hbar=hbar)
    k = spec.n_survivors
    gap = float("inf") if k == dim else float(lam.imag[0] - lam.imag[k])
    truth = PlantedTruth(
        eigenvalues=lam,
        p_matrix=p,
        b_max=float(lam.imag[0]),
        gap=gap,
        survivors=tuple(range(k)),
        cond_p=float(np.linalg.cond(p)),
    )
    return h, truth


def sample_state(dim: int, seed: int, sector: Sector = Sector.A,
                 time: float = 0.0) -> StateVector:
    """Complex-Gaussian state of unit Euclidean norm, deterministic in
    the seed."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    amp = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(amp / np.linalg.norm(amp), sector=sector, time=time)
