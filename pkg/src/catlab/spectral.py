"""Proper inner products for diagonalizable non-hermitian Hamiltonians.

A diagonalizable matrix ``H = P D P^{-1}`` with non-orthogonal
eigenvectors measures unphysical transitions under the Euclidean inner
product.  The cure is the metric

    ``Q = (P^dag)^{-1} P^{-1}``,

a hermitian positive-definite operator under which the eigenvectors are
orthonormal, ``H`` is a normal operator, and the usual spectral calculus
goes through.  This module builds ``Q``, its dual ``Q_B = Q^{-1}`` for
the conjugate sector generated by ``H^dag``, the ``Q``-adjoint, and the
``Q``-hermitian / anti-``Q``-hermitian decomposition of ``H``.

All functions are pure; every returned object is immutable and safe to
share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DefectiveError, DimensionMismatchError, InvariantViolationError

__all__ = [
    "Hamiltonian",
    "MetricOperator",
    "SpectralData",
    "diagonalize",
    "q_inner",
    "q_adjoint",
    "qh_qa_split",
    "b_sector_eigen",
]

# Gauge threshold: after unit normalization the largest component is at
# least 1/sqrt(dim), so anything above this is a genuine entry.
_GAUGE_EPS = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _as_amplitudes(x) -> np.ndarray:
    """Accept a StateVector-like object or a plain complex vector."""
    amp = getattr(x, "amplitudes", x)
    return np.asarray(amp, dtype=complex)


def canonical_gauge(columns: np.ndarray) -> np.ndarray:
    """Scale each column to unit Euclidean norm with its first
    significant component made real and positive.

    The metric compensates any eigenvector scaling, so the gauge is
    pure convention; fixing one makes outputs reproducible.
    """
    v = np.array(columns, dtype=complex)
    norms = np.linalg.norm(v, axis=0)
    if np.any(norms == 0.0):
        raise DefectiveError("zero eigenvector column")
    v /= norms
    for j in range(v.shape[1]):
        col = v[:, j]
        k = int(np.argmax(np.abs(col) > _GAUGE_EPS))
        pivot = col[k]
        v[:, j] = col * (np.conj(pivot) / abs(pivot))
    return v


@dataclass(frozen=True)
class Hamiltonian:
    """A finite-dimensional generator of the forward-sector dynamics.

    Parameters
    ----------
    matrix : (dim, dim) complex ndarray
        Square matrix with finite entries, in energy units.
    hbar : float
        Action scale of the Schroedinger equation; all decay and
        oscillation rates come out in units of ``1/hbar``.
    """

    matrix: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatchError(f"matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m.view(float))):
            raise ValueError("matrix entries must be finite")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError("hbar must be positive and finite")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class MetricOperator:
    """Hermitian positive-definite metric with cached inverse and
    triangular factor.

    The factor ``L`` (``matrix = L L^dag``) certifies positivity and
    evaluates norms as ``|L^dag u|``; the cached inverse avoids solves
    in the adjoint.
    """

    matrix: np.ndarray
    inverse: np.ndarray
    factor: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        # Symmetrized entries are exactly conjugate pairs; the check
        # below catches construction bugs, not rounding.
        asym = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        scale = max(1.0, float(np.max(np.abs(m))))
        if asym > 1e-10 * scale:
            raise InvariantViolationError(f"metric not hermitian: asymmetry {asym:.3e}")
        m = (m + m.conj().T) / 2.0
        if self.factor is None:
            try:
                fac = np.linalg.cholesky(m)
            except np.linalg.LinAlgError as exc:
                raise DefectiveError(
                    "metric is not numerically positive-definite"
                ) from exc
        else:
            fac = np.asarray(self.factor, dtype=complex)
        if np.any(fac.diagonal().real <= 0.0):
            raise DefectiveError("metric factor has a non-positive pivot")
        inv = np.asarray(self.inverse, dtype=complex)
        if inv.shape != m.shape:
            raise DimensionMismatchError("inverse shape does not match metric")
        cond = float(np.linalg.cond(m))
        resid = np.linalg.norm(m @ inv - np.eye(m.shape[0])) / np.sqrt(m.shape[0])
        if resid > 1e-10 * cond:
            raise InvariantViolationError(
                f"metric inverse residual {resid:.3e} exceeds 1e-10*cond={1e-10 * cond:.3e}"
            )
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "inverse", _freeze(inv))
        object.__setattr__(self, "factor", _freeze(fac))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "MetricOperator":
        """Build a metric from its matrix alone, inverting numerically."""
        m = np.asarray(matrix, dtype=complex)
        return cls(matrix=m, inverse=np.linalg.inv((m + m.conj().T) / 2.0))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def norm(self, u) -> float:
        """Metric norm ``sqrt(u^dag Q u)`` evaluated through the factor
        (non-negative by construction)."""
        amp = _as_amplitudes(u)
        if amp.shape != (self.dim,):
            raise DimensionMismatchError(
                f"vector of length {amp.shape} against metric of dim {self.dim}"
            )
        return float(np.linalg.norm(self.factor.conj().T @ amp))


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigendecomposition of a Hamiltonian together with both sector
    metrics and conditioning diagnostics.

    Eigenvalues are sorted by descending imaginary part with ties broken
    by ascending real part, so the long-time survivors always form a
    prefix of the index list.  Columns of ``p_matrix`` follow the same
    order and carry the canonical gauge.
    """

    hamiltonian: Hamiltonian
    eigenvalues: np.ndarray
    p_matrix: np.ndarray
    p_inverse: np.ndarray
    q_metric: MetricOperator
    qb_metric: MetricOperator
    cond_p: float

    def __post_init__(self):
        for name in ("eigenvalues", "p_matrix", "p_inverse"):
            object.__setattr__(self, name, _freeze(np.asarray(getattr(self, name), dtype=complex)))
        w = self.eigenvalues
        order = np.lexsort((w.real, -w.imag))
        if not np.array_equal(order, np.arange(w.size)):
            raise InvariantViolationError("eigenvalues are not in canonical order")
        h = self.hamiltonian.matrix
        recon = (self.p_matrix * w) @ self.p_inverse
        rel = np.linalg.norm(recon - h) / max(np.linalg.norm(h), np.finfo(float).tiny)
        if rel > 1e-10 * self.cond_p:
            raise InvariantViolationError(
                f"eigendecomposition residual {rel:.3e} exceeds 1e-10*cond_p"
            )
        dim = w.size
        resid = np.linalg.norm(
            self.qb_metric.matrix @ self.q_metric.matrix - np.eye(dim)
        ) / np.sqrt(dim)
        if resid > 1e-10 * self.cond_p**2:
            raise InvariantViolationError(
                f"metric duality residual {resid:.3e} exceeds 1e-10*cond_p^2"
            )

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def hbar(self) -> float:
        return self.hamiltonian.hbar

    @property
    def pb_matrix(self) -> np.ndarray:
        """Diagonalizing matrix of the conjugate sector, ``(P^dag)^{-1}``."""
        return self.p_inverse.conj().T

    @property
    def pb_inverse(self) -> np.ndarray:
        return self.p_matrix.conj().T


def diagonalize(h: Hamiltonian, cond_limit: float = 1e8) -> SpectralData:
    """Diagonalize ``h`` and assemble both sector metrics.

    Parameters
    ----------
    h : Hamiltonian
    cond_limit : float
        Reject inputs whose eigenvector matrix has a larger estimated
        condition number.  Past roughly ``1/sqrt(eps)`` the metric is
        numerically meaningless.

    Returns
    -------
    SpectralData

    Raises
    ------
    DefectiveError
        If the eigenvector matrix is singular or worse-conditioned than
        ``cond_limit`` (Jordan blocks, near-defective inputs).
    """
    if not cond_limit > 1.0:
        raise ValueError("cond_limit must exceed 1")
    w, v = np.linalg.eig(h.matrix)
    order = np.lexsort((w.real, -w.imag))
    w = w[order]
    v = v[:, order]
    cond0 = float(np.linalg.cond(v))
    if not np.isfinite(cond0) or cond0 > cond_limit:
        raise DefectiveError(
            f"estimated cond(P) = {cond0:.3e} exceeds limit {cond_limit:.3e}; "
            "input is defective or too close to it"
        )
    p = canonical_gauge(v)
    cond_p = float(np.linalg.cond(p))
    if not np.isfinite(cond_p) or cond_p > cond_limit:
        raise DefectiveError(
            f"cond(P) = {cond_p:.3e} after gauge exceeds limit {cond_limit:.3e}"
        )
    p_inv = np.linalg.inv(p)
    q = MetricOperator(matrix=p_inv.conj().T @ p_inv, inverse=p @ p.conj().T)
    qb = MetricOperator(matrix=p @ p.conj().T, inverse=q.matrix)
    return SpectralData(
        hamiltonian=h,
        eigenvalues=w,
        p_matrix=p,
        p_inverse=p_inv,
        q_metric=q,
        qb_metric=qb,
        cond_p=cond_p,
    )


def q_inner(u, v, q: MetricOperator) -> complex:
    """Metric inner product ``u^dag Q v``.

    Conjugate-symmetric: ``q_inner(u, v, q) == conj(q_inner(v, u, q))``.
    Accepts state vectors or plain complex arrays.
    """
    ua = _as_amplitudes(u)
    va = _as_amplitudes(v)
    if ua.shape != va.shape or ua.shape != (q.dim,):
        raise DimensionMismatchError(
            f"q_inner shapes {ua.shape}, {va.shape} against metric dim {q.dim}"
        )
    return complex(ua.conj() @ (q.matrix @ va))


def q_adjoint(a: np.ndarray, q: MetricOperator) -> np.ndarray:
    """Metric adjoint ``Q^{-1} A^dag Q``.

    Satisfies ``<u|_Q A |v>* == <v|_Q A^{adj} |u>`` for all vectors, and
    is an involution.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape != (q.dim, q.dim):
        raise DimensionMismatchError(
            f"operator shape {a.shape} against metric dim {q.dim}"
        )
    return q.inverse @ a.conj().T @ q.matrix


def qh_qa_split(h: Hamiltonian, s: SpectralData) -> tuple[np.ndarray, np.ndarray]:
    """Split ``H`` into its metric-hermitian and anti-hermitian parts.

    Returns ``(H_h, H_a)`` with ``H_h = P diag(Re lam) P^{-1}`` and
    ``H_a = P diag(i Im lam) P^{-1}``, so that ``H_h + H_a == H``,
    ``H_h`` is Q-hermitian and ``H_a`` is anti-Q-hermitian.
    """
    _check_matches(h, s)
    h_h = (s.p_matrix * s.eigenvalues.real) @ s.p_inverse
    h_a = (s.p_matrix * (1j * s.eigenvalues.imag)) @ s.p_inverse
    return h_h, h_a


def b_sector_eigen(s: SpectralData) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-system of the conjugate-sector generator ``H^dag``.

    Returns ``(P_B, lam*)`` where the columns of ``P_B = Q P =
    (P^dag)^{-1}`` are the conjugate-sector eigenvectors and the
    eigenvalues are the complex conjugates of the forward-sector ones.
    Verifies the eigen-relation columnwise before returning.
    """
    pb = s.pb_matrix
    lam_b = np.conj(s.eigenvalues)
    hdag = s.hamiltonian.matrix.conj().T
    resid = np.linalg.norm(hdag @ pb - pb * lam_b, axis=0)
    scale = np.linalg.norm(s.hamiltonian.matrix) * np.linalg.norm(pb, axis=0)
    bad = resid > 1e-10 * s.cond_p * np.maximum(scale, np.finfo(float).tiny)
    if np.any(bad):
        raise InvariantViolationError(
            f"conjugate-sector eigen-relation fails on columns {np.nonzero(bad)[0]}"
        )
    return pb, lam_b


def _check_matches(h: Hamiltonian, s: SpectralData) -> None:
    if h.dim != s.dim or not np.array_equal(h.matrix, s.hamiltonian.matrix):
        raise ValueError("spectral data was not computed from this Hamiltonian")
