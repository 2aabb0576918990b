"""JSON encoding of complex vectors and matrices.

Complex numbers travel as ``[re, im]`` pairs; matrices as row-major
nested lists of pairs.  A flat row-major list of ``dim*dim`` pairs is
accepted on input for convenience.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "complex_to_json",
    "complex_from_json",
    "vector_to_json",
    "vector_from_json",
    "matrix_to_json",
    "matrix_from_json",
]


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ValueError(f"complex entry must be an [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def vector_to_json(v: np.ndarray) -> list[list[float]]:
    return [complex_to_json(z) for z in np.asarray(v, dtype=complex)]


def vector_from_json(data) -> np.ndarray:
    return np.array([complex_from_json(p) for p in data], dtype=complex)


def matrix_to_json(m: np.ndarray) -> list[list[list[float]]]:
    m = np.asarray(m, dtype=complex)
    return [[complex_to_json(z) for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    if len(data) == 0:
        raise ValueError("empty matrix")
    first = data[0]
    if len(first) == 2 and all(isinstance(x, (int, float)) for x in first):
        # flat row-major list of [re, im] pairs
        flat = np.array([complex_from_json(p) for p in data], dtype=complex)
        dim = int(round(np.sqrt(flat.size)))
        if dim * dim != flat.size:
            raise ValueError(f"flat matrix of {flat.size} entries is not square")
        return flat.reshape(dim, dim)
    rows = [[complex_from_json(p) for p in row] for row in data]
    m = np.array(rows, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix is not square: shape {m.shape}")
    return m
