"""Closed-form Jacobi fields along normal geodesics.

Everything lives in the adapted frame where ``R_a`` is diagonal, so the
operators ``D1 = cos(t sqrt(R_a))`` and ``D2 = sin(t sqrt(R_a)) / sqrt(R_a)``
are diagonal.  ``t`` is passed explicitly; ``D_k(spectrum, t)`` here is the
operator written ``D_k(ta)`` for a unit normal ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symspace import RootSpectrum

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class JacobiState:
    position: np.ndarray
    velocity: np.ndarray
    t: float


def _vector(spectrum: RootSpectrum, v, name="vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (spectrum.tangent_dim,):
        raise ValueError(f"{name}: expected length {spectrum.tangent_dim}, got shape {v.shape}")
    return v


def d1_factors(spectrum: RootSpectrum, t):
    """Diagonal of ``D1`` at ``t``; a trailing axis is added when ``t`` is an array."""
    d = spectrum.frequencies()
    return np.cos(np.multiply.outer(t, d))


def d2_factors(spectrum: RootSpectrum, t):
    """Diagonal of ``D2`` at ``t``: ``sin(d t)/d`` on root blocks, ``t`` on the kernel."""
    d = spectrum.frequencies()
    t = np.asarray(t, dtype=float)
    td = np.multiply.outer(t, d)
    safe = np.where(d > 0, d, 1.0)
    return np.where(d > 0, np.sin(td) / safe, np.multiply.outer(t, np.ones_like(d)))


def d1_apply(spectrum: RootSpectrum, t: float, vector) -> np.ndarray:
    return d1_factors(spectrum, float(t)) * _vector(spectrum, vector)


def d2_apply(spectrum: RootSpectrum, t: float, vector) -> np.ndarray:
    return d2_factors(spectrum, float(t)) * _vector(spectrum, vector)


def propagate(spectrum: RootSpectrum, y0, y0_prime, t: float) -> JacobiState:
    """Solve ``Y'' + R_a Y = 0`` exactly with ``Y(0) = y0``, ``Y'(0) = y0_prime``."""
    y0 = _vector(spectrum, y0, "Y0")
    y1 = _vector(spectrum, y0_prime, "Y0_prime")
    t = float(t)
    d = spectrum.frequencies()
    c = d1_factors(spectrum, t)
    s = d2_factors(spectrum, t)
    position = c * y0 + s * y1
    # d/dt cos(dt) = -d sin(dt); d/dt sin(dt)/d = cos(dt); kernel: p + t q
    velocity = -d * np.sin(d * t) * y0 + c * y1
    return JacobiState(position, velocity, t)


def as_matrix(A, n: int) -> np.ndarray:
    """Validate a shape-operator matrix (or anything with a ``.matrix``)."""
    A = np.asarray(getattr(A, "matrix", A), dtype=float)
    if A.shape != (n, n):
        raise ValueError(f"shape operator: expected {n}x{n}, got {A.shape}")
    if n and np.max(np.abs(A - A.T)) >= SYMMETRY_TOL:
        raise ValueError("shape operator: matrix is not symmetric")
    return A


def endpoint_differential(spectrum: RootSpectrum, A, t):
    """``E(t) = D1(t) - D2(t) A``; vectorized over an array of ``t``.

    ``E`` is entire in ``t`` with ``E(0) = I``; focal parameters are exactly
    its singular points.
    """
    A = as_matrix(A, spectrum.tangent_dim)
    c = d1_factors(spectrum, t)
    s = d2_factors(spectrum, t)
    if np.ndim(t) == 0:
        return np.diag(c) - s[:, None] * A
    eye = np.eye(spectrum.tangent_dim)
    return c[:, :, None] * eye - s[:, :, None] * A


def cot_form(spectrum: RootSpectrum, A, t: float) -> np.ndarray:
    """``diag(d_i cot(t d_i) I, (1/t) I) - A``; singular where ``E(t)`` is, poles at ``t d_i in pi Z``."""
    A = as_matrix(A, spectrum.tangent_dim)
    d = spectrum.frequencies()
    t = float(t)
    with np.errstate(divide="ignore"):
        diag = np.where(d > 0, d / np.tan(np.where(d > 0, d, 1.0) * t), 1.0 / t)
    return np.diag(diag) - A


def cot_form_prefactor(spectrum: RootSpectrum, t: float) -> float:
    """Scalar ``c`` with ``det E(t) = c * det(cot_form(t))``."""
    return float(np.prod(d2_factors(spectrum, float(t))))
