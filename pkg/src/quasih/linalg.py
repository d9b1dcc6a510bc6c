"""Small dense complex linear algebra at dimensions 2 and 4.

Matrices are plain ``numpy`` complex128 arrays. Everything here is a pure
function; the closed-form model quantities elsewhere in the package are
checked against these routines.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
from scipy.integrate import simpson

TAU_HERM = 1e-12
TAU_EIG = 1e-12
TAU_EXP = 1e-10
TAU_SING = 1e-14


class LinAlgError(ValueError):
    pass


class NotHermitian(LinAlgError):
    pass


class NotPSD(LinAlgError):
    pass


class Singular(LinAlgError):
    pass


def as_cmat(m) -> np.ndarray:
    """Coerce ``m`` to a finite complex 2x2 or 4x4 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.shape not in ((2, 2), (4, 4)):
        raise LinAlgError(f"expected a 2x2 or 4x4 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise LinAlgError("matrix has non-finite entries")
    return arr


def as_cvec(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.complex128)
    if arr.shape not in ((2,), (4,)):
        raise LinAlgError(f"expected a length-2 or length-4 vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise LinAlgError("vector has non-finite entries")
    return arr


def adjoint(m) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def mul(*ms) -> np.ndarray:
    out = np.asarray(ms[0], dtype=np.complex128)
    for m in ms[1:]:
        out = out @ m
    return out


def trace(m) -> complex:
    return complex(np.trace(m))


def det(m) -> complex:
    m = np.asarray(m)
    if m.shape == (2, 2):
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    return complex(np.linalg.det(m))


def max_norm(m) -> float:
    """Largest absolute entry."""
    return float(np.max(np.abs(m)))


def inv2(m) -> np.ndarray:
    """Closed-form inverse of a 2x2 matrix.

    Raises :class:`Singular` when ``|det| <= TAU_SING``.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (2, 2):
        raise LinAlgError("inv2 is only defined for 2x2 matrices")
    d = det(m)
    if abs(d) <= TAU_SING:
        raise Singular(f"|det| = {abs(d):.3e} is below {TAU_SING:g}")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / d


def is_hermitian(m, tol: float = TAU_HERM) -> bool:
    return max_norm(np.asarray(m) - adjoint(m)) <= tol


def _fix_phase(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude component of each column made real positive
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col)))
        out[:, j] = col * (abs(col[k]) / col[k])
    return out


def _herm_eig2(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = m[0, 0].real
    s = m[1, 1].real
    w = 0.5 * (m[0, 1] + np.conj(m[1, 0]))
    mean = 0.5 * (p + s)
    half = 0.5 * (p - s)
    r = float(np.hypot(half, abs(w)))

    # larger-magnitude root first, the other from the determinant
    big = mean + np.copysign(r, mean) if mean != 0.0 else r
    if big != 0.0:
        small = (p * s - abs(w) ** 2) / big
    else:
        small = -r
    lo, hi = sorted((small, big))

    if abs(w) == 0.0:
        vecs = np.eye(2, dtype=np.complex128)
        if p > s:
            vecs = vecs[:, ::-1].copy()
        return np.array([lo, hi]), vecs

    # two algebraically equivalent kernel vectors; keep the better conditioned one
    c1 = np.array([w, lo - p])
    c2 = np.array([lo - s, np.conj(w)])
    v = c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2
    v = v / np.linalg.norm(v)
    u = np.array([-np.conj(v[1]), np.conj(v[0])])
    return np.array([lo, hi]), np.column_stack([v, u])


def herm_eig(m, tol: float = TAU_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian 2x2 or 4x4 matrix.

    Returns
    -------
    evals : ndarray, shape (n,)
        Real eigenvalues in ascending order.
    evecs : ndarray, shape (n, n)
        Orthonormal eigenvectors as columns. The largest-magnitude entry of
        every column is real and positive, so the output is deterministic.
    """
    m = as_cmat(m)
    if not is_hermitian(m, tol):
        raise NotHermitian(f"|m - m^dag|_max = {max_norm(m - adjoint(m)):.3e} exceeds {tol:g}")
    if m.shape == (2, 2):
        evals, evecs = _herm_eig2(m)
    else:
        evals, evecs = np.linalg.eigh(0.5 * (m + adjoint(m)))
    return evals, _fix_phase(evecs)


def psd_sqrt(m) -> np.ndarray:
    """The unique positive semidefinite square root of a PSD matrix."""
    evals, evecs = herm_eig(m)
    if evals[0] < -TAU_EIG:
        raise NotPSD(f"smallest eigenvalue {evals[0]:.3e} is negative")
    roots = np.sqrt(np.clip(evals, 0.0, None))
    return (evecs * roots) @ adjoint(evecs)


def expm_oracle(m, t: float) -> np.ndarray:
    """``exp(-i t m)`` by Pade scaling-and-squaring; ``m`` need not be Hermitian."""
    m = as_cmat(m)
    return scipy.linalg.expm(-1j * float(t) * m)


def period_average(values_fn, period: float, panels: int = 2048) -> np.ndarray:
    """Mean of ``values_fn(t)`` over ``[0, period]`` by composite Simpson.

    ``values_fn`` takes a 1-D array of times and returns an array whose
    leading axis runs over those times.
    """
    if panels < 2 or panels % 2:
        raise ValueError("Simpson needs an even number of panels >= 2")
    ts = np.linspace(0.0, period, panels + 1)
    vals = np.asarray(values_fn(ts))
    return simpson(vals, x=ts, axis=0) / period
