"""Single-excitation Hamiltonian, its bi-orthonormal eigensystem, metrics and Dyson maps.

Basis order everywhere is ``(e_S, e_B)``: the excitation on the system
oscillator first, the symmetric bath excitation second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import TAU_EIG, adjoint, herm_eig, inv2, max_norm, psd_sqrt


class InvalidRegime(ValueError):
    """Parameters outside ``g > 0, |kappa| < g`` or non-positive metric weights."""


class NotUnitary(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    nu: float
    g: float
    kappa: float
    n_bath: int = 1
    x1: float = 1.0
    x2: float = 1.0

    def __post_init__(self):
        for name in ("nu", "g", "kappa", "x1", "x2"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidRegime(f"{name} must be finite")
        if self.nu <= 0:
            raise InvalidRegime(f"nu must be positive, got {self.nu}")
        if not self.g > 0:
            raise InvalidRegime(f"g must be positive, got {self.g}")
        if not abs(self.kappa) < self.g:
            raise InvalidRegime(
                f"|kappa| = {abs(self.kappa)} must be < g = {self.g} "
                "(broken-PT and exceptional points are not supported)"
            )
        if int(self.n_bath) != self.n_bath or self.n_bath < 1:
            raise InvalidRegime(f"n_bath must be a positive integer, got {self.n_bath}")
        if not (self.x1 > 0 and self.x2 > 0):
            raise InvalidRegime(f"metric weights must be positive, got x1={self.x1}, x2={self.x2}")

    @property
    def a1(self) -> float:
        return math.sqrt(self.g + self.kappa)

    @property
    def a2(self) -> float:
        return math.sqrt(self.g - self.kappa)

    @property
    def ratio(self) -> float:
        """a1 / a2."""
        return self.a1 / self.a2

    @property
    def omega(self) -> float:
        return math.sqrt(self.n_bath) * math.sqrt(self.g**2 - self.kappa**2)

    @property
    def omega_plus(self) -> float:
        return self.nu + self.omega

    @property
    def omega_minus(self) -> float:
        return self.nu - self.omega

    @property
    def diagonal_metric(self) -> bool:
        return self.x1 == self.x2

    @property
    def x(self) -> float:
        """Common metric weight; only defined when x1 == x2."""
        if not self.diagonal_metric:
            raise ValueError("x is only defined for the diagonal metric x1 == x2")
        return self.x1

    def with_metric(self, x1: float, x2: float | None = None) -> "ModelParams":
        return ModelParams(self.nu, self.g, self.kappa, self.n_bath, x1, x1 if x2 is None else x2)


@dataclass(frozen=True)
class Metric2:
    matrix: np.ndarray
    x1: float
    x2: float

    @property
    def is_diagonal(self) -> bool:
        return self.x1 == self.x2

    @property
    def tag(self) -> str:
        return "diagonal" if self.is_diagonal else "general"


@dataclass(frozen=True)
class BiSystem:
    v_plus: np.ndarray
    v_minus: np.ndarray
    vstar_plus: np.ndarray
    vstar_minus: np.ndarray

    def projector(self, sign: int) -> np.ndarray:
        """Spectral projection ``|v><v*|`` for the ``+`` (sign=1) or ``-`` branch."""
        v, vs = (self.v_plus, self.vstar_plus) if sign > 0 else (self.v_minus, self.vstar_minus)
        return np.outer(v, np.conj(vs))


@dataclass(frozen=True)
class Unitary2:
    """2x2 unitary ``[[a, b], [c, d]]`` on (e_S, e_B)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        a, b, c, d = self.a, self.b, self.c, self.d
        residual = max(
            abs(a * c.conjugate() + b * d.conjugate()),
            abs(abs(a) ** 2 + abs(b) ** 2 - 1),
            abs(abs(c) ** 2 + abs(d) ** 2 - 1),
        )
        if residual > TAU_EIG:
            raise NotUnitary(f"unitarity residual {residual:.3e} exceeds {TAU_EIG:g}")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @classmethod
    def from_matrix(cls, m) -> "Unitary2":
        m = np.asarray(m, dtype=np.complex128)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "Unitary2":
        return cls(1, 0, 0, 1)

    @classmethod
    def real_cd(cls, c: float) -> "Unitary2":
        """Real rotation with ``c, d >= 0``: ``[[d, -c], [c, d]]``, ``d = sqrt(1 - c^2)``."""
        if not 0.0 <= c <= 1.0:
            raise NotUnitary(f"real_cd needs c in [0, 1], got {c}")
        d = math.sqrt(1.0 - c * c)
        return cls(d, -c, c, d)

    @classmethod
    def diagonal(cls, phi1: float = 0.0, phi2: float = 0.0) -> "Unitary2":
        return cls(np.exp(1j * phi1), 0, 0, np.exp(1j * phi2))

    @classmethod
    def antidiagonal(cls, phi1: float = 0.0, phi2: float = 0.0) -> "Unitary2":
        return cls(0, np.exp(1j * phi1), np.exp(1j * phi2), 0)


def build_h1(p: ModelParams) -> np.ndarray:
    """Matrix of H1 on (e_S, e_B)."""
    s = math.sqrt(p.n_bath)
    return np.array(
        [[p.nu, (p.g + p.kappa) * s], [(p.g - p.kappa) * s, p.nu]],
        dtype=np.complex128,
    )


def spectrum(p: ModelParams) -> tuple[float, float]:
    return p.omega_plus, p.omega_minus


def propagator(p: ModelParams, t: float) -> np.ndarray:
    """Closed-form ``exp(-i t H1)`` built from the spectral projectors."""
    r = p.ratio
    c, s = math.cos(p.omega * t), math.sin(p.omega * t)
    core = np.array([[c, -1j * r * s], [-1j * s / r, c]], dtype=np.complex128)
    return np.exp(-1j * p.nu * t) * core


def bi_system(p: ModelParams) -> BiSystem:
    r1 = math.sqrt(p.a1 / p.a2)
    r2 = math.sqrt(p.a2 / p.a1)
    k = 1.0 / math.sqrt(2.0)
    return BiSystem(
        v_plus=k * np.array([r1, r2], dtype=np.complex128),
        v_minus=k * np.array([r1, -r2], dtype=np.complex128),
        vstar_plus=k * np.array([r2, r1], dtype=np.complex128),
        vstar_minus=k * np.array([r2, -r1], dtype=np.complex128),
    )


def metric(p: ModelParams) -> Metric2:
    r = p.ratio
    s = p.x1 + p.x2
    off = p.x1 - p.x2
    m = 0.5 * np.array([[s / r, off], [off, s * r]], dtype=np.complex128)
    return Metric2(m, p.x1, p.x2)


def metric_from_bi_system(p: ModelParams) -> np.ndarray:
    """``x1 |v*+><v*+| + x2 |v*-><v*-|`` assembled from the eigenvectors of H1^dag."""
    bs = bi_system(p)
    return p.x1 * np.outer(bs.vstar_plus, np.conj(bs.vstar_plus)) + p.x2 * np.outer(
        bs.vstar_minus, np.conj(bs.vstar_minus)
    )


def quasi_hermiticity_residual(p: ModelParams, eta) -> float:
    """``|H1^dag eta - eta H1|_max``; zero exactly when ``eta`` is a metric for H1."""
    m = eta.matrix if isinstance(eta, Metric2) else np.asarray(eta, dtype=np.complex128)
    h = build_h1(p)
    return max_norm(adjoint(h) @ m - m @ h)


def dyson_S(p: ModelParams, w: Unitary2) -> np.ndarray:
    """``S = W sqrt(eta)``."""
    return w.matrix @ psd_sqrt(metric(p).matrix)


def hermitian_counterpart(p: ModelParams, w: Unitary2) -> np.ndarray:
    """``h_W = S H1 S^-1``."""
    s = dyson_S(p, w)
    return s @ build_h1(p) @ inv2(s)


def symmetrized_h1(p: ModelParams) -> np.ndarray:
    """``sqrt(eta) H1 sqrt(eta)^-1`` for the diagonal metric, a Hermitian similarity of H1."""
    root = psd_sqrt(metric(p.with_metric(1.0)).matrix)
    return root @ build_h1(p) @ inv2(root)


def random_unitary2(seed: int | None = None, rng: np.random.Generator | None = None) -> Unitary2:
    """Haar-distributed 2x2 unitary.

    With ``seed`` the draw comes from a fresh Philox (counter-based) stream,
    so the same seed gives the same unitary on every platform. Pass ``rng``
    instead to draw a sequence from one stream.
    """
    if rng is None:
        rng = np.random.Generator(np.random.Philox(seed))
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    # one Gram-Schmidt pass keeps the residual far below TAU_EIG
    q[:, 0] /= np.linalg.norm(q[:, 0])
    q[:, 1] -= np.vdot(q[:, 0], q[:, 1]) * q[:, 0]
    q[:, 1] /= np.linalg.norm(q[:, 1])
    return Unitary2.from_matrix(q)


def eigvals_2x2(m) -> np.ndarray:
    """Roots of ``det(m - lambda) = 0`` for a general 2x2 matrix, sorted by real part."""
    m = np.asarray(m, dtype=np.complex128)
    tr = m[0, 0] + m[1, 1]
    dt = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = np.sqrt(tr * tr / 4 - dt)
    roots = np.array([tr / 2 - disc, tr / 2 + disc])
    return roots[np.argsort(roots.real)]


def check_spectrum(p: ModelParams) -> float:
    """Largest disagreement between the closed-form spectrum and two numerical routes."""
    closed = np.array([p.omega_minus, p.omega_plus])
    herm, _ = herm_eig(symmetrized_h1(p))
    roots = eigvals_2x2(build_h1(p))
    return float(max(np.max(np.abs(herm - closed)), np.max(np.abs(roots - closed))))
