"""Closed-form time evolution on the quasi-Hermitian and Hermitian sides.

Functions taking a time accept a float or a numpy array of times and
broadcast, so whole curves are evaluated in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import TAU_EIG, TAU_HERM, adjoint, herm_eig, max_norm
from .model import ModelParams, Unitary2, bi_system

TAU_NORM = 1e-10
TAU_QUAD = 1e-8
TAU_GEN = 1e-12


class NotNormalized(ValueError):
    pass


def eta_norm(p: ModelParams, A: complex, B: complex) -> float:
    """Squared metric norm of ``A e_S + B e_B``."""
    r = p.ratio
    return float(
        0.5 * (p.x1 + p.x2) * (abs(A) ** 2 / r + r * abs(B) ** 2)
        + (p.x1 - p.x2) * (A * np.conj(B)).real
    )


@dataclass(frozen=True)
class StateH1:
    """Initial amplitudes on (e_S, e_B)."""

    A: complex
    B: complex

    def __post_init__(self):
        object.__setattr__(self, "A", complex(self.A))
        object.__setattr__(self, "B", complex(self.B))

    @classmethod
    def strict(cls, p: ModelParams, A: complex, B: complex) -> "StateH1":
        n = eta_norm(p, A, B)
        if abs(n - 1.0) > TAU_NORM:
            raise NotNormalized(f"eta-norm is {n!r}, expected 1")
        return cls(A, B)

    @classmethod
    def normalized(cls, p: ModelParams, A: complex, B: complex) -> "StateH1":
        n = eta_norm(p, A, B)
        if not n > 0:
            raise NotNormalized("zero vector cannot be normalized")
        k = 1.0 / math.sqrt(n)
        return cls(A * k, B * k)

    @classmethod
    def from_alpha(cls, p: ModelParams, alpha: float, phase1: float = 0.0, phase2: float = 0.0) -> "StateH1":
        """Initial state with ``x (a2/a1) |A|^2 = alpha`` and the given phases of A and B."""
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        x, r = p.x, p.ratio
        A = math.sqrt(alpha * r / x) * np.exp(1j * phase1)
        B = math.sqrt((1.0 - alpha) / (x * r)) * np.exp(1j * phase2)
        return cls(A, B)


@dataclass(frozen=True)
class Trajectory:
    params: ModelParams
    initial: StateH1
    w: Unitary2 = field(default_factory=Unitary2.identity)

    def __post_init__(self):
        n = eta_norm(self.params, self.initial.A, self.initial.B)
        if abs(n - 1.0) > TAU_NORM:
            raise NotNormalized(f"initial state has eta-norm {n!r}")

    @property
    def A(self) -> complex:
        return self.initial.A

    @property
    def B(self) -> complex:
        return self.initial.B

    @property
    def alpha(self) -> float:
        return self.params.x * abs(self.A) ** 2 / self.params.ratio

    @property
    def ab(self) -> complex:
        """``A B*``."""
        return self.A * np.conj(self.B)

    @property
    def cd(self) -> complex:
        """``c d*``."""
        return self.w.c * np.conj(self.w.d)

    @property
    def omega(self) -> float:
        return self.params.omega

    @property
    def population_period(self) -> float:
        return math.pi / self.params.omega

    def with_unitary(self, w: Unitary2) -> "Trajectory":
        return Trajectory(self.params, self.initial, w)


@dataclass(frozen=True)
class Density2:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        if max_norm(m - adjoint(m)) > TAU_HERM:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TAU_NORM:
            raise ValueError(f"trace is {np.trace(m)}, expected 1")
        evals, _ = herm_eig(m)
        if evals[0] < -TAU_EIG or evals[-1] > 1 + TAU_EIG:
            raise ValueError(f"eigenvalues {evals} outside [0, 1]")

    @property
    def ground(self) -> float:
        """Weight of ``|0_S>`` (first diagonal entry)."""
        return float(self.matrix[0, 0].real)


@dataclass(frozen=True)
class ComplexSpectrumReport:
    """Diagonal of the reduced non-Hermitian state for a non-diagonal metric.

    ``entries`` holds the ``|0_S>`` and ``|1_S>`` weights (these are the
    eigenvalues); ``max_imag`` is the largest imaginary part seen, over all
    sampled times when built by :func:`complex_spectrum_scan`.
    """

    entries: tuple[complex, complex]
    max_imag: float
    not_a_density_matrix: bool


def evolve_amplitudes(traj: Trajectory, t):
    """``(A(t), B(t))`` with the global phase ``exp(-i nu t)`` stripped."""
    w = traj.omega
    r = traj.params.ratio
    c, s = np.cos(w * np.asarray(t)), np.sin(w * np.asarray(t))
    At = traj.A * c - 1j * traj.B * r * s
    Bt = traj.B * c - 1j * traj.A * s / r
    return At, Bt


def psi(traj: Trajectory, t: float) -> np.ndarray:
    """Full state vector ``exp(-i t H1) psi(0)`` including the global phase."""
    At, Bt = evolve_amplitudes(traj, t)
    return np.exp(-1j * traj.params.nu * t) * np.array([At, Bt], dtype=np.complex128)


def eta_norm_t(traj: Trajectory, t) -> np.ndarray:
    """``x1 |<v*+|psi(t)>|^2 + x2 |<v*-|psi(t)>|^2``."""
    bs = bi_system(traj.params)
    At, Bt = evolve_amplitudes(traj, t)
    cp = np.conj(bs.vstar_plus[0]) * At + np.conj(bs.vstar_plus[1]) * Bt
    cm = np.conj(bs.vstar_minus[0]) * At + np.conj(bs.vstar_minus[1]) * Bt
    return traj.params.x1 * np.abs(cp) ** 2 + traj.params.x2 * np.abs(cm) ** 2


def _reduced_entries(traj: Trajectory, t):
    p = traj.params
    At, Bt = evolve_amplitudes(traj, t)
    r = p.ratio
    s, d = 0.5 * (p.x1 + p.x2), 0.5 * (p.x1 - p.x2)
    ground = s * r * np.abs(Bt) ** 2 + d * np.conj(At) * Bt
    excited = s * np.abs(At) ** 2 / r + d * At * np.conj(Bt)
    return ground, excited


def reduced_rho_H(traj: Trajectory, t: float) -> Density2 | ComplexSpectrumReport:
    """Partial trace over the bath of ``|psi(t)><psi(t)| eta``.

    For a diagonal metric this is ``diag(p(t), 1 - p(t))`` on
    ``(|0_S>, |1_S>)``. Otherwise the two diagonal entries are complex in
    general and a :class:`ComplexSpectrumReport` is returned instead.
    """
    ground, excited = _reduced_entries(traj, float(t))
    if traj.params.diagonal_metric:
        return Density2(np.diag([ground.real, excited.real]).astype(np.complex128))
    imag = float(max(abs(ground.imag), abs(excited.imag)))
    return ComplexSpectrumReport((complex(ground), complex(excited)), imag, imag > TAU_NORM)


def complex_spectrum_scan(traj: Trajectory, times) -> ComplexSpectrumReport:
    """Largest imaginary eigenvalue part of the reduced state over ``times``."""
    ground, excited = _reduced_entries(traj, np.asarray(times, dtype=float))
    imag = np.maximum(np.abs(np.imag(ground)), np.abs(np.imag(excited)))
    k = int(np.argmax(imag))
    worst = float(imag[k])
    return ComplexSpectrumReport((complex(ground[k]), complex(excited[k])), worst, worst > TAU_NORM)


def population_p(traj: Trajectory, t):
    """``|0_S>`` population of the reduced non-Hermitian state."""
    x = traj.params.x
    w2 = 2.0 * traj.omega * np.asarray(t)
    im = (np.conj(traj.A) * traj.B).imag
    return 0.5 + (0.5 - traj.alpha) * np.cos(w2) - x * np.sin(w2) * im


def population_p_direct(traj: Trajectory, t):
    """Same population computed as ``x (a1/a2) |B(t)|^2``."""
    _, Bt = evolve_amplitudes(traj, t)
    return traj.params.x * traj.params.ratio * np.abs(Bt) ** 2


def mean_p(traj: Trajectory) -> float:
    if not traj.params.diagonal_metric:
        raise ValueError("p(t) is a population only for the diagonal metric")
    return 0.5


def sqrt_eta_amplitudes(traj: Trajectory, t):
    """``(gamma(t), delta(t))``, the components of ``sqrt(eta) psi(t)`` without the global phase."""
    x, r = traj.params.x, traj.params.ratio
    At, Bt = evolve_amplitudes(traj, t)
    return math.sqrt(x / r) * At, math.sqrt(x * r) * Bt


def hermitian_state(traj: Trajectory, t):
    """``(A~(t), B~(t)) = W sqrt(eta) (A(t), B(t))``, global phase stripped."""
    w = traj.w
    x, r = traj.params.x, traj.params.ratio
    At, Bt = evolve_amplitudes(traj, t)
    k = math.sqrt(x / r)
    return k * (w.a * At + w.b * r * Bt), k * (w.c * At + w.d * r * Bt)


def transfer_matrix(traj: Trajectory) -> np.ndarray:
    """``T`` with ``(A~, B~) = T (A, B)``."""
    w = traj.w
    x, r = traj.params.x, traj.params.ratio
    return math.sqrt(x / r) * np.array([[w.a, w.b * r], [w.c, w.d * r]], dtype=np.complex128)


def rho_hW(traj: Trajectory, t: float) -> np.ndarray:
    """Hermitian-side density matrix ``|phi(t)><phi(t)|`` on (e_S, e_B), entrywise closed form."""
    a, b, c, d = traj.w.a, traj.w.b, traj.w.c, traj.w.d
    g, dl = sqrt_eta_amplitudes(traj, float(t))
    g2, d2 = abs(g) ** 2, abs(dl) ** 2
    gd = g * np.conj(dl)
    off = (
        a * np.conj(c) * g2
        + b * np.conj(c) * np.conj(g) * dl
        + a * np.conj(d) * gd
        + b * np.conj(d) * d2
    )
    return np.array(
        [[abs(a * g + b * dl) ** 2, off], [np.conj(off), abs(c * g + d * dl) ** 2]],
        dtype=np.complex128,
    )


def population_q(traj: Trajectory, t):
    """``|0_S>`` population of the reduced Hermitian state, expanded in ``cos/sin(2 omega t)``."""
    x = traj.params.x
    alpha = traj.alpha
    ab, cd = traj.ab, traj.cd
    c2 = abs(traj.w.c) ** 2
    w2 = 2.0 * traj.omega * np.asarray(t)
    cos_coef = (0.5 - alpha) * (1 - 2 * c2) - 2 * x * ab.imag * cd.imag
    sin_coef = (1 - 2 * alpha) * cd.imag + x * (1 - 2 * c2) * ab.imag
    return mean_q(traj) + cos_coef * np.cos(w2) + sin_coef * np.sin(w2)


def population_q_direct(traj: Trajectory, t):
    """Same population as ``x |c sqrt(a2/a1) A(t) + d sqrt(a1/a2) B(t)|^2``."""
    x, r = traj.params.x, traj.params.ratio
    At, Bt = evolve_amplitudes(traj, t)
    return x * np.abs(traj.w.c * At / math.sqrt(r) + traj.w.d * math.sqrt(r) * Bt) ** 2


def mean_q(traj: Trajectory) -> float:
    return 0.5 + 2.0 * traj.params.x * traj.ab.real * traj.cd.real


def is_generic(traj: Trajectory) -> tuple[bool, bool]:
    """``(A B* not real, c d* not real)``."""
    return bool(abs(traj.ab.imag) > TAU_GEN), bool(abs(traj.cd.imag) > TAU_GEN)


def period_doubling_expected(traj: Trajectory) -> bool:
    """``Re(A B*) Re(c d*) != 0``, the condition that shifts the mean of q off 1/2."""
    return bool(abs(traj.ab.real * traj.cd.real) > TAU_GEN)
