"""Time-dependent Dyson maps: the metric flow, ``S(t)`` and the induced ``h(t)``.

This is a verification module. It shows numerically that for a fixed
quasi-Hermitian ``H1`` any Hermitian ``h(t)``, including ``h = 0``, comes
out of the time-dependent Dyson equation for a suitable unitary path
``W(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linalg import TAU_HERM, adjoint, expm_oracle, herm_eig, inv2, is_hermitian, max_norm, psd_sqrt
from .model import ModelParams, build_h1

H_FD = 1e-5
TAU_FD = 1e-6
TAU_ODE = 1e-8
H_ODE = 1e-3


class NonHermitianGenerator(ValueError):
    pass


class NotPositive(ValueError):
    pass


@dataclass(frozen=True)
class MetricFlow:
    eta0: np.ndarray
    params: ModelParams

    def __post_init__(self):
        eta0 = np.asarray(self.eta0, dtype=np.complex128)
        object.__setattr__(self, "eta0", eta0)
        evals, _ = herm_eig(eta0)
        if evals[0] <= 0:
            raise NotPositive(f"eta(0) has eigenvalue {evals[0]:.3e}")

    @property
    def h1(self) -> np.ndarray:
        return build_h1(self.params)


def eta_t(flow: MetricFlow, t: float) -> np.ndarray:
    """``exp(-i t H^dag) eta(0) exp(i t H)``."""
    h = flow.h1
    return expm_oracle(adjoint(h), t) @ flow.eta0 @ expm_oracle(h, -t)


def flow_residual(flow: MetricFlow, t: float, step: float = H_FD) -> float:
    """``|i d/dt eta - (H^dag eta - eta H)|_max`` with a central difference."""
    h = flow.h1
    deriv = (eta_t(flow, t + step) - eta_t(flow, t - step)) / (2 * step)
    eta = eta_t(flow, t)
    return max_norm(1j * deriv - (adjoint(h) @ eta - eta @ h))


def min_eigenvalue(flow: MetricFlow, times) -> float:
    """Smallest eigenvalue of ``eta(t)`` over the sampled times."""
    worst = math.inf
    for t in np.asarray(times, dtype=float):
        e = eta_t(flow, t)
        vals, _ = herm_eig(0.5 * (e + adjoint(e)), tol=1e-8 * max(1.0, max_norm(e)))
        worst = min(worst, float(vals[0]))
    return worst


def _project_unitary(w: np.ndarray) -> np.ndarray:
    # polar factor W (W^dag W)^(-1/2)
    return w @ inv2(psd_sqrt(adjoint(w) @ w))


def _rk4_step(generator, t: float, w: np.ndarray, h: float) -> np.ndarray:
    def rhs(s, m):
        a = np.asarray(generator(s), dtype=np.complex128)
        if not is_hermitian(a, TAU_HERM):
            raise NonHermitianGenerator(f"A({s}) is not Hermitian")
        return -1j * a @ m

    k1 = rhs(t, w)
    k2 = rhs(t + h / 2, w + h / 2 * k1)
    k3 = rhs(t + h / 2, w + h / 2 * k2)
    k4 = rhs(t + h, w + h * k3)
    return _project_unitary(w + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4))


@dataclass(frozen=True)
class UnitaryPath:
    """A unitary family ``W(t)``, either closed form or integrated on a grid.

    Call the path with a time to get ``W(t)``. Grid paths return stored
    values at grid points; between them a single RK4 sub-step is taken from
    the grid point below.
    """

    func: Callable[[float], np.ndarray] | None = None
    generator: Callable[[float], np.ndarray] | None = None
    times: np.ndarray | None = None
    values: np.ndarray | None = None
    h_ode: float | None = None
    target: Callable[[float], np.ndarray] | None = field(default=None, compare=False)

    def __call__(self, t: float) -> np.ndarray:
        if self.func is not None:
            return self.func(t)
        h = self.h_ode
        k = int(min(max(math.floor(t / h + 1e-9), 0), len(self.times) - 1))
        base = self.times[k]
        if abs(t - base) <= 1e-14 * max(1.0, abs(t)):
            return self.values[k]
        if t > self.times[-1] + h:
            raise ValueError(f"t = {t} is beyond the integrated range {self.times[-1]}")
        return _rk4_step(self.generator, base, self.values[k], t - base)

    @classmethod
    def constant(cls, w=None) -> "UnitaryPath":
        w = np.eye(2, dtype=np.complex128) if w is None else np.asarray(w, dtype=np.complex128)
        zero = np.zeros((2, 2), dtype=np.complex128)
        return cls(func=lambda t: w, target=lambda t: zero)

    @classmethod
    def exponential(cls, a) -> "UnitaryPath":
        """``W(t) = exp(-i t A)`` for a constant Hermitian ``A``."""
        a = np.asarray(a, dtype=np.complex128)
        if not is_hermitian(a):
            raise NonHermitianGenerator("A must be Hermitian")
        return cls(func=lambda t: expm_oracle(a, t), target=lambda t: a)


def solve_w_ode(generator: Callable[[float], np.ndarray], t_end: float, h_ode: float = H_ODE) -> UnitaryPath:
    """Integrate ``i dW/dt = A(t) W`` from ``W(0) = 1`` with classical RK4.

    Every step is re-projected onto the unitary group through the polar
    decomposition. The number of steps is ``ceil(t_end / h_ode)`` with the
    step shortened to land exactly on ``t_end``.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    n = max(1, math.ceil(t_end / h_ode - 1e-9))
    h = t_end / n
    times = np.linspace(0.0, t_end, n + 1)
    values = np.empty((n + 1, 2, 2), dtype=np.complex128)
    values[0] = np.eye(2)
    for k in range(n):
        values[k + 1] = _rk4_step(generator, times[k], values[k], h)
    return UnitaryPath(generator=generator, times=times, values=values, h_ode=h, target=generator)


def reference_w(generator: Callable[[float], np.ndarray], t_end: float) -> np.ndarray:
    """High-accuracy ``W(t_end)`` from an adaptive DOP853 integration."""
    from scipy.integrate import solve_ivp

    def rhs(t, y):
        return (-1j * np.asarray(generator(t)) @ y.reshape(2, 2)).ravel()

    sol = solve_ivp(rhs, (0.0, t_end), np.eye(2, dtype=np.complex128).ravel(),
                    method="DOP853", rtol=1e-13, atol=1e-14)
    return sol.y[:, -1].reshape(2, 2)


def step_halving_ratio(generator: Callable[[float], np.ndarray], t_end: float, h: float,
                       reference: np.ndarray | None = None) -> float:
    """``err(h) / err(h/2)`` for the RK4 integrator; near 16 for a fourth-order method."""
    if reference is None:
        reference = reference_w(generator, t_end)
    errs = [max_norm(solve_w_ode(generator, t_end, s).values[-1] - reference) for s in (h, h / 2)]
    return errs[0] / errs[1]


def s_of_t(flow: MetricFlow, path: UnitaryPath, t: float) -> np.ndarray:
    """``S(t) = W(t) sqrt(eta(0)) exp(i t H)``."""
    return path(t) @ psd_sqrt(flow.eta0) @ expm_oracle(flow.h1, -t)


def h_of_t(flow: MetricFlow, path: UnitaryPath, t: float, step: float = H_FD) -> np.ndarray:
    """``S H S^-1 + i dS/dt S^-1`` with ``dS/dt`` by central difference."""
    s = s_of_t(flow, path, t)
    s_inv = inv2(s)
    ds = (s_of_t(flow, path, t + step) - s_of_t(flow, path, t - step)) / (2 * step)
    return s @ flow.h1 @ s_inv + 1j * ds @ s_inv


def h_from_w(path: UnitaryPath, t: float, step: float = H_FD) -> np.ndarray:
    """``i dW/dt W^dag`` by central difference."""
    dw = (path(t + step) - path(t - step)) / (2 * step)
    return 1j * dw @ adjoint(path(t))


def round_trip_error(flow: MetricFlow, path: UnitaryPath, psi0, t_end: float, h_step: float = 1e-2) -> float:
    """Solve ``i dphi/dt = h(t) phi`` with RK4, map back by ``S(t)^-1`` and compare.

    The reference is ``exp(-i t H1) psi(0)``; the largest deviation over the
    step grid is returned.
    """
    psi0 = np.asarray(psi0, dtype=np.complex128)
    n = max(1, math.ceil(t_end / h_step - 1e-9))
    step = t_end / n
    phi = s_of_t(flow, path, 0.0) @ psi0
    h1 = flow.h1
    worst = 0.0

    def rhs(t, v):
        return -1j * h_of_t(flow, path, t) @ v

    for k in range(n):
        t = k * step
        k1 = rhs(t, phi)
        k2 = rhs(t + step / 2, phi + step / 2 * k1)
        k3 = rhs(t + step / 2, phi + step / 2 * k2)
        k4 = rhs(t + step, phi + step * k3)
        phi = phi + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        back = inv2(s_of_t(flow, path, t + step)) @ phi
        worst = max(worst, max_norm(back - expm_oracle(h1, t + step) @ psi0))
    return worst


@dataclass(frozen=True)
class DysonDemoReport:
    choice: str
    t_end: float
    max_deviation: float
    max_hermiticity_defect: float
    max_w_route_gap: float
    samples: int


DEMO_A0 = np.array([[1.0, 0.5 - 0.25j], [0.5 + 0.25j, -0.5]], dtype=np.complex128)
DEMO_A1 = np.array([[0.3, 0.2j], [-0.2j, 0.7]], dtype=np.complex128)


def demo_generator(t: float) -> np.ndarray:
    """``A(t) = A0 + A1 cos t``, the time-dependent target used by the demo."""
    return DEMO_A0 + DEMO_A1 * math.cos(t)


def dyson_demo(choice: str, t_end: float = 2.0, params: ModelParams | None = None,
               samples: int = 41, h_ode: float = H_ODE) -> DysonDemoReport:
    """Reconstruct ``h(t)`` from ``S(t)`` and compare it with the intended target.

    ``h_zero``: ``eta(0) = 1`` and ``W = 1``, i.e. ``S(t) = exp(i t H)``.
    ``constant_A``: ``W(t) = exp(-i t A)`` with ``A = diag(1, 2)``.
    ``time_dep_A``: ``W(t)`` integrated from ``A(t) = A0 + A1 cos t``.
    """
    if params is None:
        params = ModelParams(nu=1.0, g=1.0, kappa=0.6)
    flow = MetricFlow(np.eye(2), params)
    if choice == "h_zero":
        path = UnitaryPath.constant()
    elif choice == "constant_A":
        path = UnitaryPath.exponential(np.diag([1.0, 2.0]))
    elif choice == "time_dep_A":
        path = solve_w_ode(demo_generator, t_end + 2 * h_ode, h_ode)
    else:
        raise ValueError(f"unknown demo choice {choice!r}")
    dev = herm = gap = 0.0
    for t in np.linspace(0.0, t_end, samples):
        h = h_of_t(flow, path, float(t))
        dev = max(dev, max_norm(h - path.target(float(t))))
        herm = max(herm, max_norm(h - adjoint(h)))
        gap = max(gap, max_norm(h - h_from_w(path, float(t))))
    return DysonDemoReport(choice, t_end, dev, herm, gap, samples)
