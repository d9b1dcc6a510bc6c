"""Entropy, period estimation, entanglement, time-averaged states and classifiers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .dynamics import (
    TAU_NORM,
    Trajectory,
    evolve_amplitudes,
    hermitian_state,
    mean_q,
    population_p,
    population_q,
    rho_hW,
    sqrt_eta_amplitudes,
    transfer_matrix,
)
from .linalg import TAU_EIG, herm_eig, max_norm, period_average, psd_sqrt
from .model import Metric2, Unitary2

TAU_PER = 1e-7
TAU_ENT = 1e-10
MIN_PERIOD_INTERVALS = 512


class OutOfRange(ValueError):
    pass


class InsufficientSamples(ValueError):
    pass


class PeriodNotFound(ValueError):
    pass


class ZeroState(ValueError):
    pass


class AlreadyProduct(ValueError):
    pass


class NotDiagonal(ValueError):
    pass


class Side(str, enum.Enum):
    NON_HERMITIAN = "non_hermitian"
    HERMITIAN = "hermitian"


class EntanglementClass(str, enum.Enum):
    ALWAYS_ENTANGLED = "always_entangled"
    PERIODIC_TOUCH = "periodic_touch"
    # the state stays a product state; only happens when psi(0) is an eigenvector of H1
    ALWAYS_PRODUCT = "always_product"


class WVariant(str, enum.Enum):
    EQUAL_STATES = "equal_states"
    EQUAL_ENTROPIES = "equal_entropies"
    GENERIC = "generic"


# --------------------------------------------------------------------------
# entropy and periods


def entropy(pop):
    """Binary von Neumann entropy in nats, with ``0 ln 0 = 0``.

    Populations within ``TAU_NORM`` outside ``[0, 1]`` are clamped; anything
    further out raises :class:`OutOfRange`.
    """
    q = np.asarray(pop, dtype=float)
    if np.any(q < -TAU_NORM) or np.any(q > 1 + TAU_NORM):
        raise OutOfRange(f"population outside [0, 1]: min {q.min()}, max {q.max()}")
    q = np.clip(q, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(q > 0, q * np.log(q), 0.0) - np.where(q < 1, (1 - q) * np.log1p(-q), 0.0)
    h = h + 0.0  # no negative zero at the endpoints
    return float(h) if h.ndim == 0 else h


@dataclass(frozen=True)
class EntropyCurve:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if np.any(self.values < -TAU_NORM) or np.any(self.values > math.log(2) + TAU_NORM):
            raise ValueError("entropy values outside [0, ln 2]")


def curve_from_population(times, populations) -> EntropyCurve:
    times = np.asarray(times, dtype=float)
    return EntropyCurve(times, entropy(np.asarray(populations, dtype=float)))


def entropy_curve(traj: Trajectory, side: Side | str = Side.NON_HERMITIAN, samples: int = 4097) -> EntropyCurve:
    """Entropy of the reduced state sampled uniformly over ``[0, 2 pi / omega]``.

    ``samples`` counts grid points including both endpoints; the window
    spans two periods of the population.
    """
    side = Side(side)
    if samples < 64:
        raise InsufficientSamples("entropy_curve needs at least 64 samples")
    times = np.linspace(0.0, 2.0 * math.pi / traj.omega, samples)
    pops = population_p(traj, times) if side is Side.NON_HERMITIAN else population_q(traj, times)
    return curve_from_population(times, pops)


@dataclass(frozen=True)
class PeriodEstimate:
    period: float
    stationary: bool
    residual: float

    def __post_init__(self):
        object.__setattr__(self, "period", float(self.period))
        object.__setattr__(self, "residual", float(self.residual))


def _shift_residual(values: np.ndarray, m: int) -> float:
    return float(np.max(np.abs(values[m:] - values[:-m])))


def _spline_residual(spline: CubicSpline, times: np.ndarray, period: float) -> float:
    inside = times[times + period <= times[-1]]
    return float(np.max(np.abs(spline(inside + period) - spline(inside))))


def _refine(spline, times, period, half_width, iters=60):
    # golden-section search of the shift residual; result kept only if it improves
    lo, hi = period - half_width, period + half_width
    gr = (math.sqrt(5) - 1) / 2
    c, d = hi - gr * (hi - lo), lo + gr * (hi - lo)
    fc, fd = _spline_residual(spline, times, c), _spline_residual(spline, times, d)
    for _ in range(iters):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - gr * (hi - lo)
            fc = _spline_residual(spline, times, c)
        else:
            lo, c, fc = c, d, fd
            d = lo + gr * (hi - lo)
            fd = _spline_residual(spline, times, d)
    best = 0.5 * (lo + hi)
    return best, _spline_residual(spline, times, best)


def estimate_period(curve: EntropyCurve, max_divisions: int = 64) -> PeriodEstimate:
    """Smallest period of a sampled, exactly periodic curve.

    Candidates ``window / k`` for ``k = max_divisions .. 2`` are tried from the
    shortest up; the first whose shift residual ``max |f(t + P) - f(t)|`` is
    within ``TAU_PER * range(f)`` wins. Candidates that land on the sample
    grid are tested by an exact index shift, others through a cubic spline,
    followed by a golden-section refinement of the residual. If no divisor
    of the window fits, local minima of the integer-shift residual are
    refined the same way. Constant
    curves come back flagged stationary with period 0.
    """
    t, f = curve.times, curve.values
    n = t.size
    if n - 1 < MIN_PERIOD_INTERVALS:
        raise InsufficientSamples(f"need at least {MIN_PERIOD_INTERVALS} intervals, got {n - 1}")
    span = float(np.ptp(f))
    if span <= TAU_PER:
        return PeriodEstimate(0.0, True, span)
    tol = TAU_PER * span
    window = t[-1] - t[0]
    dt = window / (n - 1)
    spline = None

    for k in range(max_divisions, 1, -1):
        period = window / k
        if (n - 1) % k == 0:
            res = _shift_residual(f, (n - 1) // k)
            if res <= tol:
                return PeriodEstimate(period, False, res)
            continue
        if spline is None:
            spline = CubicSpline(t, f)
        res = _spline_residual(spline, t, period)
        if res <= tol:
            refined, rres = _refine(spline, t, period, 0.5 * dt)
            if rres < res:
                period, res = refined, rres
            return PeriodEstimate(period, False, res)

    # off-grid periods: refine every local minimum of the integer-shift residual
    spline = spline or CubicSpline(t, f)
    shifts = np.array([_shift_residual(f, m) for m in range(1, (n - 1) // 2 + 1)])
    slope = float(np.max(np.abs(np.diff(f))))
    for i, res in enumerate(shifts):
        if i == 0:
            continue
        left = shifts[i - 1]
        right = shifts[i + 1] if i + 1 < shifts.size else np.inf
        if res > left or res > right or res > 2 * slope + tol:
            continue
        period, res = _refine(spline, t, (i + 1) * dt, dt)
        if res <= tol:
            return PeriodEstimate(period, False, res)
    raise PeriodNotFound("no period found within half of the sampling window")


def count_local_minima(curve: EntropyCurve, start: float, stop: float) -> int:
    """Local minima of the sampled curve in ``[start, stop)``, endpoints included once."""
    t, f = curve.times, curve.values
    n = f.size
    hits = 0
    for i in range(n):
        if not start <= t[i] < stop:
            continue
        left = f[i - 1] if i > 0 else f[i + 1]
        right = f[i + 1] if i < n - 1 else f[i - 1]
        if f[i] <= left and f[i] <= right and (f[i] < left or f[i] < right):
            hits += 1
    return hits


# --------------------------------------------------------------------------
# entanglement of pure states in H1


def is_disentangled(A: complex, B: complex) -> bool:
    """Product-state test for ``A e_S + B e_B``: true iff ``A B = 0``."""
    norm = abs(A) ** 2 + abs(B) ** 2
    if norm == 0:
        raise ZeroState("the zero vector is neither entangled nor a product state")
    return abs(A * B) <= TAU_ENT * norm


def _zero_times(u: complex, v: complex, omega: float, horizon: float) -> np.ndarray | None:
    """Times in ``[0, horizon]`` where ``u cos(omega t) + v sin(omega t)`` vanishes.

    Returns ``None`` when the combination vanishes identically.
    """
    scale = abs(u) ** 2 + abs(v) ** 2
    if scale <= TAU_ENT**2:
        return None
    # a real (cos, sin) direction exists only when u and v are real-proportional
    if abs((u * np.conj(v)).imag) > TAU_ENT * scale:
        return np.empty(0)
    if abs(v) >= abs(u):
        theta = math.atan(-(u / v).real)
    else:
        theta = math.atan2(1.0, -(v / u).real)  # cot(theta) = -v/u
    theta %= math.pi
    k_max = math.floor((omega * horizon - theta) / math.pi + 1e-12)
    return (theta + math.pi * np.arange(0, k_max + 1)) / omega


@dataclass(frozen=True)
class DisentanglementTimes:
    """Product-state instants of the evolving pure state.

    ``first_zero`` lists times where the e_S amplitude vanishes (the state is
    proportional to e_B), ``second_zero`` those where the e_B amplitude
    vanishes. ``times`` is their sorted union.
    """

    times: np.ndarray
    first_zero: np.ndarray
    second_zero: np.ndarray
    classification: EntanglementClass


def _amplitude_functionals(traj: Trajectory, side: Side) -> list[np.ndarray]:
    if side is Side.NON_HERMITIAN:
        return [np.array([1, 0], dtype=np.complex128), np.array([0, 1], dtype=np.complex128)]
    t_mat = transfer_matrix(traj)
    return [t_mat[0], t_mat[1]]


def disentanglement_times(traj: Trajectory, side: Side | str = Side.NON_HERMITIAN, horizon: float | None = None) -> DisentanglementTimes:
    """Solve ``A(t) = 0`` and ``B(t) = 0`` (or their Hermitian-side images) in closed form.

    Each amplitude is ``u cos(omega t) + v sin(omega t)``; it has zeros only when
    ``u/v`` is real, in which case ``tan(omega t) = -u/v``.
    """
    side = Side(side)
    if horizon is None:
        horizon = 2.0 * math.pi / traj.omega
    r = traj.params.ratio
    A, B = traj.A, traj.B
    # (A(t), B(t)) = (A, B) cos + (-i r B, -i A / r) sin
    base_u = np.array([A, B])
    base_v = np.array([-1j * r * B, -1j * A / r])
    zeros = []
    identically_zero = False
    for ell in _amplitude_functionals(traj, side):
        z = _zero_times(complex(ell @ base_u), complex(ell @ base_v), traj.omega, horizon)
        if z is None:
            identically_zero = True
            z = np.empty(0)
        zeros.append(z)
    union = np.unique(np.concatenate(zeros))
    if identically_zero:
        cls = EntanglementClass.ALWAYS_PRODUCT
    elif union.size == 0:
        cls = EntanglementClass.ALWAYS_ENTANGLED
    else:
        cls = EntanglementClass.PERIODIC_TOUCH
    return DisentanglementTimes(union, zeros[0], zeros[1], cls)


def side_amplitudes(traj: Trajectory, side: Side | str, t):
    side = Side(side)
    if side is Side.NON_HERMITIAN:
        return evolve_amplitudes(traj, t)
    return hermitian_state(traj, t)


def disentangling_W(traj: Trajectory) -> Unitary2:
    """A unitary sending ``sqrt(eta) psi`` to a product state (a multiple of e_B).

    Its moduli are ``|a| = |d| = sqrt(x a1/a2) |B|`` and
    ``|b| = |c| = sqrt(x a2/a1) |A|``.
    """
    if is_disentangled(traj.A, traj.B):
        raise AlreadyProduct("the initial state is already a product state")
    g, d = sqrt_eta_amplitudes(traj, 0.0)
    g, d = complex(g), complex(d)
    n = math.sqrt(abs(g) ** 2 + abs(d) ** 2)
    g, d = g / n, d / n
    return Unitary2(d, -g, np.conj(g), np.conj(d))


# --------------------------------------------------------------------------
# time-averaged Hermitian state and concurrence

# two-qubit basis |00>, |01>, |10>, |11>; e_S = |10>, e_B = |01>
_EMBED_INDEX = (2, 1)
_SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def embed_two_qubit(m2) -> np.ndarray:
    """Place a 2x2 operator on (e_S, e_B) into the 4x4 two-qubit space."""
    m2 = np.asarray(m2, dtype=np.complex128)
    out = np.zeros((4, 4), dtype=np.complex128)
    for i, ii in enumerate(_EMBED_INDEX):
        for j, jj in enumerate(_EMBED_INDEX):
            out[ii, jj] = m2[i, j]
    return out


def partial_trace_bath(rho4) -> np.ndarray:
    """Trace out the second qubit; result on ``(|0_S>, |1_S>)``."""
    return np.einsum("ijkj->ik", np.asarray(rho4).reshape(2, 2, 2, 2))


def wootters_concurrence(rho4) -> float:
    """Concurrence of a two-qubit density matrix.

    Uses the square roots of the eigenvalues of the Hermitian matrix
    ``sqrt(rho) rho~ sqrt(rho)`` with ``rho~ = (Y x Y) rho* (Y x Y)``.
    """
    rho4 = np.asarray(rho4, dtype=np.complex128)
    root = psd_sqrt(rho4)
    tilde = _SIGMA_YY @ np.conj(rho4) @ _SIGMA_YY
    mid = root @ tilde @ root
    evals, _ = herm_eig(0.5 * (mid + np.conj(mid).T))
    lam = np.sort(np.sqrt(np.clip(evals, 0.0, None)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class AveragedState:
    """Period average of ``|phi(t)><phi(t)|``: ``[[1 - q0, z], [z*, q0]]`` on (e_S, e_B)."""

    q0: float
    z: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1 - self.q0, self.z], [np.conj(self.z), self.q0]], dtype=np.complex128)

    @property
    def embedded(self) -> np.ndarray:
        return embed_two_qubit(self.matrix)


def averaged_state(traj: Trajectory) -> AveragedState:
    w = traj.w
    z = (w.b * np.conj(w.c) + w.a * np.conj(w.d)) * traj.params.x * traj.ab.real
    return AveragedState(mean_q(traj), complex(z))


def averaged_state_quadrature(traj: Trajectory, panels: int = 2048) -> np.ndarray:
    """Simpson average of ``rho_hW(t)`` over one period, the oracle for :func:`averaged_state`."""

    def stack(ts):
        return np.array([rho_hW(traj, t) for t in ts])

    return period_average(stack, traj.population_period, panels)


def concurrence(avg: AveragedState) -> float:
    """Concurrence of the averaged state in closed form, ``2 |z|``.

    The state lives on ``span{|01>, |10>}`` with empty ``|00>`` and ``|11>``
    populations, so only the coherence contributes.
    """
    return 2.0 * abs(avg.z)


def eigenvalue_splitting(avg: AveragedState) -> float:
    """``lambda_+ - lambda_-`` of the averaged state; equals ``2 x |Re(A B*)|`` for every W."""
    return math.sqrt((2 * avg.q0 - 1) ** 2 + 4 * abs(avg.z) ** 2)


def footnote_shortcut(avg: AveragedState) -> float:
    """Difference of the two non-zero eigenvalues of ``<rho>^2``."""
    evals, _ = herm_eig(avg.matrix @ avg.matrix)
    return float(evals[1] - evals[0])


# --------------------------------------------------------------------------
# classifiers


@dataclass(frozen=True)
class WEquivalenceClass:
    variant: WVariant
    phases: tuple[float, float] | None = None


def classify_W(w: Unitary2) -> WEquivalenceClass:
    """Which unitaries keep the reduced state, or at least its entropy, unchanged."""
    if abs(w.b) <= TAU_EIG and abs(w.c) <= TAU_EIG:
        return WEquivalenceClass(WVariant.EQUAL_STATES, (float(np.angle(w.a)), float(np.angle(w.d))))
    if abs(w.a) <= TAU_EIG and abs(w.d) <= TAU_EIG:
        return WEquivalenceClass(WVariant.EQUAL_ENTROPIES, (float(np.angle(w.b)), float(np.angle(w.c))))
    return WEquivalenceClass(WVariant.GENERIC)


def max_entropy_gap(traj: Trajectory, samples: int = 2049) -> float:
    """``max_t |E(p(t)) - E(q(t))|`` over one population period."""
    ts = np.linspace(0.0, traj.population_period, samples)
    return float(np.max(np.abs(entropy(population_p(traj, ts)) - entropy(population_q(traj, ts)))))


def is_product_metric(eta: Metric2 | np.ndarray) -> bool:
    m = eta.matrix if isinstance(eta, Metric2) else np.asarray(eta)
    return abs(m[0, 1]) <= TAU_EIG and abs(m[1, 0]) <= TAU_EIG


@dataclass(frozen=True)
class MetricFactorization:
    """``Lambda_S`` on (|0_S>, |1_S>) and ``Lambda_B`` on (|0_B>, |1_B>)."""

    lambda_s: np.ndarray
    lambda_b: np.ndarray
    leakage: float
    restriction_error: float

    @property
    def product(self) -> np.ndarray:
        return np.kron(self.lambda_s, self.lambda_b)


def factor_metric(eta: Metric2 | np.ndarray) -> MetricFactorization:
    """Product-metric witness for a diagonal metric on H1.

    With e_S = |1_S 0_B> and e_B = |0_S 1_B>, taking ``Lambda_S = 1`` and
    ``Lambda_B = diag(eta_SS, eta_BB)`` reproduces ``eta`` on H1.
    """
    m = eta.matrix if isinstance(eta, Metric2) else np.asarray(eta, dtype=np.complex128)
    if not is_product_metric(m):
        raise NotDiagonal("only a diagonal metric factors into a product")
    lam_s = np.eye(2, dtype=np.complex128)
    lam_b = np.diag([m[0, 0].real, m[1, 1].real]).astype(np.complex128)
    prod = np.kron(lam_s, lam_b)
    inside = list(_EMBED_INDEX)
    outside = [k for k in range(4) if k not in inside]
    leakage = max_norm(prod[np.ix_(outside, inside)])
    restricted = prod[np.ix_(inside, inside)]
    return MetricFactorization(lam_s, lam_b, leakage, max_norm(restricted - m))
