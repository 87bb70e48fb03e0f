"""Counterexample families: singular radial profiles, entire non-bubble
solutions of a one-variable ODE, and sequences with exploding gradients.

The ODE ``v'' + ((gamma - 1)/2) v'^2 + exp(2v) = 0`` is integrated in the
variables ``(v, w = v')``.  With ``phi = exp(v)`` and ``delta = (1 - gamma)/2``
the pair ``(phi, w)`` solves ``phi' = phi w``, ``w' = -phi^2 + delta w^2`` and
conserves

    I = phi^(2 - 2 delta) / (1 - delta) + phi^(-2 delta) w^2     (delta != 1)
    I = 2 log(phi) + phi^(-2) w^2                                 (delta == 1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
import numpy as np

from . import conformal
from .cone import ConeSpec, EigenTuple, GammaK
from .numerics import NumericalError, Trajectory, rk45
from .radial import RadialProfile, log_linear, power_log
from .symfun import SymFun, g_p, maxform_f0, maxform_symfun


# ---------------------------------------------------------------------------
# singular radial profiles
# ---------------------------------------------------------------------------

class SingularKind(str, Enum):
    LOG_POSITIVE = "log-positive"        # alpha log r, alpha > 0
    POWER_MINUS = "power-minus"          # 2/(mu-1) log(1 - r^(1-mu)), 0 <= mu < 1
    LOG_NEGATIVE = "log-negative"        # alpha log r, -2 < alpha < 0
    POWER_PLUS = "power-plus"            # 2/(mu-1) log(1 + r^(1-mu)), 0 <= mu < 1
    POWER_SHIFTED = "power-shifted"      # 2/(mu-1) log(1 + exp((mu-1)a/2) r^(1-mu)), mu > 1


@dataclass(frozen=True)
class SingularProfile:
    """A radial profile with ``lambda(A[v]) = C(r) * direction`` and ``C(r) > 0``.

    ``direction`` lists the radial entry first, then the repeated tangential
    entry, exactly as the pattern ``(d1, d2, ..., d2)``.  ``sign`` is the
    factor in ``C(r) = sign * exp(-2v) v' (v + 2 log r)' / 2``.
    """

    kind: SingularKind
    profile: RadialProfile
    direction: tuple[float, float]
    sign: float
    params: dict = field(default_factory=dict)

    def coefficient(self, r: float) -> float:
        p = self.profile
        return self.sign * 0.5 * math.exp(-2.0 * p.v(r)) * p.dv(r) * p.shifted_dv(r)

    def pattern(self, n: int) -> np.ndarray:
        return np.array([self.direction[0]] + [self.direction[1]] * (n - 1))

    def pattern_residual(self, r: float, n: int) -> float:
        """``|lambda(A[v]) - C(r) * pattern|`` relative to ``|lambda(A[v])|`` (unsorted, radial entry first)."""
        big_v, nu = self.profile.components(r)
        scale = math.exp(-2.0 * self.profile.v(r))
        lam = scale * np.array([big_v] + [nu] * (n - 1))
        diff = lam - self.coefficient(r) * self.pattern(n)
        return float(np.linalg.norm(diff) / max(np.linalg.norm(lam), 1e-300))


def singular_profile(kind: SingularKind | str, alpha: float | None = None, mu: float | None = None,
                     a: float = 0.0) -> SingularProfile:
    kind = SingularKind(kind)
    if kind in (SingularKind.LOG_POSITIVE, SingularKind.LOG_NEGATIVE):
        if alpha is None:
            raise ValueError(f"{kind.value} needs alpha")
        if kind is SingularKind.LOG_POSITIVE and not alpha > 0:
            raise ValueError("log-positive profile needs alpha > 0")
        if kind is SingularKind.LOG_NEGATIVE and not -2 < alpha < 0:
            raise ValueError("log-negative profile needs -2 < alpha < 0")
        if kind is SingularKind.LOG_POSITIVE:
            return SingularProfile(kind, log_linear(0.0, alpha), (1.0, -1.0), 1.0, {"alpha": alpha})
        return SingularProfile(kind, log_linear(0.0, alpha), (-1.0, 1.0), -1.0, {"alpha": alpha})
    if mu is None:
        raise ValueError(f"{kind.value} needs mu")
    if kind is SingularKind.POWER_SHIFTED:
        if not mu > 1:
            raise ValueError("power-shifted profile needs mu > 1")
        prof = power_log(mu, math.exp(0.5 * (mu - 1.0) * a), 1.0)
        return SingularProfile(kind, prof, (-mu, 1.0), -1.0, {"mu": mu, "a": a})
    if not 0 <= mu < 1:
        raise ValueError(f"{kind.value} profile needs 0 <= mu < 1")
    if kind is SingularKind.POWER_MINUS:
        return SingularProfile(kind, power_log(mu, -1.0, 1.0), (mu, -1.0), 1.0, {"mu": mu})
    return SingularProfile(kind, power_log(mu, 1.0, 1.0), (-mu, 1.0), -1.0, {"mu": mu})


# ---------------------------------------------------------------------------
# the one-variable ODE
# ---------------------------------------------------------------------------

class Existence(str, Enum):
    GLOBAL = "Global"
    FINITE_TIME = "FiniteTime"


@dataclass(frozen=True)
class OdeSetup:
    gamma: float
    v0: float
    w0: float

    def __post_init__(self) -> None:
        for name in ("gamma", "v0", "w0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def delta(self) -> float:
        return -(self.gamma - 1.0) / 2.0

    @property
    def phi0(self) -> float:
        return math.exp(self.v0)


def existence_predicate(s: OdeSetup) -> Existence:
    """Whether the solution with ``v(0) = v0, v'(0) = w0`` exists on the whole line."""
    g = s.gamma
    if -1.0 <= g <= 1.0:
        return Existence.GLOBAL
    if g < -1.0:
        if s.w0 == 0.0:
            return Existence.GLOBAL
        if -1.0 - 2.0 * math.exp(2.0 * s.v0) / (s.w0 * s.w0) < g:
            return Existence.GLOBAL
    return Existence.FINITE_TIME


def first_integral(delta: float, v: float, w: float) -> float:
    """Conserved quantity in terms of ``v = log(phi)`` and ``w``."""
    if delta == 1.0:
        return 2.0 * v + math.exp(-2.0 * v) * w * w
    return math.exp((2.0 - 2.0 * delta) * v) / (1.0 - delta) + math.exp(-2.0 * delta * v) * w * w


@dataclass(frozen=True)
class Outcome:
    kind: str                 # "GlobalOnWindow" or "BlowupDetected"
    blowup_time: float | None = None
    event_time: float | None = None


@dataclass(frozen=True)
class OdeTrajectory:
    setup: OdeSetup
    times: np.ndarray
    v: np.ndarray
    w: np.ndarray
    integral: np.ndarray
    forward: Outcome
    backward: Outcome
    forward_run: Trajectory = field(repr=False)
    backward_run: Trajectory = field(repr=False)

    @property
    def phi(self) -> np.ndarray:
        return np.exp(self.v)

    @property
    def drift(self) -> float:
        i0 = first_integral(self.setup.delta, self.setup.v0, self.setup.w0)
        return float(np.max(np.abs(self.integral - i0)))

    @property
    def drift_tolerance(self) -> float:
        i0 = first_integral(self.setup.delta, self.setup.v0, self.setup.w0)
        return 1e-6 * (1.0 + abs(i0))

    @property
    def verdict(self) -> Existence:
        blown = "BlowupDetected" in (self.forward.kind, self.backward.kind)
        return Existence.FINITE_TIME if blown else Existence.GLOBAL

    def state(self, t: float) -> tuple[float, float]:
        """Dense-output ``(v, w)`` at time ``t``."""
        run = self.forward_run if t >= 0 else self.backward_run
        y = run.sol(t)
        return float(y[0]), float(y[1])


def _outcome(run: Trajectory, delta: float) -> Outcome:
    if run.status != "event":
        return Outcome("GlobalOnWindow")
    te = float(run.event_time)
    we = float(run.event_state[1])
    # near blow-up w' ~ delta w^2, so w ~ w_e / (1 - delta w_e (t - t_e))
    est = te
    if delta != 0.0 and we != 0.0:
        shift = 1.0 / (delta * we)
        if (shift > 0) == (run.t[-1] >= run.t[0]):
            est = te + shift
    return Outcome("BlowupDetected", est, te)


def integrate_ode(s: OdeSetup, window: float = 50.0, threshold: float = 1e8,
                  rtol: float | None = None, atol: float | None = None) -> OdeTrajectory:
    """Integrate forward and backward from 0 over ``[-window, window]``.

    Stops a direction once ``exp(v) + |w|`` exceeds ``threshold``.
    """
    if not window > 0:
        raise ValueError("window must be positive")
    if not threshold >= 1e6:
        raise ValueError("threshold must be at least 1e6")
    k = (s.gamma - 1.0) / 2.0
    log_m = math.log(threshold)

    def rhs(_t, y):
        v, w = y
        return (w, -k * w * w - math.exp(2.0 * v))

    def event(_t, y):
        v, w = y
        if w == 0.0:
            return v - log_m
        lw = math.log(abs(w))
        hi, lo = (v, lw) if v >= lw else (lw, v)
        return hi + math.log1p(math.exp(lo - hi)) - log_m

    runs = []
    for end in (window, -window):
        try:
            runs.append(rk45(rhs, 0.0, end, (s.v0, s.w0), rtol=rtol, atol=atol, event=event))
        except NumericalError as exc:
            raise NumericalError(f"ODE integration failed towards t={end:g} for {s}: {exc}") from exc
    fwd, bwd = runs
    t = np.concatenate([bwd.t[::-1], fwd.t[1:]])
    y = np.concatenate([bwd.y[::-1], fwd.y[1:]])
    if fwd.status == "event":
        t = np.append(t, fwd.event_time)
        y = np.vstack([y, fwd.event_state])
    if bwd.status == "event":
        t = np.insert(t, 0, bwd.event_time)
        y = np.vstack([bwd.event_state, y])
    integral = np.array([first_integral(s.delta, vv, ww) for vv, ww in y])
    return OdeTrajectory(s, t, y[:, 0], y[:, 1], integral, _outcome(fwd, s.delta), _outcome(bwd, s.delta), fwd, bwd)


# ---------------------------------------------------------------------------
# entire non-bubble solutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NonBubble:
    s: float
    n: int
    f0: SymFun
    field: conformal.ScalarField
    trajectory: OdeTrajectory = field(repr=False)
    window: tuple[float, float] = (-3.0, 3.0)

    def derivatives(self, x1: float) -> tuple[float, float, float]:
        """``(v, v', v'')`` with ``v''`` from a central difference of the dense ``v'``."""
        v, w = self.trajectory.state(x1)
        h = 1e-3
        wp = self.trajectory.state(x1 + h)[1]
        wm = self.trajectory.state(x1 - h)[1]
        wp2 = self.trajectory.state(x1 + 2 * h)[1]
        wm2 = self.trajectory.state(x1 - 2 * h)[1]
        d2 = (8.0 * (wp - wm) - (wp2 - wm2)) / (12.0 * h)
        return v, w, d2

    def eigenvalues(self, x1: float) -> EigenTuple:
        return conformal.onedim_eigenvalues(self.n, *self.derivatives(x1))

    def theta(self, x1: float) -> float:
        v, w = self.trajectory.state(x1)
        return 0.5 * w * w * math.exp(-2.0 * v)

    def residual(self, x1: float) -> float:
        return abs(maxform_f0(self.s, self.eigenvalues(x1)) - 1.0)

    def traceless_norm(self, x1: float) -> float:
        """``|A - tr(A)/n I|_F``: a lower bound for the distance of ``A[v](x)`` to every ``cI``."""
        lam = self.eigenvalues(x1).values
        return float(np.linalg.norm(lam - lam.mean()))


def nonbubble_entire(s: float, n: int, v0: float = 0.0, w0: float = 0.0,
                     window: tuple[float, float] = (-3.0, 3.0)) -> NonBubble:
    """One-variable entire solution of ``f0(lambda(A[v])) = 1`` for the max-form ``f0``."""
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    if n < 2:
        raise ValueError("n must be >= 2")
    setup = OdeSetup(s, v0, w0)
    reach = max(abs(window[0]), abs(window[1])) + 0.1
    traj = integrate_ode(setup, window=reach, threshold=1e8)
    if traj.verdict is not Existence.GLOBAL:
        raise NumericalError("ODE solution left the window before reaching it")
    k = (s - 1.0) / 2.0

    def v(x):
        return traj.state(x)[0]

    def dv(x):
        return traj.state(x)[1]

    def d2v(x):
        vv, ww = traj.state(x)
        return -k * ww * ww - math.exp(2.0 * vv)

    fld = conformal.onedim(n, v, dv, d2v, (-reach, reach), description=f"entire one-variable solution, s={s:g}")
    return NonBubble(s, n, maxform_symfun(n, s), fld, traj, window)


# ---------------------------------------------------------------------------
# gradient blow-up sequences
# ---------------------------------------------------------------------------

class BlowupKind(str, Enum):
    NEG_SIGMA_HALF = "neg-sigma-half"
    NEG_GENERAL = "neg-general"
    POS_GENERAL = "pos-general"


def c_n(n: int) -> float:
    """``n^2 2^(1 - n/2) binom(n-1, n/2 - 1)``."""
    if n % 2:
        raise ValueError("n must be even")
    return n * n * 2.0 ** (1 - n // 2) * math.comb(n - 1, n // 2 - 1)


def c_schedule(j: int) -> float:
    """``C_j = max(5/j, 20/log j)``: at least ``5/j``, tends to 0, and ``exp(8/C_j)/j -> 0``."""
    if j < 2:
        raise ValueError("j must be >= 2")
    return max(5.0 / j, 20.0 / math.log(j))


@dataclass(frozen=True)
class BlowupReport:
    checks: dict[str, bool]
    values: dict[str, float]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


@dataclass(frozen=True)
class BlowupFamily:
    kind: BlowupKind
    n: int
    j: int
    field: conformal.ScalarField
    params: dict
    report: BlowupReport
    f: SymFun | None = None
    cone: ConeSpec | None = None


def _ball_samples(n: int, count: int, radius: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(count, n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z * radius * rng.random(count)[:, None] ** (1.0 / n)


def _first_coords(n: int, count: int, radius: float, seed: int) -> np.ndarray:
    pts = _ball_samples(n, count, radius, seed)[:, 0]
    return np.concatenate([pts, [-radius * (1 - 1e-12), radius * (1 - 1e-12)]])


def _sigma_on_pattern(n: int, k: int, eps: float) -> float:
    """``sigma_k(-1 + eps, 1, ..., 1)`` with the integer part formed exactly."""
    return float(math.comb(n - 1, k) - math.comb(n - 1, k - 1)) + eps * math.comb(n - 1, k - 1)


def _formula_residual(n: int, fld: conformal.ScalarField, xs: np.ndarray) -> float:
    worst = 0.0
    for x1 in xs[:20]:
        x = np.zeros(n)
        x[0] = x1
        full = conformal.mobius_hessian(fld, x).eigenvalues.values
        one = conformal.onedim_eigenvalues(n, fld(x), fld.gradient(x)[0], fld.hessian(x)[0, 0]).values
        worst = max(worst, float(np.max(np.abs(full - one)) / max(np.max(np.abs(one)), 1e-300)))
    return worst


def _neg_sigma_half(n: int, j: int, samples: int, seed: int) -> BlowupFamily:
    if n % 2 or n < 2:
        raise ValueError("the sigma_(n/2) family needs even n")
    k = n // 2
    cn = c_n(n)

    def w(x):
        return j ** (-n) * math.exp(n * j * (x - 2.0))

    def v(x):
        return j * (x - 2.0) + w(x)

    def dv(x):
        return j * (1.0 + n * w(x))

    def d2v(x):
        return n * n * j * j * w(x)

    fld = conformal.onedim(n, v, dv, d2v, description=f"gradient blow-up sequence, j={j}")
    xs = _first_coords(n, samples, 1.0, seed)
    rel, dev, member = 0.0, 0.0, True
    for x in xs:
        d1, d2, ww = dv(x), d2v(x), w(x)
        # -A[v] = (d1^2/2) e^(-2v) (-1 + eps, 1, ..., 1) with eps = 2 v''/v'^2
        eps = 2.0 * d2 / (d1 * d1)
        log_scale = math.log(0.5 * d1 * d1) - 2.0 * v(x)
        direct = math.exp(k * log_scale) * _sigma_on_pattern(n, k, eps)
        closed = cn * math.exp(-n * ww) * (1.0 + n * ww) ** (n - 2)
        rel = max(rel, abs(direct - closed) / closed)
        dev = max(dev, cn * abs(math.expm1(-n * ww + (n - 2) * math.log1p(n * ww))))
        member &= all(_sigma_on_pattern(n, l, eps) > 0 for l in range(1, k + 1))
    half = _first_coords(n, samples, 0.5, seed + 1)
    min_grad = min(dv(x) for x in half)
    vmax = max(v(x) for x in xs)
    values = {"c_n": cn, "identity_residual": rel, "sup_deviation": dev, "min_grad_half_ball": min_grad,
              "sup_v": vmax, "formula_vs_matrix": _formula_residual(n, fld, xs)}
    checks = {"identity": rel <= 1e-8, "gradient_at_least_j": min_grad >= j, "in_cone": member,
              "formula_vs_matrix": values["formula_vs_matrix"] <= 1e-9}
    return BlowupFamily(BlowupKind.NEG_SIGMA_HALF, n, j, fld, {"w_max": w(1.0)}, BlowupReport(checks, values),
                        None, GammaK(n, k))


def _general(kind: BlowupKind, n: int, j: int, f: SymFun | None, cone: ConeSpec | None,
             samples: int, seed: int) -> BlowupFamily:
    if n < 3 and f is None:
        raise ValueError("default f for the general families needs n >= 3")
    neg = kind is BlowupKind.NEG_GENERAL
    if f is None:
        f = g_p(n, 1 if neg else n - 1)
        cone = f.domain
    if cone is None:
        cone = f.domain
    cj = c_schedule(j)
    sgn = -1.0 if neg else 1.0
    base = cj - 1.0 / j if neg else cj + 1.0 / j

    def v(x):
        return sgn * j * (math.log(x / j + cj) - math.log(base))

    def dv(x):
        return sgn / (x / j + cj)

    def d2v(x):
        return -sgn / (j * (x / j + cj) ** 2)

    fld = conformal.onedim(n, v, dv, d2v, (-j * cj, math.inf), description=f"gradient blow-up sequence, j={j}")
    pattern = np.array([2.0 / j - 1.0] + [1.0] * (n - 1)) if neg else np.array([2.0 / j + 1.0] + [-1.0] * (n - 1))
    omega = f(pattern)
    xs = _first_coords(n, samples, 1.0, seed)
    sup_f, sup_v, in_cone, hom = 0.0, -math.inf, True, 0.0
    for x in xs:
        lam = conformal.onedim_eigenvalues(n, v(x), dv(x), d2v(x)).values
        if neg:
            lam = -lam
        val = f(lam)
        scaled = 0.5 * dv(x) ** 2 * math.exp(-2.0 * v(x)) * omega
        hom = max(hom, abs(val - scaled) / max(abs(scaled), 1e-300))
        sup_f = max(sup_f, val)
        sup_v = max(sup_v, v(x))
        in_cone &= cone.margin(-np.sort(-lam)) > 0
    half = _first_coords(n, samples, 1.0, seed + 1)
    min_grad = min(abs(dv(x)) for x in half)
    bound = math.exp(8.0 / cj) * omega
    values = {"C_j": cj, "omega": omega, "sup_f": sup_f, "bound": bound, "sup_v": sup_v,
              "min_grad": min_grad, "grad_floor": 1.0 / (1.0 / j + cj), "homogeneity_residual": hom,
              "formula_vs_matrix": _formula_residual(n, fld, xs)}
    checks = {"v_nonpositive": sup_v <= 1e-12, "gradient_floor": min_grad >= values["grad_floor"] * (1 - 1e-12),
              "in_cone": in_cone, "below_bound": sup_f <= bound, "homogeneity": hom <= 1e-9,
              "formula_vs_matrix": values["formula_vs_matrix"] <= 1e-9}
    return BlowupFamily(kind, n, j, fld, {"C_j": cj}, BlowupReport(checks, values), f, cone)


def gradient_blowup(kind: BlowupKind | str, n: int, j: int, f: SymFun | None = None, cone: ConeSpec | None = None,
                    samples: int = 100, seed: int = 0) -> BlowupFamily:
    """Build the ``j``-th member of a blow-up sequence and verify it on sampled points of the unit ball."""
    kind = BlowupKind(kind)
    if j < 1:
        raise ValueError("j must be >= 1")
    if kind is BlowupKind.NEG_SIGMA_HALF:
        return _neg_sigma_half(n, j, samples, seed)
    return _general(kind, n, j, f, cone, samples, seed)


__all__ = [
    "SingularKind", "SingularProfile", "singular_profile", "Existence", "OdeSetup", "existence_predicate",
    "first_integral", "Outcome", "OdeTrajectory", "integrate_ode", "NonBubble", "nonbubble_entire",
    "BlowupKind", "BlowupFamily", "BlowupReport", "c_n", "c_schedule", "gradient_blowup",
]
