"""Deterministic numerical kernels shared by the rest of the package.

Contents
--------
* ``ToleranceProfile``: the tolerance knobs used across modules, with an
  environment-variable override.
* ``fd_gradient`` / ``fd_hessian``: central finite differences.
* ``sym_eigs``: cyclic Jacobi eigensolver for small symmetric matrices.
* ``bracketed_root``: bracketed scalar root finding.
* ``rk45``: Dormand-Prince 5(4) integrator with dense output and a
  threshold event.
* ``sphere_points``: seeded low-discrepancy points on the unit sphere.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, fields, replace
from typing import Callable, Sequence

import numpy as np
from scipy import optimize
from scipy.special import ndtri
from scipy.stats import qmc

TOLERANCE_ENV = "CONFHESS_TOLERANCES"


class NumericalError(RuntimeError):
    """A numerical kernel could not deliver its contract."""


@dataclass(frozen=True)
class ToleranceProfile:
    """Tolerances used by the numerical kernels.

    ``fd_gradient_scale`` and ``fd_hessian_scale`` multiply ``1 + |x|`` to give
    the finite-difference steps.  ``boundary_tol`` is the relative band used
    to report cone boundary membership.
    """

    fd_gradient_scale: float = 1e-5
    fd_hessian_scale: float = 1e-4
    eig_offdiag: float = 1e-13
    root_xtol: float = 1e-14
    ode_rtol: float = 1e-13
    ode_atol: float = 1e-15
    boundary_tol: float = 1e-8

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {f.name} must be a positive finite number, got {value!r}")

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "ToleranceProfile":
        """Defaults, overridden by a JSON object in ``$CONFHESS_TOLERANCES``."""
        env = os.environ if environ is None else environ
        raw = env.get(TOLERANCE_ENV)
        if not raw:
            return cls()
        try:
            overrides = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{TOLERANCE_ENV} is not valid JSON: {exc}") from None
        if not isinstance(overrides, dict):
            raise ValueError(f"{TOLERANCE_ENV} must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown tolerance keys in {TOLERANCE_ENV}: {sorted(unknown)}")
        return replace(cls(), **{k: float(v) for k, v in overrides.items()})


DEFAULT_TOLERANCES = ToleranceProfile()
_ACTIVE = [DEFAULT_TOLERANCES]


def active_tolerances() -> ToleranceProfile:
    """The profile consulted by kernels when no explicit tolerance is passed."""
    return _ACTIVE[0]


def use_tolerances(profile: ToleranceProfile) -> ToleranceProfile:
    """Install ``profile`` process-wide and return the previous one."""
    previous = _ACTIVE[0]
    _ACTIVE[0] = profile
    return previous


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def _checked(value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise NumericalError("non-finite function value on the finite-difference stencil")
    return value


def fd_gradient(fn: Callable[[np.ndarray], float], x, h: float | None = None) -> np.ndarray:
    """Central-difference gradient; default step ``1e-5 * (1 + |x|)``."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = active_tolerances().fd_gradient_scale * (1.0 + float(np.linalg.norm(x)))
    grad = np.empty_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (_checked(fn(x + step)) - _checked(fn(x - step))) / (2.0 * h)
    return grad


def fd_hessian(fn: Callable[[np.ndarray], float], x, h: float | None = None) -> np.ndarray:
    """Central second differences, symmetrised; default step ``1e-4 * (1 + |x|)``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if h is None:
        h = active_tolerances().fd_hessian_scale * (1.0 + float(np.linalg.norm(x)))
    f0 = _checked(fn(x))
    eye = np.eye(n) * h
    hess = np.empty((n, n))
    for i in range(n):
        fp = _checked(fn(x + eye[i]))
        fm = _checked(fn(x - eye[i]))
        hess[i, i] = (fp - 2.0 * f0 + fm) / (h * h)
        for j in range(i + 1, n):
            fpp = _checked(fn(x + eye[i] + eye[j]))
            fpm = _checked(fn(x + eye[i] - eye[j]))
            fmp = _checked(fn(x - eye[i] + eye[j]))
            fmm = _checked(fn(x - eye[i] - eye[j]))
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h * h)
    return 0.5 * (hess + hess.T)


# ---------------------------------------------------------------------------
# symmetric eigenproblem
# ---------------------------------------------------------------------------

def sym_eigs(a, offdiag_tol: float | None = None, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi sweeps.

    Returns ``(values, vectors)`` with values in descending order and the
    matching eigenvectors as the columns of ``vectors``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("sym_eigs expects a square matrix")
    n = a.shape[0]
    if n > 16:
        raise ValueError("sym_eigs is meant for n <= 16")
    if not np.all(np.isfinite(a)):
        raise NumericalError("matrix has non-finite entries")
    scale = float(np.linalg.norm(a))
    if np.linalg.norm(a - a.T) > 1e-10 * max(1.0, scale):
        raise ValueError("matrix is not symmetric within 1e-10")
    a = 0.5 * (a + a.T)
    tol = (active_tolerances().eig_offdiag if offdiag_tol is None else offdiag_tol) * scale
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    else:
        raise NumericalError("Jacobi iteration did not converge")
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], v[:, order]


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

def bracketed_root(fn: Callable[[float], float], lo: float, hi: float, tol: float | None = None,
                   maxiter: int = 200) -> float:
    """Root of ``fn`` in ``[lo, hi]``; requires ``fn(lo) * fn(hi) <= 0``."""
    flo, fhi = float(fn(lo)), float(fn(hi))
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise NumericalError("non-finite value at the bracket ends")
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]: f(lo)={flo:.3g}, f(hi)={fhi:.3g}")
    xtol = active_tolerances().root_xtol if tol is None else tol
    try:
        return float(optimize.brentq(fn, lo, hi, xtol=xtol, rtol=4.5 * np.finfo(float).eps, maxiter=maxiter))
    except RuntimeError as exc:
        raise NumericalError(f"root finder did not converge on [{lo}, {hi}]: {exc}") from None


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)
# ---------------------------------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# difference between the 5th-order and embedded 4th-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
_A_TERMS = tuple(tuple((j, a) for j, a in enumerate(row) if a != 0.0) for row in _A)
_E_TERMS = tuple((j, e) for j, e in enumerate(_E) if e != 0.0)
# dense-output coefficients (Hairer, Norsett & Wanner)
_D = (-12715105075 / 11282082432, 0.0, 87487479700 / 32700410799, -10690763975 / 1880347072,
      701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423)


@dataclass(frozen=True)
class _DenseSegment:
    t0: float
    h: float
    coeffs: tuple[tuple[float, ...], ...]  # five coefficient vectors

    def __call__(self, t: float) -> list[float]:
        s = (t - self.t0) / self.h
        s1 = 1.0 - s
        r1, r2, r3, r4, r5 = self.coeffs
        return [a + s * (b + s1 * (c + s * (d + s1 * e))) for a, b, c, d, e in zip(r1, r2, r3, r4, r5)]


@dataclass(frozen=True)
class Trajectory:
    """Accepted steps of an ``rk45`` run plus its dense interpolant.

    ``status`` is ``"completed"`` when the window end was reached or
    ``"event"`` when the threshold event fired at ``event_time``.
    """

    t: np.ndarray
    y: np.ndarray
    status: str
    event_time: float | None
    event_state: np.ndarray | None
    segments: tuple[_DenseSegment, ...]
    nfev: int

    def sol(self, t: float) -> np.ndarray:
        """Dense-output state at time ``t`` inside the integrated range."""
        if not self.segments:
            return self.y[0].copy()
        forward = self.segments[0].h > 0
        lo, hi = sorted((float(self.t[0]), float(self.t[-1])))
        if not (lo - 1e-12 * (1 + abs(lo)) <= t <= hi + 1e-12 * (1 + abs(hi))):
            raise ValueError(f"t={t} outside the integrated range [{lo}, {hi}]")
        ts = self.t[:-1] if forward else -self.t[:-1]
        key = t if forward else -t
        idx = int(np.searchsorted(ts, key, side="right")) - 1
        idx = min(max(idx, 0), len(self.segments) - 1)
        return np.array(self.segments[idx](t))


def rk45(fun: Callable[[float, Sequence[float]], Sequence[float]], t0: float, t1: float, y0: Sequence[float],
         rtol: float | None = None, atol: float | None = None,
         event: Callable[[float, Sequence[float]], float] | None = None,
         first_step: float | None = None, max_steps: int = 1_000_000,
         on_step: Callable[[float, list[float]], None] | None = None) -> Trajectory:
    """Integrate ``y' = fun(t, y)`` from ``t0`` to ``t1`` (either direction).

    ``event(t, y)`` is a threshold function: integration stops at the first
    time it changes from negative to non-negative, located on the dense
    output to about 1e-12 in time.  ``on_step`` is called after every
    accepted step with the new time and state.
    """
    rtol = active_tolerances().ode_rtol if rtol is None else rtol
    atol = active_tolerances().ode_atol if atol is None else atol
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    y = [float(v) for v in y0]
    dim = len(y)
    t = float(t0)
    ts: list[float] = [t]
    ys: list[list[float]] = [list(y)]
    segments: list[_DenseSegment] = []
    nfev = 0

    def f(tt: float, yy: list[float]) -> list[float]:
        nonlocal nfev
        nfev += 1
        return [float(v) for v in fun(tt, yy)]

    if event is not None and event(t, y) >= 0:
        return Trajectory(np.array(ts), np.array(ys), "event", t, np.array(y), (), nfev)
    if span == 0.0:
        return Trajectory(np.array(ts), np.array(ys), "completed", None, None, (), nfev)

    k1 = f(t, y)
    if first_step is None:
        scales = [atol + rtol * abs(yi) for yi in y]
        d0 = math.hypot(*(yi / sc for yi, sc in zip(y, scales))) / math.sqrt(dim)
        d1 = math.hypot(*(fi / sc for fi, sc in zip(k1, scales))) / math.sqrt(dim)
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 or not math.isfinite(d0 / d1) else 0.01 * d0 / d1
        h = min(h, span)
    else:
        h = min(abs(first_step), span)
    safety, min_factor, max_factor = 0.9, 0.2, 10.0

    for _ in range(max_steps):
        remaining = abs(t1 - t)
        if remaining <= 1e-15 * max(1.0, abs(t1)):
            return Trajectory(np.array(ts), np.array(ys), "completed", None, None, tuple(segments), nfev)
        h = min(h, remaining)
        if h < 1e-14 * max(1.0, abs(t)):
            raise NumericalError(f"step size underflow at t={t:.17g}; partial trajectory of {len(ts)} points")
        hs = direction * h
        ks = [k1]
        for stage in range(1, 7):
            yi = list(y)
            for j, a in _A_TERMS[stage]:
                c = hs * a
                kj = ks[j]
                for m in range(dim):
                    yi[m] += c * kj[m]
            if stage == 6:
                y_new = yi
            ks.append(f(t + _C[stage] * hs, yi))
        err = 0.0
        ok = True
        for m in range(dim):
            e_m = hs * sum(e * ks[j][m] for j, e in _E_TERMS)
            sc = atol + rtol * max(abs(y[m]), abs(y_new[m]))
            if not math.isfinite(y_new[m]):
                ok = False
                break
            err += (e_m / sc) ** 2
        err = math.sqrt(err / dim) if ok else math.inf
        if err <= 1.0:
            k7 = ks[6]
            ydiff = [y_new[m] - y[m] for m in range(dim)]
            bspl = [hs * ks[0][m] - ydiff[m] for m in range(dim)]
            coeffs = (
                tuple(y),
                tuple(ydiff),
                tuple(bspl),
                tuple(ydiff[m] - hs * k7[m] - bspl[m] for m in range(dim)),
                tuple(hs * sum(_D[j] * ks[j][m] for j in range(7)) for m in range(dim)),
            )
            seg = _DenseSegment(t, hs, coeffs)
            t_new = t + hs
            if event is not None and event(t_new, y_new) >= 0:
                te = bracketed_root(lambda tt: event(tt, seg(tt)), t, t_new, tol=1e-12 * max(1.0, abs(t)))
                ye = seg(te)
                segments.append(seg)
                ts.append(t_new)
                ys.append(list(y_new))
                return Trajectory(np.array(ts), np.array(ys), "event", te, np.array(ye), tuple(segments), nfev)
            segments.append(seg)
            t, y, k1 = t_new, y_new, k7
            ts.append(t)
            ys.append(list(y))
            if on_step is not None:
                on_step(t, y)
            factor = max_factor if err == 0.0 else min(max_factor, safety * err ** -0.2)
            h = h * factor
        else:
            factor = min_factor if not math.isfinite(err) else max(min_factor, safety * err ** -0.2)
            h = h * factor
    raise NumericalError(f"rk45 exceeded {max_steps} steps at t={t}")


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def sphere_points(n: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` points on the unit sphere in R^n from a scrambled Halton sequence.

    Identical ``(n, count, seed)`` give bit-identical output.
    """
    if n < 1 or count < 1:
        raise ValueError("need n >= 1 and count >= 1")
    sampler = qmc.Halton(d=n, scramble=True, seed=seed)
    u = sampler.random(count)
    u = np.clip(u, 1e-12, 1 - 1e-12)
    z = ndtri(u)
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return z / norms
