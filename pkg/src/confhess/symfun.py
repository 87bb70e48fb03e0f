"""Symmetric functions of eigenvalues and constructions of new ones from cones.

Built-in families: ``sigma_k``, ``sigma_k_root``, ``g_p`` (ordered weights
``p`` then ``n-p``), ``lambda_pq`` (partial sums of sorted entries),
``circular`` (``s_1 + c|l|``) and ``ordered_linear``.

Constructions:

* ``gauge_from_level_set`` turns a level set ``V = {f0 > 1}`` into the
  degree-one function ``f`` with ``f = 1`` on the boundary of ``V``.
* ``reflect_level_set`` builds the reflected level set whose cone is the
  negation dual of the original one.
* ``convex_extend`` extends a convex function from a cone with convex
  complement to all of R^n using sampled support normals.
* ``maxform_f0`` / ``mollified_f`` are the piecewise-linear max of shifted
  linear branches and its smoothing by a radial bump.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np

from .cone import (ConeSpec, EigenTuple, Gauge, GammaK, OrderedLinear, Circular as CircularCone,
                   as_sorted, cone_contains, elementary_symmetric, mu_minus, mu_plus,
                   sample_boundary, sample_interior)
from .numerics import NumericalError, bracketed_root, fd_gradient, sphere_points

Array = np.ndarray


class SymFunDomainError(ValueError):
    """Evaluation outside the domain where the function or its gradient is defined."""


def _descending_order(lam: Array) -> Array:
    return np.argsort(-lam, kind="stable")


@dataclass(frozen=True)
class SymFun:
    """A symmetric function of ``n`` eigenvalues.

    ``fn`` and ``grad_fn`` receive descending-sorted arrays; ``grad_fn``
    returns the gradient in that sorted order.  When ``grad_fn`` is missing
    the gradient is a central difference with step ``1e-5 (1 + |l|)``.
    ``shape`` records known convexity (``"convex"``, ``"concave"`` or None).
    """

    n: int
    fn: Callable[[Array], float]
    grad_fn: Callable[[Array], Array] | None = None
    domain: ConeSpec | None = None
    degree: float = 1.0
    name: str = "f"
    shape: str | None = None

    def __call__(self, lam) -> float:
        arr = as_sorted(lam)
        if arr.size != self.n:
            raise ValueError(f"{self.name}: expected {self.n} entries, got {arr.size}")
        return float(self.fn(arr))

    @property
    def analytic_gradient(self) -> bool:
        return self.grad_fn is not None

    def gradient(self, lam) -> Array:
        """Gradient in the coordinate order of ``lam``."""
        raw = np.asarray(lam.values if isinstance(lam, EigenTuple) else lam, dtype=float).ravel()
        if raw.size != self.n:
            raise ValueError(f"{self.name}: expected {self.n} entries, got {raw.size}")
        if self.grad_fn is None:
            return fd_gradient(self, raw)
        order = _descending_order(raw)
        g_sorted = np.asarray(self.grad_fn(raw[order]), dtype=float)
        out = np.empty(self.n)
        out[order] = g_sorted
        return out

    def scaled(self, c: float) -> "SymFun":
        grad = None if self.grad_fn is None else (lambda lam: c * np.asarray(self.grad_fn(lam)))
        return SymFun(self.n, lambda lam: c * self.fn(lam), grad, self.domain, self.degree,
                      f"{c:g}*{self.name}", self.shape if c > 0 else None)


def eval_family(f: SymFun, lam) -> tuple[float, Array]:
    """``(f(lam), grad f(lam))``."""
    return f(lam), f.gradient(lam)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def _sigma_grad(lam: Array, k: int) -> Array:
    n = lam.size
    return np.array([elementary_symmetric(np.delete(lam, i), k - 1)[k - 1] for i in range(n)])


def sigma_k(n: int, k: int) -> SymFun:
    if not 1 <= k <= n:
        raise ValueError("sigma_k needs 1 <= k <= n")
    return SymFun(n, lambda lam: float(elementary_symmetric(lam, k)[k]), lambda lam: _sigma_grad(lam, k),
                  GammaK(n, k), float(k), f"sigma_{k}")


def sigma_k_root(n: int, k: int) -> SymFun:
    if not 1 <= k <= n:
        raise ValueError("sigma_k_root needs 1 <= k <= n")
    cone = GammaK(n, k)

    def check(lam):
        if cone.linear_margin(lam) < -1e-9 * (1 + np.linalg.norm(lam)):
            raise SymFunDomainError(f"sigma_{k}^(1/{k}) evaluated outside the closed cone GammaK(k={k})")

    def fn(lam):
        check(lam)
        return max(float(elementary_symmetric(lam, k)[k]), 0.0) ** (1.0 / k)

    def grad(lam):
        check(lam)
        s = float(elementary_symmetric(lam, k)[k])
        if s <= 0:
            if k == 1:
                return np.ones(n)
            raise SymFunDomainError("gradient of sigma_k^(1/k) is unbounded on the cone boundary")
        return s ** (1.0 / k - 1.0) / k * _sigma_grad(lam, k)

    return SymFun(n, fn, grad, cone, 1.0, f"sigma_{k}^(1/{k})", "concave")


def ordered_linear(weights) -> SymFun:
    """``sum_i w_i l_i`` with ``l`` sorted descending; convex for descending weights."""
    w = np.asarray(weights, dtype=float)
    n = w.size
    shape = "convex" if np.all(np.diff(w) <= 0) else ("concave" if np.all(np.diff(w) >= 0) else None)
    return SymFun(n, lambda lam: float(w @ lam), lambda lam: w.copy(), OrderedLinear(n, tuple(w)), 1.0,
                  f"ordered_linear{tuple(w.tolist())}", shape)


def g_p_weights(n: int, p: int) -> tuple[float, ...]:
    if n < 3 or not 1 <= p <= n - 1:
        raise ValueError("g_p needs n >= 3 and 1 <= p <= n-1")
    return tuple([float(p)] * (n - p) + [float(n - p)] * p)


def g_p(n: int, p: int) -> SymFun:
    """``p (l_1 + ... + l_{n-p}) + (n-p)(l_{n-p+1} + ... + l_n)``."""
    f = ordered_linear(g_p_weights(n, p))
    return SymFun(f.n, f.fn, f.grad_fn, f.domain, 1.0, f"G_{p}", f.shape)


def lambda_pq(n: int, p: int, q: int) -> SymFun:
    """``l_p + l_{p+1} + ... + l_{p+q}`` (1-based, descending order)."""
    if not (1 <= p and q >= 0 and p + q <= n):
        raise ValueError("lambda_pq needs 1 <= p and p + q <= n")
    w = np.zeros(n)
    w[p - 1:p + q] = 1.0
    f = ordered_linear(w)
    return SymFun(n, f.fn, f.grad_fn, f.domain, 1.0, f"Lambda_{p},{q}", f.shape)


def circular(n: int, c: float) -> SymFun:
    """``s_1 + c |l|``; convex for ``c >= 0`` and concave for ``c <= 0``."""
    if not -1.0 <= c <= 1.0:
        raise ValueError("circular family needs c in [-1, 1]")

    def grad(lam):
        r = float(np.linalg.norm(lam))
        if r == 0.0:
            raise SymFunDomainError("gradient of |l| is undefined at l = 0")
        return np.ones(n) + c * lam / r

    shape = "convex" if c >= 0 else "concave"
    return SymFun(n, lambda lam: float(np.sum(lam) + c * np.linalg.norm(lam)), grad, CircularCone(n, c), 1.0,
                  f"circular(c={c:g})", shape)


# ---------------------------------------------------------------------------
# max-form function and its mollification
# ---------------------------------------------------------------------------

def maxform_f0(s: float, lam) -> float:
    """``max_k (l_k + s/(n-1) * sum_{j != k} l_j)``."""
    arr = as_sorted(lam)
    n = arr.size
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    total = float(np.sum(arr))
    return max(float(x) + s / (n - 1) * (total - float(x)) for x in arr)


def branch_switch_distance(lam) -> float:
    """Distance from ``lam`` to the set where the two largest entries tie."""
    arr = as_sorted(lam)
    return float(arr[0] - arr[1]) / math.sqrt(2.0)


@dataclass(frozen=True)
class _BumpRule:
    nodes: Array
    weights: Array


_RULES: dict[tuple[int, float], _BumpRule] = {}


def _bump_rule(n: int, eps: float, points: int = 7) -> _BumpRule:
    key = (n, eps)
    if key not in _RULES:
        x, w = np.polynomial.legendre.leggauss(points)
        grids = np.meshgrid(*([x * eps] * n), indexing="ij")
        nodes = np.stack([g.ravel() for g in grids], axis=1)
        wgrid = np.meshgrid(*([w * eps] * n), indexing="ij")
        weights = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
        r2 = np.sum(nodes ** 2, axis=1) / (eps * eps)
        inside = r2 < 1.0
        bump = np.zeros_like(r2)
        bump[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
        total = weights * bump
        keep = total > 0
        _RULES[key] = _BumpRule(nodes[keep], total[keep] / np.sum(total[keep]))
    return _RULES[key]


def mollified_f(s: float, eps: float, lam) -> float:
    """Convolution of ``maxform_f0`` with a normalised radial bump of radius ``eps``.

    Uses a 7-point-per-axis Gauss-Legendre product rule; ``n <= 4``.
    """
    arr = np.asarray(lam.values if isinstance(lam, EigenTuple) else lam, dtype=float)
    n = arr.size
    if n > 4:
        raise ValueError("mollified_f supports n <= 4")
    if not 0 < eps < 1.0 / (2.0 * math.sqrt(n)):
        raise ValueError("eps must lie in (0, 1/(2 sqrt(n)))")
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    rule = _bump_rule(n, float(eps))
    pts = arr[None, :] - rule.nodes
    top = np.max(pts, axis=1)
    total = np.sum(pts, axis=1)
    vals = (1.0 - s / (n - 1)) * top + s / (n - 1) * total
    return float(rule.weights @ vals)


def maxform_symfun(n: int, s: float) -> SymFun:
    return SymFun(n, lambda lam: maxform_f0(s, lam), None, None, 1.0, f"maxform(s={s:g})", "convex")


# ---------------------------------------------------------------------------
# gauge construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelSet:
    """``V = {l : f0(l) > 1}`` for a symmetric ``f0`` evaluated on sorted arrays."""

    n: int
    f0: Callable[[Array], float]
    grad_f0: Callable[[Array], Array] | None = None
    name: str = "V"

    def value(self, lam) -> float:
        return float(self.f0(as_sorted(lam)))

    def normal(self, lam) -> Array:
        """Unit normal ``grad f0 / |grad f0|`` in the coordinate order of ``lam``."""
        raw = np.asarray(lam, dtype=float)
        if self.grad_f0 is not None:
            order = _descending_order(raw)
            g = np.empty(self.n)
            g[order] = np.asarray(self.grad_f0(raw[order]), dtype=float)
        else:
            g = fd_gradient(lambda x: self.value(x), raw)
        norm = float(np.linalg.norm(g))
        if norm == 0:
            raise NumericalError("level-set function has a vanishing gradient")
        return g / norm


def level_set_from_cone(cone: ConeSpec) -> LevelSet:
    return LevelSet(cone.n, lambda lam: cone.margin(lam), None, f"{{{cone.label} margin > 1}}")


def level_set_from_symfun(f: SymFun) -> LevelSet:
    return LevelSet(f.n, f.fn, f.grad_fn, f"{{{f.name} > 1}}")


@dataclass(frozen=True)
class GaugeValue:
    value: float
    inside: bool
    ray_scale: float | None  # c with c*l on the boundary of V


def gauge_value(v: LevelSet, lam, scan: float = 2.0, span: int = 60) -> GaugeValue:
    """``1 / phi`` with ``phi(l) l`` on the boundary of ``v``; 0 when the ray misses ``v``."""
    arr = as_sorted(lam)
    if not np.any(arr):
        return GaugeValue(0.0, False, None)

    def g(c: float) -> float:
        return v.f0(c * arr) - 1.0

    cs = scan ** np.arange(-span, span + 1, dtype=float)
    vals = np.array([g(c) for c in cs])
    above = vals > 0
    if not np.any(above):
        return GaugeValue(0.0, False, None)
    first = int(np.argmax(above))
    if not np.all(above[first:]):
        raise NumericalError(f"ray crosses the boundary of {v.name} more than once "
                             "(the level set is not star-shaped along this ray)")
    if first == 0:
        raise NumericalError("ray starts inside the level set; the origin must lie outside its closure")
    c = bracketed_root(g, cs[first - 1], cs[first], tol=1e-300)
    return GaugeValue(1.0 / c, True, c)


def gauge_from_level_set(v: LevelSet, shape: str | None = None) -> SymFun:
    """Degree-one symmetric function equal to 1 on the boundary of ``v``."""
    n = v.n

    def fn(lam):
        return gauge_value(v, lam).value

    def margin(lam):
        gv = gauge_value(v, lam)
        return gv.value if gv.inside else -float(np.linalg.norm(lam))

    cone = Gauge(n, margin, f"cone of {v.name}")
    return SymFun(n, fn, None, cone, 1.0, f"gauge of {v.name}", shape)


def gauge_from_cone(v: LevelSet | ConeSpec, shape: str | None = None) -> SymFun:
    """Gauge of a level set, or of ``{margin > 1}`` for a cone.

    ``shape`` declares convexity of the result when the caller knows it
    (a convex ``V`` gives a concave gauge and vice versa).
    """
    if isinstance(v, ConeSpec):
        v = level_set_from_cone(v)
    return gauge_from_level_set(v, shape)


def boundary_points(v: LevelSet, count: int, seed: int = 0) -> Array:
    """Points on the boundary of ``v`` along low-discrepancy directions that meet ``v``."""
    out: list[Array] = []
    dirs = sphere_points(v.n, max(8 * count, 256), seed)
    for d in dirs:
        gv = gauge_value(v, d)
        if gv.inside:
            out.append(gv.ray_scale * d)
            if len(out) == count:
                return np.array(out)
    raise NumericalError(f"found only {len(out)} boundary points of {v.name}")


@dataclass(frozen=True)
class NormalConditionReport:
    passed: bool
    worst_normal_entry: float
    worst_radial_product: float
    witness: Array


def check_normal_condition(v: LevelSet, count: int = 100, seed: int = 0) -> NormalConditionReport:
    """Sampled check that boundary normals have non-negative entries and ``l . nu > 0``."""
    pts = boundary_points(v, count, seed)
    worst_entry, worst_dot, witness = math.inf, math.inf, pts[0]
    for p in pts:
        nu = v.normal(p)
        m = float(np.min(nu))
        d = float(p @ nu)
        if m < worst_entry or d < worst_dot:
            witness = p
        worst_entry, worst_dot = min(worst_entry, m), min(worst_dot, d)
    return NormalConditionReport(worst_entry >= -1e-8 and worst_dot > 0, worst_entry, worst_dot, witness)


def normal_identity_check(f: SymFun, v: LevelSet, lam) -> float:
    """``|sum_i df/dl_i - e.nu / (l.nu)|`` at a boundary point ``lam`` of ``v``."""
    arr = np.asarray(lam.values if isinstance(lam, EigenTuple) else lam, dtype=float)
    if abs(v.value(arr) - 1.0) > 1e-8 * (1.0 + abs(v.value(arr))):
        raise ValueError("point is not on the boundary of the level set")
    nu = v.normal(arr)
    dot = float(arr @ nu)
    if dot <= 0:
        raise ValueError("l . nu <= 0: the level set violates the radial normal condition")
    grad = fd_gradient(f, arr)
    return abs(float(np.sum(grad)) - float(np.sum(nu)) / dot)


@dataclass(frozen=True)
class Reflection:
    """Reflected level set ``{l : 2 - f0(psi(l)) > 1}`` with ``psi(l) = -l + 2 phi(e) e``."""

    original: LevelSet
    reflected: LevelSet
    shift: float  # phi(e)
    convex_checked: bool

    def psi(self, lam) -> Array:
        arr = np.asarray(lam, dtype=float)
        return -arr + 2.0 * self.shift * np.ones(arr.size)


def _midpoint_convex(v: LevelSet, pairs: int, seed: int) -> bool:
    rng = np.random.default_rng(seed)
    pts = []
    for d in sphere_points(v.n, 4 * pairs, seed):
        gv = gauge_value(v, d)
        if gv.inside:
            pts.append(gv.ray_scale * d * (1.0 + 3.0 * rng.random()))
    if len(pts) < 2:
        return True
    pts = np.array(pts)
    for _ in range(pairs):
        i, j = rng.integers(len(pts), size=2)
        mid = 0.5 * (pts[i] + pts[j])
        if v.value(mid) < 1.0 - 1e-10:
            return False
    return True


def reflect_level_set(v: LevelSet, pairs: int = 1000, seed: int = 0) -> Reflection:
    """Reflect ``v`` through ``phi(e) e``; the new level set's cone is the negation dual when ``v`` is convex."""
    n = v.n
    gv = gauge_value(v, np.ones(n))
    if not gv.inside:
        raise ValueError("the ray through (1,...,1) must meet the level set")
    shift = gv.ray_scale
    convex = _midpoint_convex(v, pairs, seed)
    if not convex:
        warnings.warn(f"{v.name} failed a sampled convexity test; the reflected cone need not be the negation dual",
                      RuntimeWarning, stacklevel=2)
    two_e = 2.0 * shift

    def f0(lam):
        return 2.0 - v.f0(as_sorted(-np.asarray(lam) + two_e))

    grad = None
    if v.grad_f0 is not None:
        def grad(lam):
            # gradient at the reflected (re-sorted) point maps back with reversed order
            y = -np.asarray(lam) + two_e
            order = _descending_order(y)
            g = np.empty(n)
            g[order] = np.asarray(v.grad_f0(y[order]), dtype=float)
            return g

    return Reflection(v, LevelSet(n, f0, grad, f"reflection of {v.name}"), shift, convex)


# ---------------------------------------------------------------------------
# convex extension
# ---------------------------------------------------------------------------

def _complement_is_convex(cone: ConeSpec, pairs: int, seed: int) -> bool:
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(6 * pairs, cone.n))
    outside = np.array([p for p in z if cone.margin(-np.sort(-p)) <= 0])
    if len(outside) < 2:
        return True
    for _ in range(pairs):
        i, j = rng.integers(len(outside), size=2)
        mid = 0.5 * (outside[i] + outside[j])
        scale = 1.0 + float(np.linalg.norm(mid))
        if cone.margin(-np.sort(-mid)) > 1e-10 * scale:
            return False
    return True


@lru_cache(maxsize=32)
def support_normals(cone: ConeSpec, count: int = 10_000, seed: int = 0) -> Array:
    """Unit normals of the cone boundary (pointing into the cone) at sampled boundary points.

    Boundary points come from bisection along great circles from ``e/sqrt(n)``
    towards sphere sample points; normals are finite-difference gradients of
    the margin.  Near-duplicate normals are merged.
    """
    n = cone.n
    e = np.ones(n) / math.sqrt(n)
    normals = []
    for s in sphere_points(n, count, seed):
        d = s - (s @ e) * e
        dn = float(np.linalg.norm(d))
        if dn < 1e-9:
            continue
        d = d / dn

        def g(theta: float, d=d) -> float:
            p = math.cos(theta) * e + math.sin(theta) * d
            return cone.margin(-np.sort(-p))

        theta = bracketed_root(g, 0.0, math.pi, tol=1e-15)
        p = math.cos(theta) * e + math.sin(theta) * d
        grad = fd_gradient(lambda x: cone.margin(-np.sort(-x)), p, h=1e-6)
        norm = float(np.linalg.norm(grad))
        if norm > 0 and math.isfinite(norm):
            normals.append(grad / norm)
    return _dedupe(np.array(normals), 1e-6)


def _dedupe(rows: Array, tol: float) -> Array:
    kept = np.empty_like(rows)
    m = 0
    for r in rows:
        if m == 0 or np.min(np.linalg.norm(kept[:m] - r, axis=1)) > tol:
            kept[m] = r
            m += 1
    out = kept[:m].copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ConvexExtension:
    """``f`` on the closed cone, ``delta * F`` outside with ``F(l) = max_p p.l`` over support normals."""

    base: SymFun
    cone: ConeSpec
    delta: float
    normals: Array = field(repr=False)

    def support(self, lam) -> float:
        # max over all permutations of each normal; by the rearrangement inequality this
        # pairs sorted normals with sorted lam, keeping F symmetric and convex
        ordered = -np.sort(-self.normals, axis=1)
        return float(np.max(ordered @ as_sorted(lam)))

    def __call__(self, lam) -> float:
        arr = as_sorted(lam)
        if self.cone.margin(arr) >= 0:
            return self.base(arr)
        return self.delta * self.support(arr)

    @cached_property
    def symfun(self) -> SymFun:
        return SymFun(self.base.n, lambda lam: self(lam), None, None, 1.0, f"convex extension of {self.base.name}",
                      "convex")


def convex_extend(f: SymFun, cone: ConeSpec, delta: float, normal_count: int = 10_000, seed: int = 0,
                  pairs: int = 2000) -> ConvexExtension:
    """Extend ``f`` (convex on ``cone``, zero on its boundary) to a convex function on R^n."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not _complement_is_convex(cone, pairs, seed):
        raise ValueError(f"the complement of {cone.label} failed a sampled convexity test")
    return ConvexExtension(f, cone, float(delta), support_normals(cone, normal_count, seed))


# ---------------------------------------------------------------------------
# structural conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    worst: float
    witness: tuple[float, ...] | None
    note: str = ""


@dataclass(frozen=True)
class ConditionReport:
    function: str
    cone: str
    results: tuple[ConditionResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def get(self, name: str) -> ConditionResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def verify_structural(f: SymFun, cone: ConeSpec, samples: int = 200, seed: int = 0) -> ConditionReport:
    """Sampled check of positivity, monotonicity, boundary vanishing and gradient bounds."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    rng = np.random.default_rng(seed)
    inner = sample_interior(cone, samples, rng)
    inner = inner / np.linalg.norm(inner, axis=1, keepdims=True)
    bdry = sample_boundary(cone, max(samples // 2, 50), rng)
    n = cone.n
    e_val = f(np.ones(n))
    vals = np.array([f(p) for p in inner])
    grads = np.array([f.gradient(p) for p in inner])
    sums = grads.sum(axis=1)
    tup = lambda p: tuple(float(x) for x in p)  # noqa: E731
    results = []

    i = int(np.argmin(vals))
    results.append(ConditionResult("positive_in_cone", bool(vals[i] > 0), float(vals[i]), tup(inner[i])))
    i, j = np.unravel_index(int(np.argmin(grads)), grads.shape)
    results.append(ConditionResult("increasing_in_cone", bool(grads[i, j] > 0), float(grads[i, j]), tup(inner[i])))
    # boundary points are located only as well as the margin allows; root-type
    # margins amplify that error, so the allowance scales with |margin(p)|
    ratio_e = abs(e_val) / max(abs(cone.margin(np.ones(n))), 1e-300)
    bvals = np.array([abs(f(p)) for p in bdry])
    allow = 1e-8 + ratio_e * np.array([abs(cone.margin(as_sorted(p))) for p in bdry])
    i = int(np.argmax(bvals - allow))
    results.append(ConditionResult("vanishes_on_boundary", bool(np.all(bvals <= allow)), float(bvals[i]), tup(bdry[i]),
                                   f"allowance {allow[i]:.3g} at the witness"))
    i = int(np.argmin(sums))
    results.append(ConditionResult("sum_of_partials_bounded_below", bool(sums[i] > 0), float(sums[i]), tup(inner[i]),
                                   f"delta = {sums[i]:.6g}"))
    growth = np.array([f(10.0 * p) / (10.0 * v) for p, v in zip(inner, vals) if v > 0])
    if growth.size:
        i = int(np.argmin(growth))
        results.append(ConditionResult("unbounded_along_rays", bool(growth[i] > 1 - 1e-6), float(growth[i]),
                                       tup(inner[i]), "f(10 l) / (10 f(l)) for degree-one homogeneity"))
    if f.shape in ("convex", "concave"):
        slack = sums - e_val
        if f.shape == "convex":
            i = int(np.argmax(slack))
            ok = bool(slack[i] <= 1e-6 * (1 + abs(e_val)))
            note = "sum of partials <= f(1,...,1)"
        else:
            i = int(np.argmin(slack))
            ok = bool(slack[i] >= -1e-6 * (1 + abs(e_val)))
            note = "sum of partials >= f(1,...,1)"
        results.append(ConditionResult("sum_of_partials_vs_value_at_e", ok, float(slack[i]), tup(inner[i]), note))
        mu = mu_plus(cone) if f.shape == "convex" else mu_minus(cone)
        if math.isfinite(mu):
            c = 1.0 / (1.0 + mu)
            ratio = grads.min(axis=1) / sums
            i = int(np.argmin(ratio))
            results.append(ConditionResult("gradient_floor", bool(ratio[i] >= c - 1e-6), float(ratio[i]),
                                           tup(inner[i]), f"min_i df/dl_i / sum_i df/dl_i >= {c:.6g}"))
    return ConditionReport(f.name, cone.label, tuple(results))


reflect_cone = reflect_level_set
