"""Symmetric cones in eigenvalue space and their scalar invariants.

Every cone is an open symmetric cone with vertex at the origin that is
stable under adding vectors with positive entries.  Each variant supplies a
*margin* function: positive inside the cone, zero on its boundary and
negative outside.  Margins are evaluated on points sorted in descending order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

import numpy as np

from .numerics import NumericalError, active_tolerances, bracketed_root

MU_CAP = 1e6


class EigenTuple:
    """A point of R^n (n >= 2) stored in descending order."""

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[float]):
        arr = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=float).ravel()
        if arr.size < 2:
            raise ValueError("an eigenvalue tuple needs dimension n >= 2")
        if not np.all(np.isfinite(arr)):
            raise ValueError("eigenvalue tuple has non-finite entries")
        arr = -np.sort(-arr, kind="stable")
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return int(self._values.size)

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self._values.tolist())

    def __getitem__(self, i):
        return self._values[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, EigenTuple) and np.array_equal(self._values, other._values)

    def __hash__(self) -> int:
        return hash(self._values.tobytes())

    def __repr__(self) -> str:
        return f"EigenTuple({self._values.tolist()})"


def as_sorted(lam) -> np.ndarray:
    """Descending-order float array for an EigenTuple or any sequence."""
    if isinstance(lam, EigenTuple):
        return lam.values
    return EigenTuple(lam).values


def lambda_star(n: int) -> np.ndarray:
    """The point (1, -1, ..., -1)."""
    out = -np.ones(n)
    out[0] = 1.0
    return out


def elementary_symmetric(lam, k: int) -> np.ndarray:
    """Array ``[s_0, s_1, ..., s_k]`` of elementary symmetric polynomials."""
    lam = np.asarray(lam, dtype=float)
    e = np.zeros(k + 1)
    e[0] = 1.0
    for x in lam:
        e[1:] = e[1:] + x * e[:-1]
    return e


def _signed_root(value: float, degree: int) -> float:
    return math.copysign(abs(value) ** (1.0 / degree), value)


class Position(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


@dataclass(frozen=True)
class ConePosition:
    position: Position
    margin: float

    def __str__(self) -> str:
        return f"{self.position.value} (margin {self.margin:.6g})"


# ---------------------------------------------------------------------------
# cone variants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeSpec:
    """Base class; subclasses define ``margin`` on descending-sorted arrays."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"cone dimension must be an integer >= 2, got {self.n!r}")

    def margin(self, lam: np.ndarray) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def linear_margin(self, lam: np.ndarray) -> float:
        """Same sign as ``margin`` but vanishing only to first order on a smooth boundary.

        Boundary classification uses this one, so that a point located to
        within ``eps`` of the boundary reads as ``O(eps)`` and not ``O(eps^(1/k))``.
        """
        return self.margin(lam)

    def dual(self) -> "ConeSpec":
        return NegationDual(self.n, self)

    def closed_mu_minus(self) -> float | None:
        return None

    def closed_mu_plus(self) -> float | None:
        return None

    def contains(self, lam, tol: float | None = None) -> ConePosition:
        return cone_contains(self, lam, tol)

    @property
    def label(self) -> str:
        return type(self).__name__

    def _validate_witness(self) -> None:
        n = self.n
        if not self.margin(np.ones(n)) > 0:
            raise ValueError(f"{self.label}: the point (1,...,1) must lie inside the cone")
        if self.margin(-np.ones(n)) >= 0:
            raise ValueError(f"{self.label}: the point (-1,...,-1) must lie outside the closed cone")


@dataclass(frozen=True)
class GammaK(ConeSpec):
    """``{s_l > 0 for l <= k}``; the margin is ``min_l sign(s_l)|s_l|^(1/l)``."""

    k: int = 1

    def __post_init__(self) -> None:
        super().__post_init__()
        if not 1 <= self.k <= self.n:
            raise ValueError(f"GammaK needs 1 <= k <= n, got k={self.k}, n={self.n}")
        self._validate_witness()

    def margin(self, lam: np.ndarray) -> float:
        e = elementary_symmetric(lam, self.k)
        return min(_signed_root(e[l], l) for l in range(1, self.k + 1))

    def linear_margin(self, lam: np.ndarray) -> float:
        e = elementary_symmetric(lam, self.k)
        scale = float(np.linalg.norm(lam))
        if scale == 0.0:
            return 0.0
        return min(e[l] / scale ** (l - 1) for l in range(1, self.k + 1))

    def dual(self) -> ConeSpec:
        return NegDualGammaK(self.n, self.k)

    def closed_mu_plus(self) -> float:
        return (self.n - self.k) / self.k

    def closed_mu_minus(self) -> float:
        # (c,-1,...,-1) needs s_1 = c - (n-1) >= 0 and, when k >= 2,
        # s_2 = -c(n-1) + (n-1)(n-2)/2 >= 0; these are incompatible.
        return float(self.n - 1) if self.k == 1 else math.inf

    @property
    def label(self) -> str:
        return f"GammaK(k={self.k})"


@dataclass(frozen=True)
class NegDualGammaK(ConeSpec):
    """The complement of ``-closure(GammaK(k))``."""

    k: int = 1

    def __post_init__(self) -> None:
        super().__post_init__()
        if not 1 <= self.k <= self.n:
            raise ValueError(f"NegDualGammaK needs 1 <= k <= n, got k={self.k}, n={self.n}")

    def margin(self, lam: np.ndarray) -> float:
        return -GammaK(self.n, self.k).margin(-lam[::-1])

    def linear_margin(self, lam: np.ndarray) -> float:
        return -GammaK(self.n, self.k).linear_margin(-lam[::-1])

    def dual(self) -> ConeSpec:
        return GammaK(self.n, self.k)

    def closed_mu_minus(self) -> float:
        return (self.n - self.k) / self.k

    def closed_mu_plus(self) -> float:
        return GammaK(self.n, self.k).closed_mu_minus()

    @property
    def label(self) -> str:
        return f"NegDualGammaK(k={self.k})"


@dataclass(frozen=True)
class OrderedLinear(ConeSpec):
    """``{w_1 l_1 + ... + w_n l_n > 0}`` with ``l`` sorted descending."""

    weights: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        super().__post_init__()
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != self.n:
            raise ValueError("OrderedLinear needs exactly n weights")
        if any(x < 0 for x in w) or not any(x > 0 for x in w) or not all(math.isfinite(x) for x in w):
            raise ValueError("OrderedLinear weights must be non-negative, finite and not all zero")
        self._validate_witness()

    def margin(self, lam: np.ndarray) -> float:
        return float(np.dot(self.weights, lam))

    def dual(self) -> ConeSpec:
        return OrderedLinear(self.n, tuple(reversed(self.weights)))

    def closed_mu_minus(self) -> float:
        w = self.weights
        return math.inf if w[0] == 0 else sum(w[1:]) / w[0]

    def closed_mu_plus(self) -> float:
        w = self.weights
        return math.inf if w[-1] == 0 else sum(w[:-1]) / w[-1]

    @property
    def label(self) -> str:
        return f"OrderedLinear(weights={list(self.weights)})"


@dataclass(frozen=True)
class Circular(ConeSpec):
    """``{s_1 + c|l| > 0}`` for ``c`` in [-1, 1]."""

    c: float = 0.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if not (math.isfinite(self.c) and -1.0 <= self.c <= 1.0):
            raise ValueError(f"Circular needs c in [-1, 1], got {self.c}")
        self._validate_witness()

    def margin(self, lam: np.ndarray) -> float:
        return float(np.sum(lam) + self.c * np.linalg.norm(lam))

    def dual(self) -> ConeSpec:
        return Circular(self.n, -self.c)

    @property
    def label(self) -> str:
        return f"Circular(c={self.c:g})"


@dataclass(frozen=True)
class ExtremalLargest(ConeSpec):
    """``{l_1 + mu l_2 > 0}``, the largest cone with ``(mu,-1,...,-1)`` on its boundary."""

    mu: float = 0.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise ValueError(f"extremal cones need a finite mu >= 0, got {self.mu}")
        self._validate_witness()

    def margin(self, lam: np.ndarray) -> float:
        return float(lam[0] + self.mu * lam[1])

    def dual(self) -> ConeSpec:
        return ExtremalSmallest(self.n, self.mu)

    def closed_mu_minus(self) -> float:
        return float(self.mu)

    def closed_mu_plus(self) -> float:
        if self.n > 2:
            return math.inf
        return math.inf if self.mu == 0 else 1.0 / self.mu

    @property
    def label(self) -> str:
        return f"ExtremalLargest(mu={self.mu:g})"


@dataclass(frozen=True)
class ExtremalSmallest(ConeSpec):
    """``{l_n + mu l_(n-1) > 0}``, the smallest cone with ``(mu,-1,...,-1)`` on its boundary."""

    mu: float = 0.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise ValueError(f"extremal cones need a finite mu >= 0, got {self.mu}")
        self._validate_witness()

    def margin(self, lam: np.ndarray) -> float:
        return float(lam[-1] + self.mu * lam[-2])

    def dual(self) -> ConeSpec:
        return ExtremalLargest(self.n, self.mu)

    def closed_mu_minus(self) -> float:
        if self.n > 2:
            return math.inf
        return math.inf if self.mu == 0 else 1.0 / self.mu

    def closed_mu_plus(self) -> float:
        return float(self.mu)

    @property
    def label(self) -> str:
        return f"ExtremalSmallest(mu={self.mu:g})"


class _NegatedGauge:
    """``l -> -g(-l)`` re-sorted; remembers ``g`` so that negating twice returns it."""

    def __init__(self, base: Callable[[np.ndarray], float]):
        self.base = base

    def __call__(self, lam: np.ndarray) -> float:
        return -float(self.base(-np.asarray(lam)[::-1]))


@dataclass(frozen=True)
class Gauge(ConeSpec):
    """``{g > 0}`` for a caller-supplied symmetric function ``g``.

    ``g`` receives descending-sorted arrays.  ``witness`` is an interior point
    used by ray-based routines (default ``(1,...,1)``).
    """

    fn: Callable[[np.ndarray], float] = field(default=None, compare=False)
    name: str = "gauge"
    witness: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.fn is None or not callable(self.fn):
            raise ValueError("Gauge needs a callable defining function")
        if self.witness is None:
            object.__setattr__(self, "witness", tuple([1.0] * self.n))
        if not self.margin(as_sorted(self.witness)) > 0:
            raise ValueError("Gauge witness point is not inside the cone")
        self._validate_witness()

    def margin(self, lam: np.ndarray) -> float:
        return float(self.fn(lam))

    def dual(self) -> ConeSpec:
        if isinstance(self.fn, _NegatedGauge):
            return Gauge(self.n, self.fn.base, self.name[len("dual of "):] if self.name.startswith("dual of ") else self.name)
        return Gauge(self.n, _NegatedGauge(self.fn), f"dual of {self.name}")

    @property
    def label(self) -> str:
        return f"Gauge({self.name})"


@dataclass(frozen=True)
class NegationDual(ConeSpec):
    """Generic complement of ``-closure(base)`` for variants without a closed dual."""

    base: ConeSpec = None

    def margin(self, lam: np.ndarray) -> float:
        return -self.base.margin(-lam[::-1])

    def linear_margin(self, lam: np.ndarray) -> float:
        return -self.base.linear_margin(-lam[::-1])

    def dual(self) -> ConeSpec:
        return self.base

    def closed_mu_minus(self) -> float | None:
        return self.base.closed_mu_plus()

    def closed_mu_plus(self) -> float | None:
        return self.base.closed_mu_minus()

    @property
    def label(self) -> str:
        return f"NegationDual({self.base.label})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _classify(margin: float, linear: float, lam: np.ndarray, tol: float) -> ConePosition:
    band = tol * (1.0 + float(np.linalg.norm(lam)))
    if abs(linear) <= band:
        return ConePosition(Position.BOUNDARY, margin)
    return ConePosition(Position.INTERIOR if margin > 0 else Position.EXTERIOR, margin)


def cone_contains(cone: ConeSpec, lam, tol: float | None = None) -> ConePosition:
    """Interior/Boundary/Exterior position of ``lam`` with the margin value."""
    tol = active_tolerances().boundary_tol if tol is None else tol
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    arr = as_sorted(lam)
    if arr.size != cone.n:
        raise ValueError(f"dimension mismatch: point has n={arr.size}, cone has n={cone.n}")
    return _classify(cone.margin(arr), cone.linear_margin(arr), arr, tol)


def _minus_ray(n: int, c: float) -> np.ndarray:
    p = -np.ones(n)
    p[0] = c
    return p


def _plus_ray(n: int, c: float) -> np.ndarray:
    p = np.ones(n)
    p[-1] = -c
    return p


def _check_ray_monotone(values: list[float], increasing: bool, label: str) -> None:
    signs = [v >= 0 for v in values]
    if not increasing:
        signs = signs[::-1]
    if any(a and not b for a, b in zip(signs, signs[1:])):
        warnings.warn(f"{label}: margin is not monotone along the test ray; reporting the bisection limit",
                      RuntimeWarning, stacklevel=3)


def _ray_bisect(cone: ConeSpec, ray: Callable[[int, float], np.ndarray], increasing: bool) -> float:
    n = cone.n

    def g(c: float) -> float:
        return cone.margin(ray(n, c))

    grid = [0.0] + list(np.geomspace(1e-6, MU_CAP, 49))
    _check_ray_monotone([g(c) for c in grid], increasing, cone.label)
    g0, gcap = g(0.0), g(MU_CAP)
    if increasing:
        if g0 >= 0:
            return 0.0
        if gcap < 0:
            return math.inf
    else:
        if g0 < 0:
            return 0.0
        if gcap >= 0:
            return math.inf
    try:
        return bracketed_root(g, 0.0, MU_CAP, tol=1e-13)
    except (ValueError, NumericalError) as exc:
        raise NumericalError(f"{cone.label}: bisection for mu failed ({exc})") from None


def mu_minus(cone: ConeSpec, method: str = "auto") -> float:
    """``inf{c : (c,-1,...,-1) in closure(cone)}`` (``inf`` when empty).

    ``method`` is ``"auto"`` (closed form when known), ``"closed"`` or ``"bisect"``.
    """
    if method not in ("auto", "closed", "bisect"):
        raise ValueError(f"unknown method {method!r}")
    if method != "bisect":
        closed = cone.closed_mu_minus()
        if closed is not None:
            return float(closed)
        if method == "closed":
            raise ValueError(f"{cone.label} has no closed form for mu_minus")
    return _ray_bisect(cone, _minus_ray, increasing=True)


def mu_plus(cone: ConeSpec, method: str = "auto") -> float:
    """``sup{c : (1,...,1,-c) in closure(cone)}`` (``inf`` when unbounded)."""
    if method not in ("auto", "closed", "bisect"):
        raise ValueError(f"unknown method {method!r}")
    if method != "bisect":
        closed = cone.closed_mu_plus()
        if closed is not None:
            return float(closed)
        if method == "closed":
            raise ValueError(f"{cone.label} has no closed form for mu_plus")
    return _ray_bisect(cone, _plus_ray, increasing=False)


def negation_dual(cone: ConeSpec) -> ConeSpec:
    """The cone ``R^n \\ (-closure(cone))``; applying it twice returns ``cone``."""
    return cone.dual()


def _position_from_mu(mu: float, tol: float, above_means: Position) -> Position:
    if math.isfinite(mu) and abs(mu - 1.0) <= tol:
        return Position.BOUNDARY
    if mu > 1.0:
        return above_means
    return Position.INTERIOR if above_means is Position.EXTERIOR else Position.EXTERIOR


@dataclass(frozen=True)
class LambdaStarClass:
    plus: ConePosition   # position of (1,-1,...,-1)
    minus: ConePosition  # position of (-1,1,...,1)
    mu_minus: float
    mu_plus: float


def lambda_star_class(cone: ConeSpec, tol: float | None = None) -> LambdaStarClass:
    """Positions of ``(1,-1,...,-1)`` and its negative, cross-checked against the mu invariants."""
    tol = active_tolerances().boundary_tol if tol is None else tol
    ls = lambda_star(cone.n)
    direct_plus = cone_contains(cone, ls, tol)
    direct_minus = cone_contains(cone, -ls, tol)
    mm, mp = mu_minus(cone), mu_plus(cone)
    via_plus = _position_from_mu(mm, tol, Position.EXTERIOR)
    via_minus = _position_from_mu(mp, tol, Position.INTERIOR)
    if via_plus is not direct_plus.position or via_minus is not direct_minus.position:
        raise NumericalError(
            f"{cone.label}: membership test and mu invariants disagree "
            f"(lambda*: {direct_plus.position.value} vs {via_plus.value}; "
            f"-lambda*: {direct_minus.position.value} vs {via_minus.value})")
    return LambdaStarClass(direct_plus, direct_minus, mm, mp)


def extremal_cone(mu: float, which: str, n: int) -> ConeSpec:
    """``{l_1 + mu l_2 > 0}`` (``"largest"``) or ``{l_n + mu l_(n-1) > 0}`` (``"smallest"``)."""
    if mu < 0:
        raise ValueError("extremal cones need mu >= 0")
    which = which.lower()
    if which == "largest":
        return ExtremalLargest(n, float(mu))
    if which == "smallest":
        return ExtremalSmallest(n, float(mu))
    raise ValueError(f"which must be 'largest' or 'smallest', got {which!r}")


# ---------------------------------------------------------------------------
# sampling helpers used by tests and by symfun
# ---------------------------------------------------------------------------

def sample_interior(cone: ConeSpec, count: int, rng: np.random.Generator, max_tries: int = 200) -> np.ndarray:
    """Random unit-scale points inside ``cone`` by rejection from a Gaussian."""
    out: list[np.ndarray] = []
    for _ in range(max_tries):
        z = rng.normal(size=(max(4 * count, 64), cone.n))
        for row in z:
            srt = -np.sort(-row)
            if cone.margin(srt) > 1e-6 * np.linalg.norm(srt):
                out.append(row)
                if len(out) == count:
                    return np.array(out)
    raise NumericalError(f"could not sample {count} interior points of {cone.label}")


def sample_boundary(cone: ConeSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-norm boundary points found by bisection between (1,...,1) and exterior points."""
    e = np.ones(cone.n) / math.sqrt(cone.n)
    out: list[np.ndarray] = []
    for _ in range(1000):
        z = rng.normal(size=cone.n)
        if cone.margin(-np.sort(-z)) >= 0:
            continue

        def g(t: float, z=z) -> float:
            p = (1 - t) * e + t * z
            return cone.margin(-np.sort(-p))

        t = bracketed_root(g, 0.0, 1.0, tol=1e-15)
        p = (1 - t) * e + t * z
        out.append(p / np.linalg.norm(p))
        if len(out) == count:
            return np.array(out)
    raise NumericalError(f"could not sample {count} boundary points of {cone.label}")
