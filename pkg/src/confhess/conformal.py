"""Moebius Hessian, conformal Hessian and Moebius/Kelvin pull-backs of scalar fields.

For a function ``v`` on a domain of R^n the Moebius Hessian is

    A[v] = exp(-2v) * (-Hess v + grad v (x) grad v - |grad v|^2 / 2 * I)

and for ``u > 0`` (n >= 3) the conformal Hessian ``A^u`` is the same matrix
written in terms of ``u = exp((n-2) v / 2)``.  A Moebius map ``phi`` acts on
fields by ``v -> v o phi + log|J_phi| / n``; the eigenvalues of ``A`` are
transported along ``phi`` by that action.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cone import EigenTuple
from .numerics import NumericalError, fd_gradient, fd_hessian, sym_eigs

EXCLUSION_RADIUS = 1e-12

Vector = np.ndarray
Matrix = np.ndarray


class DomainError(ValueError):
    """Evaluation point lies outside the domain of a field or map."""


@dataclass(frozen=True)
class ScalarField:
    """A real function on an open subset of R^n.

    ``grad`` and ``hess`` are optional analytic derivative evaluators; when
    missing, central finite differences are used.  ``domain`` is an optional
    membership predicate and ``excluded`` a tuple of excluded points (each
    with a ``1e-12`` exclusion radius).
    """

    n: int
    value: Callable[[Vector], float]
    grad: Callable[[Vector], Vector] | None = None
    hess: Callable[[Vector], Matrix] | None = None
    domain: Callable[[Vector], bool] | None = None
    excluded: tuple[tuple[float, ...], ...] = ()
    description: str = "field"

    def check(self, x) -> Vector:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point has shape {x.shape}, field expects ({self.n},)")
        if not np.all(np.isfinite(x)):
            raise DomainError("non-finite evaluation point")
        for p in self.excluded:
            if np.linalg.norm(x - np.asarray(p)) < EXCLUSION_RADIUS:
                raise DomainError(f"{self.description}: evaluation at excluded point {list(p)}")
        if self.domain is not None and not self.domain(x):
            raise DomainError(f"{self.description}: point {x.tolist()} is outside the domain")
        return x

    def __call__(self, x) -> float:
        return float(self.value(self.check(x)))

    @property
    def analytic(self) -> bool:
        return self.grad is not None and self.hess is not None

    def gradient(self, x) -> Vector:
        x = self.check(x)
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        return fd_gradient(self, x)

    def hessian(self, x) -> Matrix:
        x = self.check(x)
        if self.hess is not None:
            return np.asarray(self.hess(x), dtype=float)
        return fd_hessian(self, x)

    def without_derivatives(self) -> "ScalarField":
        """Same field, forced onto the finite-difference path."""
        return ScalarField(self.n, self.value, None, None, self.domain, self.excluded,
                           self.description + " [FD]")


# ---------------------------------------------------------------------------
# field constructors
# ---------------------------------------------------------------------------

def bubble(n: int, a: float, b: float, center: Sequence[float] | None = None) -> ScalarField:
    """``v = log(a / (1 + b^2 |x - center|^2))``; its Moebius Hessian is ``2 b^2 / a^2 * I``."""
    if a <= 0 or b <= 0:
        raise ValueError("bubble needs a > 0 and b > 0")
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    b2 = b * b

    def value(x):
        d = x - c
        return math.log(a) - math.log1p(b2 * float(d @ d))

    def grad(x):
        d = x - c
        return -2.0 * b2 * d / (1.0 + b2 * float(d @ d))

    def hess(x):
        d = x - c
        q = 1.0 + b2 * float(d @ d)
        return -2.0 * b2 / q * np.eye(n) + 4.0 * b2 * b2 / (q * q) * np.outer(d, d)

    return ScalarField(n, value, grad, hess, description=f"bubble(a={a:g}, b={b:g})")


def constant(n: int, c: float = 0.0) -> ScalarField:
    return ScalarField(n, lambda x: c, lambda x: np.zeros(n), lambda x: np.zeros((n, n)),
                       description=f"constant({c:g})")


def polynomial(c0: float, p: Sequence[float], q: Matrix | None = None, t: np.ndarray | None = None) -> ScalarField:
    """``c0 + p.x + x.Q.x / 2 + T[x,x,x] / 6`` with symmetric ``Q`` and fully symmetric ``T``."""
    p = np.asarray(p, dtype=float)
    n = p.size
    q = np.zeros((n, n)) if q is None else 0.5 * (np.asarray(q, float) + np.asarray(q, float).T)
    if t is None:
        t = np.zeros((n, n, n))
    else:
        t = np.asarray(t, dtype=float)
        t = (t + t.transpose(0, 2, 1) + t.transpose(1, 0, 2) + t.transpose(1, 2, 0)
             + t.transpose(2, 0, 1) + t.transpose(2, 1, 0)) / 6.0

    def value(x):
        return float(c0 + p @ x + 0.5 * x @ q @ x + np.einsum("ijk,i,j,k->", t, x, x, x) / 6.0)

    def grad(x):
        return p + q @ x + 0.5 * np.einsum("ijk,j,k->i", t, x, x)

    def hess(x):
        return q + np.einsum("ijk,k->ij", t, x)

    return ScalarField(n, value, grad, hess, description="polynomial")


def radial(n: int, v: Callable[[float], float], dv: Callable[[float], float], d2v: Callable[[float], float],
           r_domain: tuple[float, float] = (0.0, math.inf), description: str = "radial") -> ScalarField:
    """``x -> v(|x|)`` with analytic derivatives from the profile derivatives."""
    lo, hi = r_domain

    def value(x):
        return float(v(float(np.linalg.norm(x))))

    def grad(x):
        r = float(np.linalg.norm(x))
        return dv(r) * x / r

    def hess(x):
        r = float(np.linalg.norm(x))
        xh = x / r
        proj = np.outer(xh, xh)
        return d2v(r) * proj + dv(r) / r * (np.eye(n) - proj)

    def dom(x):
        r = float(np.linalg.norm(x))
        return lo < r < hi

    return ScalarField(n, value, grad, hess, dom, excluded=(tuple([0.0] * n),), description=description)


def onedim(n: int, v: Callable[[float], float], dv: Callable[[float], float], d2v: Callable[[float], float],
           interval: tuple[float, float] = (-math.inf, math.inf), description: str = "one-variable") -> ScalarField:
    """``x -> v(x_1)`` on the slab ``interval`` in the first coordinate."""
    lo, hi = interval

    def grad(x):
        g = np.zeros(n)
        g[0] = dv(float(x[0]))
        return g

    def hess(x):
        h = np.zeros((n, n))
        h[0, 0] = d2v(float(x[0]))
        return h

    return ScalarField(n, lambda x: float(v(float(x[0]))), grad, hess,
                       lambda x: lo < x[0] < hi, description=description)


def log_of(u: ScalarField) -> ScalarField:
    """``v = 2/(n-2) * log u`` for a positive field ``u`` (n >= 3)."""
    n = u.n
    if n < 3:
        raise ValueError("the conformal factor exponent needs n >= 3")
    c = 2.0 / (n - 2)

    def value(x):
        ux = u.value(x)
        if ux <= 0:
            raise DomainError("u must be positive")
        return c * math.log(ux)

    grad = hess = None
    if u.analytic:
        def grad(x):
            return c * np.asarray(u.grad(x)) / u.value(x)

        def hess(x):
            ux = u.value(x)
            g = np.asarray(u.grad(x))
            return c * (np.asarray(u.hess(x)) / ux - np.outer(g, g) / (ux * ux))

    return ScalarField(n, value, grad, hess, u.domain, u.excluded, f"log of {u.description}")


def exp_of(v: ScalarField) -> ScalarField:
    """``u = exp((n-2) v / 2)`` (n >= 3)."""
    n = v.n
    if n < 3:
        raise ValueError("the conformal factor exponent needs n >= 3")
    k = (n - 2) / 2.0

    def value(x):
        return math.exp(k * v.value(x))

    grad = hess = None
    if v.analytic:
        def grad(x):
            return k * value(x) * np.asarray(v.grad(x))

        def hess(x):
            g = np.asarray(v.grad(x))
            return k * value(x) * (np.asarray(v.hess(x)) + k * np.outer(g, g))

    return ScalarField(n, value, grad, hess, v.domain, v.excluded, f"exp of {v.description}")


# ---------------------------------------------------------------------------
# Hessians
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HessianResult:
    x: Vector
    matrix: Matrix
    eigenvalues: EigenTuple
    eigenvectors: Matrix
    method: str  # "analytic" or "FD"


def _finish(x: Vector, a: Matrix, method: str) -> HessianResult:
    a = 0.5 * (a + a.T)
    if not np.all(np.isfinite(a)):
        raise NumericalError("non-finite Hessian entries")
    w, q = sym_eigs(a)
    norm = float(np.linalg.norm(a))
    resid = float(np.max(np.linalg.norm(a @ q - q * w, axis=0))) if a.size else 0.0
    if resid > 1e-9 * max(norm, 1e-300) and norm > 0:
        raise NumericalError(f"eigenpair residual {resid:.3g} exceeds 1e-9 * |A|")
    return HessianResult(x, a, EigenTuple(w), q, method)


def mobius_matrix(v: float, g: Vector, h: Matrix) -> Matrix:
    """``exp(-2v) (-h + g g^T - |g|^2 I / 2)`` from value, gradient and Hessian."""
    n = g.size
    return math.exp(-2.0 * v) * (-h + np.outer(g, g) - 0.5 * float(g @ g) * np.eye(n))


def mobius_hessian(v: ScalarField, x) -> HessianResult:
    """``A[v](x)`` with its eigen-decomposition."""
    x = v.check(x)
    a = mobius_matrix(v(x), v.gradient(x), v.hessian(x))
    return _finish(x, a, "analytic" if v.analytic else "FD")


def conformal_hessian_u(u: ScalarField, x) -> HessianResult:
    """``A^u(x)`` assembled directly from ``u``, ``grad u`` and ``Hess u``."""
    n = u.n
    if n < 3:
        raise ValueError("A^u is only defined for n >= 3")
    x = u.check(x)
    ux = u(x)
    if not ux > 0:
        raise DomainError(f"u must be positive, got u(x)={ux}")
    g = u.gradient(x)
    h = u.hessian(x)
    m = n - 2.0
    a = (-2.0 / m * ux ** (-(n + 2) / m) * h
         + 2.0 * n / m ** 2 * ux ** (-2.0 * n / m) * np.outer(g, g)
         - 2.0 / m ** 2 * ux ** (-2.0 * n / m) * float(g @ g) * np.eye(n))
    return _finish(x, a, "analytic" if u.analytic else "FD")


def onedim_eigenvalues(n: int, v: float, dv: float, d2v: float) -> EigenTuple:
    """Eigenvalues of ``A[v]`` for a field depending on ``x_1`` only."""
    if dv != 0.0 and abs(d2v) < 1e300 * dv * dv:
        scale = 0.5 * dv * dv * math.exp(-2.0 * v)
        first = scale * (-2.0 * d2v / (dv * dv) + 1.0)
        return EigenTuple([first] + [-scale] * (n - 1))
    return EigenTuple([-d2v * math.exp(-2.0 * v)] + [0.0] * (n - 1))


# ---------------------------------------------------------------------------
# Moebius maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Jet:
    """Value, Jacobian and second derivatives of a map, plus log|det J| with its derivatives."""

    y: Vector
    jac: Matrix
    d2: np.ndarray  # d2[k, i, j] = d_i d_j y_k
    logdet: float
    glog: Vector
    hlog: Matrix


@dataclass(frozen=True)
class Translation:
    shift: tuple[float, ...]

    def jet(self, y: Vector) -> _Jet:
        n = y.size
        return _Jet(y + np.asarray(self.shift), np.eye(n), np.zeros((n, n, n)), 0.0, np.zeros(n), np.zeros((n, n)))


@dataclass(frozen=True)
class Dilation:
    factor: float

    def __post_init__(self) -> None:
        if not self.factor > 0:
            raise ValueError("dilation factor must be positive")

    def jet(self, y: Vector) -> _Jet:
        n = y.size
        a = self.factor
        return _Jet(a * y, a * np.eye(n), np.zeros((n, n, n)), n * math.log(a), np.zeros(n), np.zeros((n, n)))


@dataclass(frozen=True)
class Rotation:
    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        o = np.asarray(self.matrix, dtype=float)
        if o.ndim != 2 or o.shape[0] != o.shape[1] or np.max(np.abs(o @ o.T - np.eye(o.shape[0]))) > 1e-10:
            raise ValueError("rotation matrix must be orthogonal")

    def jet(self, y: Vector) -> _Jet:
        n = y.size
        o = np.asarray(self.matrix)
        return _Jet(o @ y, o, np.zeros((n, n, n)), 0.0, np.zeros(n), np.zeros((n, n)))


@dataclass(frozen=True)
class Inversion:
    """``y -> y / |y|^2``."""

    def jet(self, y: Vector) -> _Jet:
        n = y.size
        r2 = float(y @ y)
        if math.sqrt(r2) < EXCLUSION_RADIUS:
            raise DomainError("evaluation at the inversion center")
        r4 = r2 * r2
        eye = np.eye(n)
        yy = np.outer(y, y)
        jac = eye / r2 - 2.0 * yy / r4
        d2 = (-2.0 / r4 * (np.einsum("ki,j->kij", eye, y) + np.einsum("kj,i->kij", eye, y)
                            + np.einsum("k,ij->kij", y, eye))
              + 8.0 / (r4 * r2) * np.einsum("k,i,j->kij", y, y, y))
        return _Jet(y / r2, jac, d2, -n * math.log(r2), -2.0 * n * y / r2,
                    -2.0 * n * (eye / r2 - 2.0 * yy / r4))


Generator = Translation | Dilation | Rotation | Inversion


def rotation(o) -> Rotation:
    return Rotation(tuple(tuple(float(v) for v in row) for row in np.asarray(o, dtype=float)))


def translation(shift) -> Translation:
    return Translation(tuple(float(v) for v in np.asarray(shift, dtype=float)))


@dataclass(frozen=True)
class MobiusMap:
    """Composition of generators, applied first-to-last: ``x -> g_k(...g_1(x))``."""

    n: int
    steps: tuple[Generator, ...] = field(default_factory=tuple)

    def jet(self, x) -> _Jet:
        x = np.asarray(x, dtype=float)
        n = self.n
        y, dy, d2y = x.copy(), np.eye(n), np.zeros((n, n, n))
        logdet, glog, hlog = 0.0, np.zeros(n), np.zeros((n, n))
        for g in self.steps:
            j = g.jet(y)
            hlog = dy.T @ j.hlog @ dy + np.einsum("a,aij->ij", j.glog, d2y) + hlog
            glog = dy.T @ j.glog + glog
            logdet += j.logdet
            d2y = np.einsum("kab,ai,bj->kij", j.d2, dy, dy) + np.einsum("ka,aij->kij", j.jac, d2y)
            dy = j.jac @ dy
            y = j.y
        return _Jet(y, dy, d2y, logdet, glog, hlog)

    def __call__(self, x) -> Vector:
        return self.jet(x).y

    def jacobian_det(self, x) -> float:
        """``|det D phi(x)|``."""
        return math.exp(self.jet(x).logdet)

    def then(self, other: "MobiusMap") -> "MobiusMap":
        """``other o self``."""
        return MobiusMap(self.n, self.steps + other.steps)


def apply_mobius(v: ScalarField, phi: MobiusMap) -> ScalarField:
    """``v^phi = v o phi + log|J_phi| / n`` with chain-rule derivatives when ``v`` has them."""
    n = v.n
    if phi.n != n:
        raise ValueError("dimension mismatch between field and map")

    def value(x):
        j = phi.jet(x)
        return v(j.y) + j.logdet / n

    grad = hess = None
    if v.analytic:
        def grad(x):
            j = phi.jet(x)
            return j.jac.T @ v.gradient(j.y) + j.glog / n

        def hess(x):
            j = phi.jet(x)
            g = v.gradient(j.y)
            return j.jac.T @ v.hessian(j.y) @ j.jac + np.einsum("k,kij->ij", g, j.d2) + j.hlog / n

    def dom(x):
        try:
            y = phi.jet(x).y
            v.check(y)
        except DomainError:
            return False
        return True

    return ScalarField(n, value, grad, hess, dom, description=f"pull-back of {v.description}")


def kelvin_map(n: int, center, radius: float) -> MobiusMap:
    """``y -> center + radius^2 (y - center) / |y - center|^2``."""
    if not radius > 0:
        raise ValueError("Kelvin radius must be positive")
    c = np.asarray(center, dtype=float)
    return MobiusMap(n, (translation(-c), Inversion(), Dilation(radius * radius), translation(c)))


def kelvin_transform(v: ScalarField, center, radius: float) -> ScalarField:
    """``2 log(radius / |y - center|) + v(center + radius^2 (y - center) / |y - center|^2)``."""
    c = np.asarray(center, dtype=float)
    out = apply_mobius(v, kelvin_map(v.n, c, radius))
    return ScalarField(out.n, out.value, out.grad, out.hess, out.domain, (tuple(c.tolist()),),
                       f"Kelvin transform of {v.description}")


def gradient_vanishing_map(p, lam: float, o=None) -> MobiusMap:
    """Moebius map fixing 0 whose pull-back kills a gradient ``p`` at the origin.

    ``x -> O(lam^2 (x - c) / |x - c|^2 + lam^2 c / |c|^2)`` with ``c = lam^2 O^T p / 2``.
    """
    p = np.asarray(p, dtype=float)
    n = p.size
    if not np.any(p != 0):
        raise ValueError("p must be non-zero")
    if lam == 0:
        raise ValueError("lam must be non-zero")
    o = np.eye(n) if o is None else np.asarray(o, dtype=float)
    l2 = lam * lam
    c = 0.5 * l2 * o.T @ p
    return MobiusMap(n, (translation(-c), Inversion(), Dilation(l2), translation(l2 * c / float(c @ c)), rotation(o)))
