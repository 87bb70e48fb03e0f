"""Exact radial solutions of ``lambda(A[v])`` on the boundary of a cone.

For ``v = v(r)`` the eigenvalues of ``A[v]`` are ``exp(-2v) (V, nu, ..., nu)``
with ``V = -v'' + v'^2 / 2`` and ``nu = -v'/r - v'^2 / 2``.  Boundary solutions
satisfy ``V + mu nu = 0`` with ``mu`` one of the cone invariants, which gives
closed-form families:

* ``LogLinear``       ``C1 + C2 log r``                               (mu = 1)
* ``PowerLogPlus``    ``2/(mu-1) log(C r^(1-mu) + D)`` with C, D > 0
* ``PowerLogMinus``   the same with ``C D < 0`` on the set where the argument is positive
* ``Constant`` / ``ConstMinus2Log``  ``C`` and ``C - 2 log r``
* ``MaxKink``         ``max(C1 - 2 log r, C2)``, Lipschitz but not C^1

Profiles are stored as ``offset + base(r / scale)`` so that the Dirichlet
matching is exact at the inner radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import conformal
from .cone import ConeSpec, EigenTuple, as_sorted, mu_minus, mu_plus

MU_ONE_TOL = 1e-9


class Family(str, Enum):
    LOG_LINEAR = "LogLinear"
    POWER_LOG_PLUS = "PowerLogPlus"
    POWER_LOG_MINUS = "PowerLogMinus"
    CONSTANT = "Constant"
    CONST_MINUS_2LOG = "ConstMinus2Log"
    MAX_KINK = "MaxKink"


class KinkError(ValueError):
    """Second derivatives requested at the kink of a ``MaxKink`` profile."""


@dataclass(frozen=True)
class RadialProfile:
    """``v(r) = offset + base(r / scale)`` for one of the closed-form families.

    ``params`` holds the base-family constants: ``(C1, C2)`` for LogLinear and
    MaxKink, ``(C, D)`` for the power families, ``(C,)`` for the constant
    families.  ``mu`` is the exponent of the power families (1 for LogLinear).
    """

    family: Family
    params: tuple[float, ...]
    mu: float | None = None
    offset: float = 0.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if not self.scale > 0:
            raise ValueError("profile scale must be positive")
        f, p = self.family, self.params
        if f in (Family.POWER_LOG_PLUS, Family.POWER_LOG_MINUS):
            if self.mu is None or not math.isfinite(self.mu) or self.mu < 0 or abs(self.mu - 1) < MU_ONE_TOL:
                raise ValueError("power families need a finite mu >= 0 with mu != 1")
            c, d = p
            if f is Family.POWER_LOG_PLUS and not (c > 0 and d > 0):
                raise ValueError("PowerLogPlus needs C > 0 and D > 0")
            if f is Family.POWER_LOG_MINUS and not (c * d < 0):
                raise ValueError("PowerLogMinus needs C * D < 0")
        elif f is Family.LOG_LINEAR:
            if len(p) != 2 or p[1] in (0.0, -2.0):
                raise ValueError("LogLinear needs (C1, C2) with C2 not in {0, -2}")
            object.__setattr__(self, "mu", 1.0)
        elif f is Family.MAX_KINK:
            if len(p) != 2:
                raise ValueError("MaxKink needs (C1, C2)")
        elif len(p) != 1:
            raise ValueError(f"{f.value} needs a single constant")

    # -- case bookkeeping ---------------------------------------------------

    @property
    def case(self) -> str:
        """Classification letter: a/b (nu > 0), c/d (nu < 0), e (trivial), kink."""
        if self.family is Family.LOG_LINEAR:
            return "a" if -2.0 < self.params[1] < 0.0 else "c"
        if self.family is Family.POWER_LOG_PLUS:
            return "b"
        if self.family is Family.POWER_LOG_MINUS:
            return "d"
        if self.family is Family.MAX_KINK:
            return "kink"
        return "e"

    @property
    def domain(self) -> tuple[float, float]:
        """Maximal open interval of radii on which the formula is finite."""
        if self.family is not Family.POWER_LOG_MINUS:
            return (0.0, math.inf)
        c, d = self.params
        r0 = (-d / c) ** (1.0 / (1.0 - self.mu)) * self.scale
        increasing = self.mu < 1.0  # r^(1-mu) increasing in r
        if (c > 0) == increasing:
            return (r0, math.inf)
        return (0.0, r0)

    @property
    def kink(self) -> float | None:
        if self.family is not Family.MAX_KINK:
            return None
        c1, c2 = self.params
        return self.scale * math.exp((c1 - c2) / 2.0)

    def _check_r(self, r: float) -> float:
        lo, hi = self.domain
        if not (lo < r < hi):
            raise ValueError(f"r={r} is outside the profile domain ({lo}, {hi})")
        return r

    # -- evaluation -----------------------------------------------------------

    def _base(self, s: float) -> tuple[float, float, float]:
        """(w, w', w'') of the base function at ``s = r / scale``."""
        f, p = self.family, self.params
        if f is Family.LOG_LINEAR:
            c1, c2 = p
            return c1 + c2 * math.log(s), c2 / s, -c2 / (s * s)
        if f is Family.CONSTANT:
            return p[0], 0.0, 0.0
        if f is Family.CONST_MINUS_2LOG:
            return p[0] - 2.0 * math.log(s), -2.0 / s, 2.0 / (s * s)
        if f is Family.MAX_KINK:
            c1, c2 = p
            left = c1 - 2.0 * math.log(s)
            if left > c2:
                return left, -2.0 / s, 2.0 / (s * s)
            return c2, 0.0, 0.0
        mu = self.mu
        c, d = p
        t = c * s ** (1.0 - mu)
        g = t + d
        w = 2.0 / (mu - 1.0) * math.log(g)
        dw = -2.0 * t / (s * g)
        d2w = 2.0 * t * (mu * g + (1.0 - mu) * t) / (s * s * g * g)
        return w, dw, d2w

    def v(self, r: float) -> float:
        return self.offset + self._base(self._check_r(r) / self.scale)[0]

    def dv(self, r: float) -> float:
        self._refuse_kink(r, first_order=True)
        return self._base(self._check_r(r) / self.scale)[1] / self.scale

    def d2v(self, r: float) -> float:
        self._refuse_kink(r, first_order=False)
        return self._base(self._check_r(r) / self.scale)[2] / self.scale ** 2

    def one_sided(self, r: float) -> tuple[float, float]:
        """Left and right first derivatives (they differ only at a kink)."""
        k = self.kink
        if k is not None and abs(r - k) <= 1e-12 * k:
            return -2.0 / r, 0.0
        d = self.dv(r)
        return d, d

    def _refuse_kink(self, r: float, first_order: bool) -> None:
        k = self.kink
        if k is not None and abs(r - k) <= 1e-12 * k:
            what = "first" if first_order else "second"
            raise KinkError(f"{what} derivative requested at the kink r={k}; use one_sided()")

    def shifted_dv(self, r: float) -> float:
        """``(v + 2 log r)'`` without the cancellation of ``v' + 2/r`` near ``v' = -2/r``."""
        self._refuse_kink(r, first_order=True)
        sc = self.scale
        x = self._check_r(r) / sc
        f, p = self.family, self.params
        if f is Family.LOG_LINEAR:
            return (p[1] + 2.0) / (x * sc)
        if f is Family.CONST_MINUS_2LOG:
            return 0.0
        if f is Family.CONSTANT:
            return 2.0 / r
        if f is Family.MAX_KINK:
            return 0.0 if p[0] - 2.0 * math.log(x) > p[1] else 2.0 / r
        c, d = p
        g = c * x ** (1.0 - self.mu) + d
        return 2.0 * d / (x * g * sc)

    def components(self, r: float) -> tuple[float, float]:
        """``(V, nu)`` at radius ``r``.

        ``nu = -v' (v + 2 log r)' / 2``; for the power families ``V`` uses the
        factored form ``-2 mu t d / (r g)^2`` (``t = c (r/scale)^(1-mu)``,
        ``g = t + d``), which avoids cancelling two ``O(1)`` terms when
        ``t >> d``.
        """
        d1 = self.dv(r)
        nu = -0.5 * d1 * self.shifted_dv(r)
        if self.family in (Family.POWER_LOG_PLUS, Family.POWER_LOG_MINUS):
            x = r / self.scale
            c, d = self.params
            t = c * x ** (1.0 - self.mu)
            g = t + d
            big_v = -2.0 * self.mu * t * d / (x * g * self.scale) ** 2
        else:
            d2 = self.d2v(r)
            big_v = -d2 + 0.5 * d1 * d1
        return big_v, nu

    def field(self, n: int) -> conformal.ScalarField:
        """The profile as a radial scalar field on R^n."""
        return conformal.radial(n, self.v, self.dv, self.d2v, self.domain, description=self.describe())

    def describe(self) -> str:
        f, p = self.family, self.params
        s = "r" if self.scale == 1.0 else f"(r/{self.scale:.17g})"
        off = "" if self.offset == 0.0 else f"{self.offset:.17g} + "
        if f is Family.LOG_LINEAR:
            body = f"{p[0]:.17g} + {p[1]:.17g} log {s}"
        elif f is Family.CONSTANT:
            body = f"{p[0]:.17g}"
        elif f is Family.CONST_MINUS_2LOG:
            body = f"{p[0]:.17g} - 2 log {s}"
        elif f is Family.MAX_KINK:
            body = f"max({p[0]:.17g} - 2 log {s}, {p[1]:.17g})"
        else:
            body = f"2/({self.mu:.17g}-1) log({p[0]:.17g} {s}^(1-{self.mu:.17g}) + {p[1]:.17g})"
        return f"{f.value}: v = {off}{body}"


# -- constructors -------------------------------------------------------------

def log_linear(c1: float, c2: float) -> RadialProfile:
    return RadialProfile(Family.LOG_LINEAR, (c1, c2))


def power_log(mu: float, c: float, d: float) -> RadialProfile:
    """``2/(mu-1) log(c r^(1-mu) + d)``; the sign pattern picks the Plus or Minus family."""
    fam = Family.POWER_LOG_PLUS if (c > 0 and d > 0) else Family.POWER_LOG_MINUS
    return RadialProfile(fam, (c, d), mu)


def constant_profile(c: float) -> RadialProfile:
    return RadialProfile(Family.CONSTANT, (c,))


def const_minus_2log(c: float) -> RadialProfile:
    return RadialProfile(Family.CONST_MINUS_2LOG, (c,))


def max_kink(c1: float, c2: float) -> RadialProfile:
    return RadialProfile(Family.MAX_KINK, (c1, c2))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def radial_eigenvalues(p: RadialProfile, r: float, n: int) -> EigenTuple:
    """``exp(-2v) (V, nu, ..., nu)`` sorted descending."""
    if n < 2:
        raise ValueError("n must be >= 2")
    big_v, nu = p.components(r)
    s = math.exp(-2.0 * p.v(r))
    return EigenTuple([s * big_v] + [s * nu] * (n - 1))


@dataclass(frozen=True)
class FamilyCase:
    case: str
    family: Family
    mu: float | None
    constraint: str


def enumerate_families(cone: ConeSpec) -> list[FamilyCase]:
    """Radial boundary-solution families admissible for ``cone``."""
    mp, mm = mu_plus(cone), mu_minus(cone)
    out: list[FamilyCase] = []
    if math.isfinite(mp):
        if abs(mp - 1.0) < MU_ONE_TOL:
            out.append(FamilyCase("a", Family.LOG_LINEAR, 1.0, "C1 + C2 log r with C2 in (-2, 0)"))
        else:
            out.append(FamilyCase("b", Family.POWER_LOG_PLUS, mp,
                                  f"2/(mu-1) log(C3 r^(1-mu) + C4), mu={mp:.12g}, C3 > 0, C4 > 0"))
    if math.isfinite(mm):
        if abs(mm - 1.0) < MU_ONE_TOL:
            out.append(FamilyCase("c", Family.LOG_LINEAR, 1.0,
                                  "C5 + C6 log r with C6 in (-inf, -2) or (0, inf)"))
        else:
            out.append(FamilyCase("d", Family.POWER_LOG_MINUS, mm,
                                  f"2/(mu-1) log(C7 r^(1-mu) + C8), mu={mm:.12g}, C7 * C8 < 0, "
                                  "on the radii where the argument is positive"))
    out.append(FamilyCase("e", Family.CONSTANT, None, "v = C"))
    out.append(FamilyCase("e", Family.CONST_MINUS_2LOG, None, "v = C - 2 log r"))
    return out


@dataclass(frozen=True)
class DirichletAnnulus:
    a: float
    b: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        vals = (self.a, self.b, self.alpha, self.beta)
        if not all(math.isfinite(x) for x in vals):
            raise ValueError("annulus data must be finite")
        if not (0 < self.a < self.b):
            raise ValueError(f"need 0 < a < b, got a={self.a}, b={self.b}")


class Regularity(str, Enum):
    SMOOTH = "Smooth"
    LIPSCHITZ_KINK = "LipschitzKink"
    UNSOLVABLE = "Unsolvable"


@dataclass(frozen=True)
class SolveReport:
    solvable: bool
    regularity: Regularity
    profile: RadialProfile | None
    clause: str
    mu_plus: float
    mu_minus: float
    boundary_residual: float | None = None


def _match_power(mu: float, ratio: float, jump: float) -> tuple[float, float]:
    """Solve ``C + D = 1`` and ``C ratio^(1-mu) + D = exp((mu-1) jump / 2)``."""
    big_b = ratio ** (1.0 - mu)
    target = math.exp((mu - 1.0) * jump / 2.0)
    c = math.expm1((mu - 1.0) * jump / 2.0) / (big_b - 1.0) if big_b != 1.0 else math.nan
    if not math.isfinite(c):
        c = (target - 1.0) / (big_b - 1.0)
    return c, 1.0 - c


def solve_dirichlet(cone: ConeSpec, prob: DirichletAnnulus) -> SolveReport:
    """Radial solution of the boundary equation on ``a < |x| < b`` with ``v(a)=alpha``, ``v(b)=beta``."""
    mp, mm = mu_plus(cone), mu_minus(cone)
    a, alpha = prob.a, prob.alpha
    big_l = math.log(prob.b / prob.a)
    jump = prob.beta - prob.alpha
    ratio = prob.b / prob.a
    end_tol = 1e-12 * (1.0 + abs(prob.alpha) + abs(prob.beta))

    def make(family: Family, params, mu=None) -> RadialProfile:
        return RadialProfile(family, params, mu, offset=alpha, scale=a)

    profile: RadialProfile | None
    if abs(jump) <= end_tol:
        profile, reg, clause = make(Family.CONSTANT, (0.0,)), Regularity.SMOOTH, "beta = alpha: constant solution"
    elif abs(jump + 2.0 * big_l) <= end_tol:
        profile, reg, clause = (make(Family.CONST_MINUS_2LOG, (0.0,)), Regularity.SMOOTH,
                                "beta - alpha = -2 log(b/a): solution alpha - 2 log(r/a)")
    elif -2.0 * big_l < jump < 0.0:
        if math.isfinite(mp):
            reg = Regularity.SMOOTH
            if abs(mp - 1.0) < MU_ONE_TOL:
                profile = make(Family.LOG_LINEAR, (0.0, jump / big_l))
                clause = "beta - alpha inside (-2 log(b/a), 0), mu_plus = 1: log-linear solution"
            else:
                profile = make(Family.POWER_LOG_PLUS, _match_power(mp, ratio, jump), mp)
                clause = "beta - alpha inside (-2 log(b/a), 0), mu_plus finite: power-log solution with C3, C4 > 0"
        else:
            profile, reg = make(Family.MAX_KINK, (0.0, jump)), Regularity.LIPSCHITZ_KINK
            clause = "beta - alpha inside (-2 log(b/a), 0), mu_plus infinite: max(alpha - 2 log(r/a), beta)"
    else:
        side = "> 0" if jump > 0 else "< -2 log(b/a)"
        if math.isfinite(mm):
            reg = Regularity.SMOOTH
            if abs(mm - 1.0) < MU_ONE_TOL:
                profile = make(Family.LOG_LINEAR, (0.0, jump / big_l))
                clause = f"beta - alpha {side}, mu_minus = 1: log-linear solution"
            else:
                profile = make(Family.POWER_LOG_MINUS, _match_power(mm, ratio, jump), mm)
                clause = f"beta - alpha {side}, mu_minus finite: power-log solution with C7 * C8 < 0"
        else:
            return SolveReport(False, Regularity.UNSOLVABLE, None,
                               f"unsolvable: mu_minus = inf and beta - alpha = {jump:.6g} {side}", mp, mm)
    resid = max(abs(profile.v(prob.a) - prob.alpha), abs(profile.v(prob.b) - prob.beta))
    return SolveReport(True, reg, profile, clause, mp, mm, resid)


def dirichlet_predicate(mp: float, mm: float, jump: float, log_ratio: float) -> Regularity:
    """Expected verdict from the solvability statements, independent of the solver."""
    inside_closed = -2.0 * log_ratio <= jump <= 0.0
    inside_open = -2.0 * log_ratio < jump < 0.0
    if not inside_closed and math.isinf(mm):
        return Regularity.UNSOLVABLE
    if inside_open and math.isinf(mp):
        return Regularity.LIPSCHITZ_KINK
    return Regularity.SMOOTH


def lipschitz_approximation(mu: float) -> RadialProfile:
    """Smooth power-log profiles equal to ``2 log 2`` at 1/2 and 0 at 2, tending to ``max(-2 log r, 0)``."""
    if not mu > 1:
        raise ValueError("lipschitz_approximation needs mu > 1")
    q = 2.0 ** (mu - 1.0)
    c = q / (q + 1.0)
    return RadialProfile(Family.POWER_LOG_PLUS, (c, c), mu)


def kelvin_profile(p: RadialProfile, radius: float) -> RadialProfile:
    """Closed form of ``v(R^2 / r) - 2 log(r / R)`` for unscaled power/log-linear profiles."""
    if p.scale != 1.0:
        raise ValueError("kelvin_profile expects an unscaled profile")
    big_r = radius
    if p.family in (Family.POWER_LOG_PLUS, Family.POWER_LOG_MINUS):
        c, d = p.params
        mu = p.mu
        return RadialProfile(p.family, (d * big_r ** (mu - 1.0), c * big_r ** (1.0 - mu)), mu, offset=p.offset)
    if p.family is Family.LOG_LINEAR:
        c1, c2 = p.params
        # c1 + c2 (2 log R - log r) - 2 log r + 2 log R
        return RadialProfile(Family.LOG_LINEAR, (c1 + 2.0 * (c2 + 1.0) * math.log(big_r), -c2 - 2.0),
                             offset=p.offset)
    raise ValueError(f"kelvin_profile does not handle {p.family.value}")


@dataclass(frozen=True)
class MonotonicityReport:
    v_nonincreasing: bool
    v_plus_2log_nondecreasing: bool


def monotonicity_report(p: RadialProfile, grid, tol: float = 1e-10) -> MonotonicityReport:
    """Sampled monotonicity of ``v`` and ``v + 2 log r`` on an increasing grid of radii."""
    r = np.asarray(sorted(float(x) for x in grid))
    vals = np.array([p.v(x) for x in r])
    shifted = vals + 2.0 * np.log(r)
    dv = np.diff(vals)
    ds = np.diff(shifted)
    return MonotonicityReport(bool(np.all(dv <= tol)), bool(np.all(ds >= -tol)))


def boundary_residual(cone: ConeSpec, p: RadialProfile, r: float, n: int) -> float:
    """First-order cone margin at ``lambda(A[v])(r)`` relative to ``1 + |lambda|``."""
    lam = radial_eigenvalues(p, r, n)
    return abs(cone.linear_margin(as_sorted(lam))) / (1.0 + float(np.linalg.norm(lam.values)))
