"""Linear dictionary between Schouten and Ricci eigenvalues.

For ``n >= 3`` the Ricci eigenvalues of a metric are ``T lambda`` where
``lambda`` are the Schouten eigenvalues and ``T = (n-2) I + e e^T``.
The inverse is ``(I - e e^T / (2(n-1))) / (n-2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import conformal
from .cone import ConeSpec, EigenTuple, Gauge
from .symfun import SymFun, g_p, lambda_pq


def _check_n(n: int) -> None:
    if n < 3:
        raise ValueError("the Schouten/Ricci dictionary needs n >= 3")


def forward_matrix(n: int) -> np.ndarray:
    _check_n(n)
    return (n - 2) * np.eye(n) + np.ones((n, n))


def inverse_matrix(n: int) -> np.ndarray:
    _check_n(n)
    return (np.eye(n) - np.ones((n, n)) / (2.0 * (n - 1))) / (n - 2)


def _raw(lam) -> np.ndarray:
    return np.asarray(lam.values if isinstance(lam, EigenTuple) else lam, dtype=float).ravel()


def schouten_to_ricci(lam) -> EigenTuple:
    x = _raw(lam)
    _check_n(x.size)
    return EigenTuple((x.size - 2) * x + x.sum())


def ricci_to_schouten(lam) -> EigenTuple:
    x = _raw(lam)
    n = x.size
    _check_n(n)
    return EigenTuple((x - x.sum() / (2.0 * (n - 1))) / (n - 2))


@dataclass(frozen=True)
class ConvertedPair:
    f: SymFun
    cone: ConeSpec


def convert_pair(f_hat: SymFun, cone_hat: ConeSpec) -> ConvertedPair:
    """``f(l) = f_hat(T l)`` on ``Gamma = T^-1 Gamma_hat``."""
    n = f_hat.n
    _check_n(n)
    if cone_hat.n != n:
        raise ValueError("dimension mismatch between function and cone")

    def fn(lam):
        return f_hat(schouten_to_ricci(lam))

    grad = None
    if f_hat.grad_fn is not None:
        t = forward_matrix(n)

        def grad(lam):
            # T is symmetric and commutes with permutations, so sorted order is kept
            return t @ f_hat.gradient(schouten_to_ricci(lam).values)

    def margin(lam):
        return cone_hat.margin(schouten_to_ricci(lam).values)

    witness = tuple(ricci_to_schouten(np.ones(n)).values)
    cone = Gauge(n, margin, f"T^-1 {cone_hat.label}", witness)
    return ConvertedPair(SymFun(n, fn, grad, cone, f_hat.degree, f"{f_hat.name} o T", f_hat.shape), cone)


# ---------------------------------------------------------------------------
# constants for the bubble
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantCheck:
    example: str
    n: int
    a: float
    b: float
    constraint: str
    constraint_value: float
    constraint_met: bool
    value: float
    passed: bool | None  # None when the constraint is violated: report the value only


def _constraint(example: str, n: int, i: int, j: int, p: int) -> tuple[str, float]:
    if example == "ricci-single":
        return "4(n-1) b^2/a^2", 4.0 * (n - 1)
    if example == "ricci-range":
        return "4(n-1)(j-i+1) b^2/a^2", 4.0 * (n - 1) * (j - i + 1)
    if example == "weitzenboeck":
        return "2p(n-p) b^2/a^2", 2.0 * p * (n - p)
    raise ValueError(f"unknown example {example!r}")


def constraint_ratio(example: str, n: int, i: int = 2, j: int | None = None, p: int = 1) -> float:
    """``b/a`` that makes the example's constraint equal to 1."""
    _, k = _constraint(example, n, i, n if j is None else j, p)
    return 1.0 / math.sqrt(k)


def bubble_constants(example: str, n: int, a: float, b: float, i: int = 2, j: int | None = None, p: int = 1,
                     x=None, seed: int = 0) -> ConstantCheck:
    """Evaluate an example's curvature quantity on the bubble ``log(a / (1 + b^2 |x|^2))``.

    ``ricci-single``: ``l_i`` of the Ricci eigenvalues.
    ``ricci-range``:  ``l_i + ... + l_j`` of the Ricci eigenvalues.
    ``weitzenboeck``: ``G_p`` of the Schouten eigenvalues.
    """
    _check_n(n)
    j = n if j is None else j
    label, k = _constraint(example, n, i, j, p)
    cval = k * b * b / (a * a)
    met = abs(cval - 1.0) <= 1e-9
    v = conformal.bubble(n, a, b)
    if x is None:
        x = np.random.default_rng(seed).normal(size=n)
    schouten = conformal.mobius_hessian(v, x).eigenvalues
    if example == "weitzenboeck":
        value = g_p(n, p)(schouten)
    else:
        ric = schouten_to_ricci(schouten)
        hi = i if example == "ricci-single" else j
        value = lambda_pq(n, i, hi - i)(ric)
    return ConstantCheck(example, n, a, b, label, cval, met, float(value),
                         (abs(value - 1.0) <= 1e-9) if met else None)


__all__ = ["forward_matrix", "inverse_matrix", "schouten_to_ricci", "ricci_to_schouten", "ConvertedPair",
           "convert_pair", "ConstantCheck", "constraint_ratio", "bubble_constants"]
