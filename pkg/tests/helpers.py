"""Random fields and Moebius maps shared by the conformal and acceptance tests."""

import numpy as np

from confhess import conformal as cf


def random_rotation(n, rng):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_field(n, rng):
    kind = rng.integers(3)
    if kind == 0:
        return cf.bubble(n, rng.uniform(0.5, 2.0), rng.uniform(0.5, 1.5), rng.normal(scale=0.5, size=n))
    if kind == 1:
        q = rng.normal(scale=0.3, size=(n, n))
        return cf.polynomial(rng.normal(), rng.normal(scale=0.5, size=n), q + q.T)
    t = rng.normal(scale=0.1, size=(n, n, n))
    return cf.polynomial(rng.normal(), rng.normal(scale=0.5, size=n), np.eye(n) * rng.normal(), t)


def random_generator(n, rng, kind=None):
    kind = rng.integers(4) if kind is None else kind
    if kind == 0:
        return cf.translation(rng.normal(scale=0.5, size=n))
    if kind == 1:
        return cf.Dilation(float(rng.uniform(0.5, 2.0)))
    if kind == 2:
        return cf.rotation(random_rotation(n, rng))
    return cf.Inversion()


def random_map(n, rng, depth=3, kind=None):
    steps = tuple(random_generator(n, rng, kind) for _ in range(depth))
    return cf.MobiusMap(n, steps)


def safe_point(phi, n, rng):
    """A point whose orbit under ``phi`` stays well away from every inversion center."""
    while True:
        x = rng.normal(size=n)
        y = x.copy()
        ok = True
        for g in phi.steps:
            if isinstance(g, cf.Inversion) and (np.linalg.norm(y) < 0.3 or np.linalg.norm(y) > 3.0):
                ok = False
                break
            y = g.jet(y).y
        if ok and np.linalg.norm(y) < 5.0:
            return x


def random_family_profile(case, rng):
    """Random admissible (profile, cone-exponent) pair for one Lemma-style family case."""
    from confhess import radial as rd

    fam = case.family
    if fam is rd.Family.LOG_LINEAR:
        c1 = rng.normal()
        c2 = rng.uniform(-1.95, -0.05) if case.case == "a" else rng.choice([-1, 1]) * rng.uniform(0.05, 3) + (
            -2.0 if rng.random() < 0.5 else 0.0)
        if case.case == "c" and -2 <= c2 <= 0:
            c2 = -2.5 if c2 < -1 else 0.5
        return rd.log_linear(c1, c2)
    if fam is rd.Family.POWER_LOG_PLUS:
        return rd.power_log(case.mu, rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0))
    if fam is rd.Family.POWER_LOG_MINUS:
        c = rng.uniform(0.1, 3.0) * rng.choice([-1, 1])
        return rd.power_log(case.mu, c, -np.sign(c) * rng.uniform(0.1, 3.0))
    if fam is rd.Family.CONSTANT:
        return rd.constant_profile(rng.normal())
    return rd.const_minus_2log(rng.normal())


def radii_in_domain(profile, count=100):
    lo, hi = profile.domain
    hi = hi / 1.05 if np.isfinite(hi) else max(1e2, 100 * lo)
    lo = lo * 1.05 if lo > 0 else min(1e-2, hi / 100)
    return np.geomspace(lo, min(hi, 100 * lo) if lo > 1 else hi, count)


def ode_grid(count=100, seed=2024, margin=0.1):
    """Seeded (gamma, v0, w0) points at least ``margin`` away from the existence-clause boundaries."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        g, v0, w0 = rng.uniform(-4, 3), rng.uniform(-1, 1), rng.uniform(-2, 2)
        if abs(g + 1) < margin or abs(g - 1) < margin:
            continue
        if w0 != 0 and abs(g - (-1 - 2 * np.exp(2 * v0) / w0 ** 2)) < margin:
            continue
        out.append((float(g), float(v0), float(w0)))
    return out
