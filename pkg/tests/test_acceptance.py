"""Acceptance criteria 1-14.  Each test prints one PASS/FAIL line and fails when any sub-check fails.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline; they are
also collected in the "acceptance criteria" section of the terminal summary.
"""

import math
import time

import numpy as np

from confhess import cone as C
from confhess import conformal as cf
from confhess import counterex as cx
from confhess import radial as rd
from confhess import ricci as rc
from confhess import symfun as sf
from helpers import ode_grid, radii_in_domain, random_family_profile, random_map, safe_point

# recorded values for the quantities whose thresholds are computed, not given
LIPSCHITZ_SUP_MU50 = 0.028291721655507897      # 2/(mu-1) log(2q/(q+1)), q = 2^(mu-1), attained at r = 1
NONBUBBLE_TRACELESS_N3 = math.sqrt(2.0 / 3.0)  # min over the window of |A - tr(A)/n I|, n = 3


def test_criterion_01_bubble_identity(verdict):
    v = verdict(1, "bubble identity")
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst_an = worst_fd = 0.0
    for n in range(2, 7):
        for _ in range(20):
            a, b = rng.uniform(1.0, 2.0), rng.uniform(0.5, 1.5)
            center = rng.normal(size=n)
            x = center + rng.uniform(-1, 1) * rng.normal(size=n) / math.sqrt(n)
            field = cf.bubble(n, a, b, center)
            target = 2 * b * b / (a * a) * np.eye(n)
            worst_an = max(worst_an, np.linalg.norm(cf.mobius_hessian(field, x).matrix - target, 2))
            fd = cf.mobius_hessian(field.without_derivatives(), x).matrix
            worst_fd = max(worst_fd, np.linalg.norm(fd - target, 2))
    elapsed = time.perf_counter() - start
    v.check("analytic <= 1e-9", worst_an <= 1e-9, f"{worst_an:.2e}")
    v.check("FD <= 1e-5", worst_fd <= 1e-5, f"{worst_fd:.2e}")
    v.check("runtime < 1 s", elapsed < 1.0, f"{elapsed:.2f}s")
    v.finish()


def test_criterion_02_cone_table(verdict):
    v = verdict(2, "Gamma_k table")
    start = time.perf_counter()
    plus_err, agree_err, finite_minus = 0.0, 0.0, []
    for n in range(2, 9):
        for k in range(1, n + 1):
            cone = C.GammaK(n, k)
            closed_p, bis_p = C.mu_plus(cone, "closed"), C.mu_plus(cone, "bisect")
            plus_err = max(plus_err, abs(closed_p - (n - k) / k), abs(bis_p - closed_p))
            closed_m, bis_m = C.mu_minus(cone, "closed"), C.mu_minus(cone, "bisect")
            if math.isinf(closed_m) != math.isinf(bis_m):
                agree_err = math.inf
            elif math.isfinite(closed_m):
                agree_err = max(agree_err, abs(closed_m - bis_m))
            if not math.isinf(closed_m):
                finite_minus.append(f"(n={n},k={k})->{closed_m:g}")
    elapsed = time.perf_counter() - start
    v.check("mu_plus = (n-k)/k, bisection within 1e-8", plus_err <= 1e-8, f"{plus_err:.1e}")
    v.check("mu_minus bisection agrees with closed form", agree_err <= 1e-8, f"{agree_err:.1e}")
    v.check("mu_minus = +inf for all k", not finite_minus,
            f"finite for {len(finite_minus)} cones, e.g. {', '.join(finite_minus[:3])}")
    v.check("runtime < 1 s", elapsed < 1.0, f"{elapsed:.2f}s")
    v.finish()


def _random_cone(rng):
    n = int(rng.integers(2, 7))
    kind = rng.integers(8)
    if kind == 0:
        return C.GammaK(n, int(rng.integers(1, n + 1)))
    if kind == 1:
        return C.NegDualGammaK(n, int(rng.integers(1, n + 1)))
    if kind == 2:
        return C.OrderedLinear(n, tuple(float(w) for w in rng.uniform(0.1, 3.0, size=n)))
    if kind == 3:
        return C.Circular(n, float(rng.uniform(-0.9, 0.9)))
    if kind == 4:
        return C.ExtremalLargest(n, float(rng.uniform(0, 4)))
    if kind == 5:
        return C.ExtremalSmallest(n, float(rng.uniform(0.05, 4)))
    if kind == 6:
        return C.negation_dual(C.Circular(n, float(rng.uniform(-0.9, 0.9))))
    return C.negation_dual(C.OrderedLinear(n, tuple(float(w) for w in rng.uniform(0.1, 3.0, size=n))))


def test_criterion_03_duality(verdict):
    v = verdict(3, "negation duality swaps mu")
    rng = np.random.default_rng(3)
    worst, mismatched = 0.0, []
    for _ in range(50):
        cone = _random_cone(rng)
        a = C.mu_plus(cone, "bisect")
        b = C.mu_minus(C.negation_dual(cone), "bisect")
        if math.isinf(a) or math.isinf(b):
            if a != b:
                mismatched.append(cone.label)
        else:
            worst = max(worst, abs(a - b))
    v.check("|mu+(G) - mu-(Phi(G))| <= 1e-8", worst <= 1e-8, f"{worst:.1e} over 50 cones")
    v.check("infinite values agree", not mismatched, ", ".join(mismatched))
    v.finish()


def test_criterion_04_mobius_invariance(verdict):
    from helpers import random_field
    v = verdict(4, "Moebius invariance")
    rng = np.random.default_rng(4)
    worst, inversions = 0.0, 0
    for _ in range(100):
        n = int(rng.integers(2, 6))
        field = random_field(n, rng)
        phi = random_map(n, rng, depth=3)
        if not any(isinstance(g, cf.Inversion) for g in phi.steps):
            phi = cf.MobiusMap(n, phi.steps[:1] + (cf.Inversion(),) + phi.steps[2:])
        inversions += sum(isinstance(g, cf.Inversion) for g in phi.steps)
        x = safe_point(phi, n, rng)
        lhs = cf.mobius_hessian(cf.apply_mobius(field, phi), x).eigenvalues.values
        rhs = cf.mobius_hessian(field, phi(x)).eigenvalues.values
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    v.check("max |lambda(A[v^phi])(x) - lambda(A[v])(phi x)| <= 1e-7", worst <= 1e-7, f"{worst:.1e}")
    v.check("inversions exercised", inversions >= 100, f"{inversions} inversions")
    v.finish()


RADIAL_CONES = [C.GammaK(2, 1), C.GammaK(3, 1), C.GammaK(4, 2), C.GammaK(3, 3), C.NegDualGammaK(3, 2),
                C.Circular(3, 0.3), C.ExtremalLargest(3, 0.5), C.ExtremalSmallest(4, 2.0)]


def test_criterion_05_radial_classification(verdict):
    v = verdict(5, "radial families on the cone boundary")
    rng = np.random.default_rng(5)
    worst, wrong_sign, cases = 0.0, [], set()
    for cone in RADIAL_CONES:
        for case in rd.enumerate_families(cone):
            cases.add(case.case)
            for _ in range(10):
                p = random_family_profile(case, rng)
                for r in radii_in_domain(p, 100):
                    big_v, nu = p.components(r)
                    if case.mu is None:
                        worst = max(worst, abs(big_v), abs(nu))
                        continue
                    worst = max(worst, abs(big_v + case.mu * nu) / (1 + abs(big_v) + abs(nu)))
                    if not ((nu > 0) if case.case in "ab" else (nu < 0)):
                        wrong_sign.append((cone.label, case.case, r))
    v.check("|V + mu nu| <= 1e-10", worst <= 1e-10, f"{worst:.1e}")
    v.check("nu sign matches the case", not wrong_sign, f"{len(wrong_sign)} sign errors")
    v.check("cases a-e all exercised", cases == set("abcde"), "".join(sorted(cases)))
    v.finish()


DIRICHLET_CLASSES = {
    "(1,1)": C.GammaK(2, 1),
    "(finite,finite)": C.GammaK(3, 1),
    "(finite,inf)": C.GammaK(3, 2),
    "(inf,finite)": C.NegDualGammaK(3, 2),
    "(inf,inf)": C.OrderedLinear(3, (0.0, 1.0, 0.0)),
}


def test_criterion_06_dirichlet_matrix(verdict):
    v = verdict(6, "Dirichlet decision matrix")
    mismatches, worst_end, worst_in, counts = [], 0.0, 0.0, {}
    for label, cone in DIRICHLET_CLASSES.items():
        mp, mm = C.mu_plus(cone), C.mu_minus(cone)
        for jump in np.linspace(-6.0, 2.0, 21):
            for big_l in np.linspace(0.1, 3.0, 21):
                prob = rd.DirichletAnnulus(1.0, math.exp(big_l), 0.0, float(jump))
                rep = rd.solve_dirichlet(cone, prob)
                expect = rd.dirichlet_predicate(mp, mm, float(jump), float(big_l))
                counts[rep.regularity.value] = counts.get(rep.regularity.value, 0) + 1
                if rep.regularity is not expect:
                    mismatches.append((label, jump, big_l, rep.regularity.value, expect.value))
                if not rep.solvable:
                    continue
                worst_end = max(worst_end, rep.boundary_residual)
                kink = rep.profile.kink
                for r in np.geomspace(prob.a, prob.b, 23)[1:-1]:
                    if kink is not None and abs(r - kink) <= 1e-9 * kink:
                        continue
                    worst_in = max(worst_in, rd.boundary_residual(cone, rep.profile, float(r), cone.n))
    v.check("verdict matches predicate", not mismatches, f"{len(mismatches)} mismatches of 2205")
    v.check("boundary residual <= 1e-12", worst_end <= 1e-12, f"{worst_end:.1e}")
    v.check("interior cone-boundary residual <= 1e-9", worst_in <= 1e-9, f"{worst_in:.1e}")
    v.check("all verdicts occur", len(counts) == 3, str(dict(sorted(counts.items()))))
    v.finish()


def test_criterion_07_lipschitz_limit(verdict):
    v = verdict(7, "Lipschitz limit")
    grid = np.linspace(0.5, 2.0, 30001)
    sups = []
    for mu in (2.0, 5.0, 10.0, 50.0):
        p = rd.lipschitz_approximation(mu)
        sups.append(max(abs(p.v(r) - max(-2 * math.log(r), 0.0)) for r in grid))
    v.check("strictly decreasing", all(a > b for a, b in zip(sups, sups[1:])),
            ", ".join(f"{s:.6f}" for s in sups))
    v.check("matches recorded value at mu=50", abs(sups[-1] - LIPSCHITZ_SUP_MU50) <= 1e-9, f"{sups[-1]:.10f}")
    v.check("< 0.02 at mu=50", sups[-1] < 0.02, f"{sups[-1]:.6f}")
    v.finish()


def test_criterion_08_ode_oracle(verdict):
    v = verdict(8, "ODE existence oracle")
    start = time.perf_counter()
    disagree, worst = [], 0.0
    kinds = {"Global": 0, "FiniteTime": 0}
    for g, v0, w0 in ode_grid(100):
        setup = cx.OdeSetup(g, v0, w0)
        traj = cx.integrate_ode(setup, window=200.0, threshold=1e8)
        expect = cx.existence_predicate(setup)
        kinds[expect.value] += 1
        if traj.verdict is not expect:
            disagree.append((g, v0, w0))
        worst = max(worst, traj.drift)
    elapsed = time.perf_counter() - start
    v.check("predicate matches integration", not disagree, f"{len(disagree)} disagreements; {kinds}")
    v.check("first-integral drift <= 1e-6", worst <= 1e-6, f"{worst:.1e}")
    v.check("runtime < 30 s", elapsed < 30.0, f"{elapsed:.1f}s")
    v.finish()


def test_criterion_09_nonbubble(verdict):
    v = verdict(9, "non-bubble entire solution")
    xs = np.linspace(-3.0, 3.0, 601)
    for s in (0.5, 1.0):
        nb = cx.nonbubble_entire(s, 3)
        res = max(nb.residual(x) for x in xs)
        dist = min(nb.traceless_norm(x) for x in xs)
        v.check(f"s={s:g}: |f0 - 1| <= 1e-6", res <= 1e-6, f"{res:.1e}")
        v.check(f"s={s:g}: distance to cI > 0.1", dist > 0.1, f"{dist:.10f}")
        v.check(f"s={s:g}: distance matches recorded value", abs(dist - NONBUBBLE_TRACELESS_N3) <= 1e-6)
    v.finish()


def test_criterion_10_gradient_blowup(verdict):
    v = verdict(10, "gradient blow-up, n=4")
    devs, worst_id = [], 0.0
    for j in (5, 10, 20):
        fam = cx.gradient_blowup("neg-sigma-half", 4, j, samples=100)
        vals = fam.report.values
        worst_id = max(worst_id, vals["identity_residual"])
        devs.append(vals["sup_deviation"])
        v.check(f"j={j}: min grad on B_1/2 >= j", vals["min_grad_half_ball"] >= j, f"{vals['min_grad_half_ball']:.4g}")
    v.check("c_4 = 24", cx.c_n(4) == 24.0)
    v.check("identity <= 1e-8", worst_id <= 1e-8, f"{worst_id:.1e}")
    v.check("sup deviation decreasing", devs[0] > devs[1] > devs[2], ", ".join(f"{d:.1e}" for d in devs))
    v.finish()


def test_criterion_11_gauge(verdict):
    v = verdict(11, "gauge construction")
    n, c = 3, 0.4
    base = sf.circular(n, c)
    level = sf.level_set_from_symfun(base)
    f = sf.gauge_from_level_set(level)
    pts = sf.boundary_points(level, 100, seed=11)
    on_v = max(abs(f(p) - 1.0) for p in pts)
    rng = np.random.default_rng(11)
    hom = 0.0
    for lam in C.sample_interior(C.Circular(n, c), 100, rng):
        for t in (0.5, 2.0):
            hom = max(hom, abs(f(t * lam) - t * f(lam)) / abs(t * f(lam)))
    normal = max(sf.normal_identity_check(f, level, p) for p in pts)
    on_gamma = max(abs(f(p)) for p in C.sample_boundary(C.Circular(n, c), 50, rng))
    v.check("f = 1 on boundary of V", on_v <= 1e-8, f"{on_v:.1e}")
    v.check("homogeneity", hom <= 1e-10, f"{hom:.1e}")
    v.check("normal identity FD residual <= 1e-5", normal <= 1e-5, f"{normal:.1e}")
    v.check("f = 0 on boundary of Gamma(V)", on_gamma <= 1e-8, f"{on_gamma:.1e}")
    v.finish()


def test_criterion_12_convex_extension(verdict):
    from confhess.numerics import fd_gradient
    v = verdict(12, "convex extension, Gamma_1, delta=1")
    n, delta = 3, 1.0
    ext = sf.convex_extend(sf.sigma_k(n, 1), C.GammaK(n, 1), delta, normal_count=10_000)
    rng = np.random.default_rng(12)
    violations = 0
    for _ in range(10_000):
        a, b = rng.normal(size=(2, n)) * 2
        if ext((a + b) / 2) > (ext(a) + ext(b)) / 2 + 1e-10:
            violations += 1
    closed, min_partial = 0.0, math.inf
    for lam in rng.normal(size=(300, n)):
        if lam.sum() >= -1e-3:
            continue
        closed = max(closed, abs(ext(lam) - delta * lam.sum() / math.sqrt(n)))
        min_partial = min(min_partial, float(np.min(fd_gradient(ext, lam))))
    v.check("midpoint convexity, 1e4 segments", violations == 0, f"{violations} violations")
    v.check("half-space closed form", closed <= 1e-10, f"{closed:.1e}")
    v.check("FD partials >= 1e-3 outside", min_partial >= 1e-3, f"{min_partial:.4f}")
    v.finish()


def test_criterion_13_ricci(verdict):
    v = verdict(13, "Ricci dictionary")
    rng = np.random.default_rng(13)
    rt = 0.0
    for _ in range(200):
        n = int(rng.integers(3, 9))
        lam = rng.normal(scale=10, size=n)
        back = rc.forward_matrix(n) @ (rc.inverse_matrix(n) @ lam)
        rt = max(rt, float(np.max(np.abs(back - lam))) / (1 + np.abs(lam).max()))
    v.check("T round trip <= 1e-12", rt <= 1e-12, f"{rt:.1e}")
    for n in (3, 4, 5):
        chk = rc.bubble_constants("ricci-single", n, 1.3, 1.3 * rc.constraint_ratio("ricci-single", n))
        v.check(f"ricci-single n={n}", bool(chk.passed), f"{chk.value:.12f}")
    for n, i, j in ((4, 2, 4), (5, 3, 5)):
        chk = rc.bubble_constants("ricci-range", n, 0.8, 0.8 * rc.constraint_ratio("ricci-range", n, i, j), i=i, j=j)
        v.check(f"ricci-range n={n} i={i} j={j}", bool(chk.passed), f"{chk.value:.12f}")
    chk = rc.bubble_constants("weitzenboeck", 4, 1.0, rc.constraint_ratio("weitzenboeck", 4, p=2), p=2)
    v.check("weitzenboeck n=4 p=2", bool(chk.passed), f"value {chk.value:.12f}")
    v.finish()


def test_criterion_14_singular_profiles(verdict):
    v = verdict(14, "singular profiles")
    sp = cx.singular_profile("log-positive", alpha=1.0)
    radii = math.exp(-20) * np.array([0.999, 0.5, 1e-3, 1e-20, 1e-100])
    top = max(sp.profile.v(r) for r in radii)
    v.check("v < -20 below e^-20 (alpha=1)", top < -20, f"max v = {top:.4f}")
    worst = 0.0
    for a in (0.0, 0.7, -1.2):
        for mu in (2.0, 3.5):
            p = cx.singular_profile("power-shifted", mu=mu, a=a).profile
            worst = max(worst, abs(p.v(1e-8) + 2 * math.log(1e-8) - a))
    v.check("|v + 2 log r - a| <= 1e-6 at r=1e-8", worst <= 1e-6, f"{worst:.1e}")
    displayed = {
        ("log-positive", 1.0, None): (1.0, -1.0),
        ("log-negative", -1.0, None): (-1.0, 1.0),
        ("power-minus", None, 0.5): (0.5, -1.0),
        ("power-plus", None, 0.5): (-0.5, 1.0),
        ("power-shifted", None, 2.0): (-2.0, 1.0),
    }
    pattern_err, bad_dir, bad_c = 0.0, [], []
    for (kind, alpha, mu), direction in displayed.items():
        prof = cx.singular_profile(kind, alpha=alpha, mu=mu)
        if prof.direction != direction:
            bad_dir.append(kind)
        lo, hi = prof.profile.domain
        for r in np.geomspace(max(lo * 1.01, 1e-8), min(hi / 1.01, 1e3), 100):
            pattern_err = max(pattern_err, prof.pattern_residual(r, 4))
            if not prof.coefficient(r) > 0:
                bad_c.append((kind, r))
    v.check("directions as displayed", not bad_dir, ", ".join(bad_dir))
    v.check("lambda = C(r) * direction", pattern_err <= 1e-10, f"{pattern_err:.1e}")
    v.check("C(r) > 0", not bad_c, f"{len(bad_c)} non-positive")
    v.finish()
