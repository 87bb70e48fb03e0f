import math

import numpy as np
import pytest

from confhess import cone as C
from confhess import conformal as cf
from confhess import radial as rd
from helpers import radii_in_domain, random_family_profile


def test_trivial_families_have_zero_eigenvalues():
    for p in (rd.constant_profile(0.3), rd.const_minus_2log(-1.0)):
        assert np.allclose(rd.radial_eigenvalues(p, 1.7, 3).values, 0.0, atol=1e-14)


def test_power_log_plus_residual():
    mu = 2.0
    p = rd.power_log(mu, 0.7, 1.3)
    for r in np.geomspace(0.1, 10, 20):
        big_v, nu = p.components(r)
        assert abs(big_v + mu * nu) <= 1e-10 * (1 + abs(big_v) + abs(nu))
        assert nu > 0


def test_radial_formula_matches_full_hessian():
    p = rd.power_log(3.0, 0.5, 2.0)
    field = p.field(4)
    for r in np.geomspace(0.2, 5, 10):
        full = cf.mobius_hessian(field, np.array([r, 0, 0, 0])).eigenvalues.values
        assert np.allclose(full, rd.radial_eigenvalues(p, r, 4).values, atol=1e-9)


def test_kink_refuses_second_derivative():
    p = rd.max_kink(0.0, 0.0)
    assert p.kink == pytest.approx(1.0)
    with pytest.raises(rd.KinkError):
        rd.radial_eigenvalues(p, 1.0, 3)
    assert p.one_sided(1.0) == (-2.0, 0.0)


def test_enumerate_gamma1_n2():
    cases = {c.case for c in rd.enumerate_families(C.GammaK(2, 1))}
    assert cases == {"a", "c", "e"}


def test_enumerate_gamma_k_proper():
    assert {c.case for c in rd.enumerate_families(C.GammaK(5, 2))} == {"b", "e"}
    assert {c.case for c in rd.enumerate_families(C.GammaK(4, 4))} == {"b", "e"}


def test_enumerate_gamma1_n3_includes_d():
    # mu_minus(Gamma_1) = n - 1 is finite, so the minus family is admissible
    assert {c.case for c in rd.enumerate_families(C.GammaK(3, 1))} == {"b", "d", "e"}


@pytest.mark.parametrize("cone", [C.GammaK(2, 1), C.GammaK(3, 1), C.GammaK(4, 2), C.NegDualGammaK(3, 2),
                                  C.Circular(3, 0.3)], ids=lambda c: c.label)
def test_every_family_lies_on_the_cone_boundary(cone):
    rng = np.random.default_rng(11)
    for case in rd.enumerate_families(cone):
        for _ in range(3):
            p = random_family_profile(case, rng)
            for r in radii_in_domain(p, 15):
                big_v, nu = p.components(r)
                if case.mu is not None:
                    assert abs(big_v + case.mu * nu) <= 1e-10 * (1 + abs(big_v) + abs(nu))
                    assert (nu > 0) if case.case in "ab" else (nu < 0)
                assert rd.boundary_residual(cone, p, r, cone.n) <= 1e-9


def test_dirichlet_smooth_log():
    rep = rd.solve_dirichlet(C.GammaK(2, 1), rd.DirichletAnnulus(1.0, math.e, 0.0, -1.0))
    assert rep.regularity is rd.Regularity.SMOOTH
    for r in (1.0, 1.5, 2.0, math.e):
        assert rep.profile.v(r) == pytest.approx(-math.log(r), abs=1e-12)


def test_dirichlet_kink():
    rep = rd.solve_dirichlet(C.NegDualGammaK(3, 2), rd.DirichletAnnulus(0.5, 2.0, 2 * math.log(2), 0.0))
    assert rep.regularity is rd.Regularity.LIPSCHITZ_KINK
    assert rep.profile.kink == pytest.approx(1.0)
    for r in (0.6, 0.9, 1.2, 1.9):
        assert rep.profile.v(r) == pytest.approx(max(-2 * math.log(r), 0.0), abs=1e-12)


def test_dirichlet_unsolvable():
    rep = rd.solve_dirichlet(C.GammaK(3, 2), rd.DirichletAnnulus(1.0, 2.0, 0.0, 1.0))
    assert rep.regularity is rd.Regularity.UNSOLVABLE
    assert "mu_minus = inf" in rep.clause


def test_dirichlet_input_errors():
    with pytest.raises(ValueError):
        rd.DirichletAnnulus(2.0, 1.0, 0.0, 0.0)


def test_dirichlet_sensitivity_is_continuous():
    cone = C.GammaK(4, 1)
    base = rd.solve_dirichlet(cone, rd.DirichletAnnulus(1.0, 3.0, 0.0, -1.0)).profile.params
    for db in (1e-3, -1e-3):
        other = rd.solve_dirichlet(cone, rd.DirichletAnnulus(1.0, 3.0, 0.0, -1.0 + db)).profile.params
        assert max(abs(x - y) for x, y in zip(base, other)) <= 10 * abs(db)


def test_lipschitz_approximation_boundary_values_and_direction():
    for mu in (2.0, 5.0):
        p = rd.lipschitz_approximation(mu)
        assert p.v(0.5) == pytest.approx(2 * math.log(2), abs=1e-12)
        assert p.v(2.0) == pytest.approx(0.0, abs=1e-12)
        for r in np.linspace(0.55, 1.95, 9):
            lam = rd.radial_eigenvalues(p, r, 3).values
            # e^{-2v}(V, nu, nu) with V = -mu nu: one negative entry, ratio -mu
            assert lam[-1] < 0 < lam[0]
            assert lam[-1] / lam[0] == pytest.approx(-mu, rel=1e-10)
    with pytest.raises(ValueError):
        rd.lipschitz_approximation(1.0)


def test_lipschitz_sup_decreases():
    grid = np.linspace(0.5, 2.0, 2001)
    sups = [max(abs(rd.lipschitz_approximation(mu).v(r) - max(-2 * math.log(r), 0)) for r in grid)
            for mu in (2, 5, 10, 50)]
    assert all(a > b for a, b in zip(sups, sups[1:]))


def test_monotonicity_examples():
    grid = np.geomspace(0.1, 10, 200)
    rep = rd.monotonicity_report(rd.max_kink(0.0, 0.0), grid)
    assert rep.v_nonincreasing and rep.v_plus_2log_nondecreasing
    assert rd.monotonicity_report(rd.power_log(3.0, 1.0, 1.0), grid).v_nonincreasing
    rep = rd.monotonicity_report(rd.log_linear(0.0, -1.0), grid)
    assert rep.v_nonincreasing and rep.v_plus_2log_nondecreasing


@pytest.mark.parametrize("profile", [rd.power_log(2.5, 0.4, 1.1), rd.power_log(0.5, 0.4, 1.1),
                                     rd.log_linear(0.3, -0.6)], ids=["mu2.5", "mu0.5", "loglin"])
def test_kelvin_profile_matches_evaluator(profile):
    big_r = 1.7
    k = rd.kelvin_profile(profile, big_r)
    assert k.case == profile.case
    assert k.mu == profile.mu
    for r in np.geomspace(0.2, 5, 10):
        assert k.v(r) == pytest.approx(profile.v(big_r ** 2 / r) - 2 * math.log(r / big_r), abs=1e-12)


@pytest.mark.parametrize("profile", [rd.power_log(2.0, 0.7, 1.3), rd.power_log(0.4, -1.0, 1.0),
                                     rd.power_log(3.5, 1.8, 1.0), rd.log_linear(0.2, -0.7)],
                         ids=["plus2", "minus0.4", "plus3.5", "loglin"])
def test_stable_components_match_naive_formula(profile):
    lo, hi = profile.domain
    for r in np.geomspace(max(lo * 1.2, 0.1), min(hi / 1.2, 10.0), 25):
        d1, d2 = profile.dv(r), profile.d2v(r)
        big_v, nu = profile.components(r)
        assert big_v == pytest.approx(-d2 + 0.5 * d1 * d1, rel=1e-9, abs=1e-12)
        assert nu == pytest.approx(-d1 / r - 0.5 * d1 * d1, rel=1e-9, abs=1e-12)
        assert profile.shifted_dv(r) == pytest.approx(d1 + 2 / r, rel=1e-9, abs=1e-12)
