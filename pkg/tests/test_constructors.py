import math

import numpy as np
import pytest

from warpsol import constructors as cons
from warpsol import expr as ex
from warpsol import geometry as geo
from warpsol import numerics as nm
from warpsol import soliton as so
from warpsol.errors import CriticalPointError, ParamError


# -- one fiber ------------------------------------------------------------------

@pytest.mark.parametrize("h, interval", [("exp(s)", (-1, 1)), ("cos(s)", (-1.4, 1.4)),
                                         ("1 + s^2", (-2, 2))])
def test_one_fiber_integration_constants(h, interval):
    g = nm.Grid(*interval, 501)
    sp_ = cons.one_fiber_soliton(h, 2.0, 5, g, quad_const=0.7, f_const=-1.25)
    f0, f1 = nm.derivatives(sp_.f, g, 1)
    h0 = ex.evaluate(ex.parse(h), g.a)
    assert f0[0] == -1.25
    assert f1[0] == pytest.approx(0.7 * h0, rel=1e-14)
    assert sp_.meta["path"] == "closed"


def test_one_fiber_f_is_consistent_with_its_derivative():
    g = nm.Grid(-1, 1, 2001)
    sp_ = cons.one_fiber_soliton("cos(s)", 1.0, 4, g, quad_const=0.3)
    f0, f1 = nm.derivatives(sp_.f, g, 1)
    fd = nm.fd_derivative(f0, g.step, 1)
    assert nm.max_abs(fd - f1) < 1e-5


def test_one_fiber_lambda_ode_cross_check():
    g = nm.Grid(-1.4, 1.4, 1001)
    sp_ = cons.one_fiber_soliton("cos(s)", 2.0, 4, g, quad_const=0.3)
    rep = cons.lambda_ode_residuals(sp_)
    assert 500 in rep.excluded  # h' = 0 at s = 0
    assert rep.max_norm < 1e-8


def test_one_fiber_sampled_path_tracks_closed_path():
    g = nm.Grid(-2, 2, 2001)
    closed = cons.one_fiber_soliton("1 + s^2", 2.0, 4, g, 0.1, 0.2)
    vals = nm.SampledFunction(g, 1 + g.points ** 2)
    sampled = cons.one_fiber_soliton(nm.Sampled(vals), 2.0, 4, g, 0.1, 0.2)
    assert sampled.meta["path"] == "sampled"
    for a, b in [(closed.f, sampled.f), (closed.lam, sampled.lam)]:
        diff = nm.derivatives(a, g, 0)[0] - nm.derivatives(b, g, 0)[0]
        assert nm.max_abs(diff) < 1e-4
    assert so.soliton_residuals(sampled).max_norm < 1e-4


def test_one_fiber_rejects_small_dimension():
    with pytest.raises(ParamError):
        cons.one_fiber_soliton("1 + s^2", 0.0, 2, nm.Grid(0, 1, 11))


# -- example family ---------------------------------------------------------------

@pytest.mark.parametrize("dims, n, C, L2", [((1, 2), 4, 5, 2), ((1, 2, 3), 7, 14, 20),
                                             ((2, 2), 5, 6, 4)])
def test_example_constants(dims, n, C, L2):
    c = cons.example_constants(dims)
    assert (c["n"], c["C"], c["L2"]) == (n, C, L2)
    assert c["eps"] == pytest.approx(math.pi / (2 * math.sqrt(L2)))


@pytest.mark.parametrize("dims", [(1, 2), (1, 2, 3), (3, 1), (2, 1, 1, 2)])
def test_example_family_solves_and_stays_inside(dims):
    sp_ = cons.example_family(dims)
    assert sp_.all_closed
    assert so.soliton_residuals(sp_).max_norm < 1e-9
    eps = cons.example_constants(dims)["eps"]
    assert sp_.grid.b == pytest.approx(0.9 * eps)
    assert sp_.meta["dims"] == list(dims)


@pytest.mark.parametrize("dims, margin", [((3,), 0.9), ((1, 2), 1.0), ((1, 2), 0.0), ((1,), 0.5), ((), 0.5)])
def test_example_family_rejects(dims, margin):
    with pytest.raises(ParamError):
        cons.example_family(dims, margin)


def test_example_family_is_not_harmonic_weyl():
    rep = so.harmonic_weyl_residuals(cons.example_family((1, 2, 3)))
    assert len(rep.residuals) == 3
    assert not rep.passed


# -- rigid ----------------------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    dict(n=3, r1=1, slope=1, offset=1, lambda0=1),
    dict(n=5, r1=1, slope=1, offset=1, lambda0=1),
    dict(n=5, r1=4, slope=1, offset=1, lambda0=1),
    dict(n=5, r1=2, slope=0, offset=1, lambda0=1),
    dict(n=5, r1=3, slope=1, offset=1, lambda0=1),  # r2 = 1 needs lambda0 = 0
])
def test_rigid_params_validation(kwargs):
    with pytest.raises(ParamError):
        cons.RigidParams(**kwargs)


def test_rigid_product_structure():
    params = cons.RigidParams(7, 3, 2.0, 1.0, 0.8, constant=0.5)
    sp_ = cons.rigid_product(params, nm.Grid(0, 1, 101))
    assert params.mu1 == 8.0 and params.mu2 == 0.8 and params.drift == 0.4
    assert sp_.meta["r2"] == 3 and not sp_.meta["degenerate"]
    for check in (so.soliton_residuals, so.harmonic_weyl_residuals, so.lambda_good_check):
        assert check(sp_).max_norm < 1e-13
    clusters = sorted((round(float(f.values[5]), 12), m) for f, m in geo.eigenvalue_clusters(sp_.product))
    assert clusters == [(0.0, 4), (0.8, 3)]


def test_rigid_degenerate_case():
    sp_ = cons.rigid_product(cons.RigidParams(5, 3, 1.0, 2.0, 0.0), nm.Grid(0, 1, 51))
    assert sp_.meta["degenerate"]
    assert [m for _, m in geo.eigenvalue_clusters(sp_.product)] == [5]
    assert so.soliton_residuals(sp_).max_norm < 1e-15


# -- Schouten --------------------------------------------------------------------

def test_schouten_forces_c0():
    p = cons.SchoutenParams(4, 2.0, 3.0, 1.0, 0.5)
    assert p.forced_c0 == 0.75
    sp_ = cons.schouten_one_fiber(p, nm.Grid(0, 1, 21))
    assert sp_.meta["c0"] == 0.75
    cons.schouten_one_fiber(cons.SchoutenParams(4, 2.0, 3.0, 1.0, 0.5, c0=0.75), nm.Grid(0, 1, 21))
    with pytest.raises(ParamError, match="forces c0"):
        cons.schouten_one_fiber(cons.SchoutenParams(4, 2.0, 3.0, 1.0, 0.5, c0=1.0), nm.Grid(0, 1, 21))


@pytest.mark.parametrize("n, A, B, mu, tau", [(4, 1.0, 2.0, 2.0, 0.5), (4, 1.0, 2.0, 5.0, 0.5),
                                               (6, -0.5, 3.0, 0.0, -1.0), (3, 1.0, 1.0, 0.0, 2.0)])
def test_schouten_solutions(n, A, B, mu, tau):
    p = cons.SchoutenParams(n, A, B, mu, tau, c1=0.3)
    sp_ = cons.schouten_one_fiber(p, nm.Grid(0, 1, 201))
    assert sp_.meta["complete_branch"] == (mu == (n - 2) * A * A)
    assert so.soliton_residuals(sp_).max_norm < 1e-12
    assert so.schouten_residuals(sp_, tau).max_norm < 1e-12


def test_schouten_param_validation():
    with pytest.raises(ParamError):
        cons.SchoutenParams(2, 1.0, 1.0, 0.0, 0.0)
    with pytest.raises(ParamError):
        cons.SchoutenParams(3, 0.0, 1.0, 0.0, 0.0)


# -- two fibers from the potential -------------------------------------------------

def test_two_fiber_from_f_builds_consistent_spec():
    params = cons.TwoFiberFParams(5, 2, 1.0, 0.0, 10.0, 1.0, "s^2")
    g = nm.Grid(1, 2, 101)
    sp_, rep = cons.two_fiber_from_f(params, g)
    assert sp_.all_closed
    np.testing.assert_allclose(nm.derivatives(sp_.product.fibers[0].h, g, 0)[0], 2 * g.points)
    # lam = f'' - (n-1) f'''/f' = 2 for a quadratic potential
    np.testing.assert_allclose(nm.derivatives(sp_.lam, g, 0)[0], 2.0)
    assert not rep.passed


def test_two_fiber_sampled_matches_closed():
    g = nm.Grid(1, 2, 1001)
    closed = cons.TwoFiberFParams(5, 2, 1.0, 0.0, 10.0, 1.0, "exp(s/2)")
    sampled = cons.TwoFiberFParams(5, 2, 1.0, 0.0, 10.0, 1.0,
                                   nm.SampledFunction(g, np.exp(g.points / 2)))
    a, _ = cons.two_fiber_from_f(closed, g)
    b, _ = cons.two_fiber_from_f(sampled, g)
    for fa, fb in zip(a.product.fibers, b.product.fibers):
        diff = nm.derivatives(fa.h, g, 0)[0] - nm.derivatives(fb.h, g, 0)[0]
        assert nm.max_abs(diff) < 1e-6


def test_two_fiber_critical_and_params():
    with pytest.raises(CriticalPointError):
        cons.two_fiber_from_f(cons.TwoFiberFParams(5, 2, 1.0, 0.0, 10.0, 0.0, "s^2"), nm.Grid(-1, 1, 21))
    with pytest.raises(ParamError):
        cons.TwoFiberFParams(5, 1, 1.0, 0.0, 10.0, 1.0, "s")
    with pytest.raises(ParamError):
        cons.TwoFiberFParams(5, 2, 0.0, 0.0, 10.0, 1.0, "s")


def test_sitf_residuals_vanish_only_for_constants():
    g = nm.Grid(1, 2, 101)
    const = cons.TwoFiberFParams(6, 2, 1.5, 0.0, 10.0, 0.0, "4")
    assert cons.sitf_residuals(const.f, const, g).max_norm == 0.0
    moving = cons.TwoFiberFParams(6, 2, 1.5, 0.0, 10.0, 0.0, "s")
    assert cons.sitf_residuals(moving.f, moving, g).max_norm > 1e-3


def test_example_family_curvature_gap_closed_form():
    # h_i''/h_i - h_j''/h_j = (i-j)/(n-1) ((n-1)(i+j) - 2C + 2L tan(Ls)) for this family
    for dims in [(1, 2), (1, 2, 3), (2, 1, 1)]:
        sp_ = cons.example_family(dims)
        c = cons.example_constants(dims)
        n, C, L = c["n"], c["C"], math.sqrt(c["L2"])
        s = sp_.grid.points
        rep = so.harmonic_weyl_residuals(sp_, trim=0)
        for i in range(1, len(dims) + 1):
            for j in range(i + 1, len(dims) + 1):
                ref = (i - j) / (n - 1) * ((n - 1) * (i + j) - 2 * C + 2 * L * np.tan(L * s))
                np.testing.assert_allclose(rep.residuals[f"hw_pair_{i}_{j}"].values, ref, rtol=1e-9, atol=1e-9)


def test_example_family_curvature_gap_at_origin():
    sp_ = cons.example_family((1, 2), count=3)
    assert sp_.grid.points[1] == 0.0
    rep = so.harmonic_weyl_residuals(sp_, trim=0)
    assert rep.residuals["hw_pair_1_2"].values[1] == pytest.approx(1 / 3, abs=1e-13)
