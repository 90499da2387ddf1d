import numpy as np
import pytest
import scipy.linalg

from tubegeom import liealg as la
from tubegeom import nahm
from tubegeom.errors import (BlowupDetected, GridMismatch, MalformedInput)


@pytest.fixture(scope="module")
def ctx():
    return la.su2(h_split=True)


def _zero(ctx, N):
    return nahm.constant_path(ctx, np.zeros((2, 2)), N)


def _rng():
    return np.random.default_rng(17)


# -- derivatives and residuals ------------------------------------------


def test_path_derivative_fourth_order(ctx):
    freq = 2.1
    errs = []
    for N in (40, 80, 160):
        path = nahm.sampled_path(ctx, lambda t: np.sin(freq * t) * ctx.basis[0], N)
        exact = nahm.sampled_path(
            ctx, lambda t: freq * np.cos(freq * t) * ctx.basis[0], N)
        errs.append(np.max(np.abs(path.derivative() - exact.values)))
    orders = [np.log2(errs[k] / errs[k + 1]) for k in range(2)]
    assert min(orders) > 3.7


def test_residual_constant_commuting_is_zero(ctx):
    N = 50
    cfg = nahm.NahmConfiguration(
        nahm.constant_path(ctx, 0.3 * ctx.basis[2], N),
        nahm.constant_path(ctx, 0.7 * ctx.basis[2], N),
        _zero(ctx, N), _zero(ctx, N))
    assert nahm.nahm_residual_sup(cfg) < 1e-13


def test_residual_conjugation_closed_form(ctx):
    rng = _rng()
    A = ctx.random_element(rng, 1.0)
    v = ctx.random_element(rng, 1.0)
    for N in (100, 200):
        T1 = nahm.sampled_path(
            ctx, lambda t: scipy.linalg.expm(-t * A) @ v @ scipy.linalg.expm(t * A), N)
        cfg = nahm.NahmConfiguration(nahm.constant_path(ctx, A, N), T1,
                                     _zero(ctx, N), _zero(ctx, N))
        # analytic solution of the reduced flow: residual is pure stencil error
        assert nahm.nahm_residual_sup(cfg) < 200.0 / N ** 4


def test_baby_residual_abelian_is_exact_derivative():
    ctx2 = la.torus(2)
    N = 60
    T0 = nahm.sampled_path(ctx2, lambda t: np.sin(t) * ctx2.basis[0], N)
    T1 = nahm.sampled_path(ctx2, lambda t: np.cos(2 * t) * ctx2.basis[1], N)
    resid = nahm.baby_nahm_residual(T0, T1)
    np.testing.assert_allclose(resid.values, T1.derivative(), atol=0.0)


def test_baby_residual_constant_path_no_connection(ctx):
    N = 40
    T1 = nahm.constant_path(ctx, 0.9 * ctx.basis[1], N)
    resid = nahm.baby_nahm_residual(_zero(ctx, N), T1)
    assert resid.sup_norm() < 1e-13


def test_grid_mismatch_raises(ctx):
    with pytest.raises(GridMismatch):
        nahm.baby_nahm_residual(_zero(ctx, 50), _zero(ctx, 60))


# -- gauge action --------------------------------------------------------


def test_gauge_identity_fixes_configuration(ctx):
    N = 80
    rng = _rng()
    cfg = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    e = nahm.constant_path(ctx, np.eye(2), N, kind="group")
    gauged = nahm.gauge_transform(e, cfg)
    for a, b in zip(cfg.paths(), gauged.paths()):
        assert np.max(np.abs(a.values - b.values)) < 1e-14


def test_constant_gauge_is_pointwise_adjoint(ctx):
    N = 80
    rng = _rng()
    cfg = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    g0 = scipy.linalg.expm(ctx.random_element(rng, 1.0))
    g = nahm.constant_path(ctx, g0, N, kind="group")
    gauged = nahm.gauge_transform(g, cfg)
    want = np.einsum("ij,njk,kl->nil", g0, cfg.T0.values,
                     np.linalg.inv(g0))
    assert np.max(np.abs(gauged.T0.values - want)) < 1e-10
    want1 = np.einsum("ij,njk,kl->nil", g0, cfg.T1.values, np.linalg.inv(g0))
    assert np.max(np.abs(gauged.T1.values - want1)) < 1e-12


def test_gauge_invariance_of_nahm_residual(ctx):
    # at this grid both residuals sit near the same rounding-dominated
    # floor, so the gauged/ungauged ratio stays well under 10
    rng = _rng()
    N = 2000
    T0 = nahm.sampled_path(ctx, lambda t: 0.5 * np.sin(t) * ctx.basis[0], N)
    init = [0.4 * ctx.basis[0], 0.7 * ctx.basis[1], 0.9 * ctx.basis[2]]
    sol = nahm.integrate_nahm(ctx, init, T0)
    base = nahm.nahm_residual_sup(sol)
    for _ in range(3):
        g = nahm.smooth_gauge(ctx, rng, N, amplitude=0.5)
        gauged = nahm.gauge_transform(g, sol)
        assert nahm.nahm_residual_sup(gauged) <= 10.0 * base


def test_gauge_composition_law(ctx):
    rng = _rng()
    N = 300
    cfg = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    g = nahm.smooth_gauge(ctx, rng, N, amplitude=0.6)
    h = nahm.smooth_gauge(ctx, rng, N, amplitude=0.6)
    lhs = nahm.gauge_transform(nahm.compose_gauges(g, h), cfg)
    rhs = nahm.gauge_transform(g, nahm.gauge_transform(h, cfg))
    # the connection slot differs by finite-difference product-rule error
    for a, b in zip(lhs.paths(), rhs.paths()):
        assert np.max(np.abs(a.values - b.values)) < 1e-7


# -- gauge-fixing ODE ------------------------------------------------------


def test_gauge_ode_zero_input(ctx):
    g = nahm.solve_gauge_ode(_zero(ctx, 64))
    assert np.max(np.abs(g.values - np.eye(2))) == 0.0


def test_gauge_ode_constant_coefficient(ctx):
    rng = _rng()
    C = ctx.random_element(rng, 1.0)
    N = 200
    g = nahm.solve_gauge_ode(nahm.constant_path(ctx, C, N))
    ts = np.linspace(0.0, 1.0, N + 1)
    exact = np.array([scipy.linalg.expm((t - 1.0) * C) for t in ts])
    assert np.max(np.abs(g.values - exact)) < 1e-11
    assert g.kind == "group"


def test_gauge_ode_defining_property(ctx):
    rng = _rng()
    N = 400
    A = nahm.sampled_path(
        ctx, lambda t: np.sin(2 * t) * ctx.basis[0] + 0.4 * t * ctx.basis[1], N)
    g = nahm.solve_gauge_ode(A)
    cfg = nahm.NahmConfiguration(A, _zero(ctx, N), _zero(ctx, N), _zero(ctx, N))
    gauged = nahm.gauge_transform(g, cfg)
    assert gauged.T0.sup_norm() < 1e-8


def test_gauge_ode_unitary_reprojection(ctx):
    rng = _rng()
    N = 150
    A = nahm.sampled_path(ctx, lambda t: np.cos(t) * ctx.basis[1], N)
    g = nahm.solve_gauge_ode(A)
    defect = max(np.linalg.norm(m @ m.conj().T - np.eye(2)) for m in g.values)
    assert defect < 1e-13


def test_gauge_ode_order_four(ctx):
    rng = _rng()
    C1 = ctx.random_element(rng, 1.0)
    C2 = ctx.random_element(rng, 1.0)
    func = lambda t: np.sin(1.7 * t) * C1 + t * t * C2
    ref = None
    errs = []
    grids = (32, 64, 128)
    fine = nahm.solve_gauge_ode(nahm.sampled_path(ctx, func, 4096))
    for N in grids:
        g = nahm.solve_gauge_ode(nahm.sampled_path(ctx, func, N))
        errs.append(np.linalg.norm(g.values[0] - fine.values[0]))
    orders = [np.log2(errs[k] / errs[k + 1]) for k in range(2)]
    assert min(orders) > 3.6


# -- embedding and roundtrip ----------------------------------------------


def test_embed_tangent_identity_base(ctx):
    rng = _rng()
    v = ctx.random_element(rng, 1.0)
    T0, T1 = nahm.embed_tangent(la.identity_element(ctx), v, 64)
    assert T0.sup_norm() == 0.0
    assert np.max(np.abs(T1.values - v)) < 1e-14


def test_embed_tangent_abelian_constant_paths():
    ctx2 = la.torus(2)
    rng = _rng()
    a = la.group_exp(ctx2, ctx2.random_element(rng, 0.8))
    v = ctx2.random_element(rng, 1.0)
    T0, T1 = nahm.embed_tangent(a, v, 64)
    L = la.group_log(a)
    assert np.max(np.abs(T0.values - L)) < 1e-14
    assert np.max(np.abs(T1.values - v)) < 1e-14


def test_embed_tangent_solves_reduced_flow(ctx):
    rng = _rng()
    a = la.group_exp(ctx, ctx.random_element(rng, 1.2))
    v = ctx.random_element(rng, 1.5)
    N = 200
    T0, T1 = nahm.embed_tangent(a, v, N)
    assert np.linalg.norm(T1.end - v) < 1e-14
    resid = nahm.baby_nahm_residual(T0, T1)
    assert resid.sup_norm() < 100.0 / N ** 4


def test_embed_tangent_custom_path_well_definedness(ctx):
    rng = _rng()
    a = la.group_exp(ctx, ctx.random_element(rng, 1.2))
    v = ctx.random_element(rng, 1.5)
    w = ctx.random_element(rng, 0.6)
    N = 600
    L = la.group_log(a)
    hv = np.array([scipy.linalg.expm((1 - t) * L)
                   @ scipy.linalg.expm(np.sin(np.pi * t) * w)
                   for t in np.linspace(0, 1, N + 1)])
    h_path = nahm.GaugePath(hv, "group", ctx)
    default = nahm.adapted_roundtrip(a, v, N)
    alternate = nahm.adapted_roundtrip(a, v, N, h_path=h_path)
    assert np.linalg.norm(default.matrix - alternate.matrix) < 1e-9


def test_adapted_roundtrip_small_sweep(ctx):
    rng = _rng()
    for _ in range(10):
        a = la.group_exp(ctx, ctx.random_element(rng, 1.2))
        v = ctx.random_element(rng, 2.0)
        got = nahm.adapted_roundtrip(a, v, 400)
        want = a.matrix @ scipy.linalg.expm(1j * v)
        assert np.linalg.norm(got.matrix - want) < 1e-9


def test_adapted_roundtrip_zero_vector(ctx):
    rng = _rng()
    a = la.group_exp(ctx, ctx.random_element(rng, 1.2))
    got = nahm.adapted_roundtrip(a, np.zeros((2, 2)), 400)
    assert np.linalg.norm(got.matrix - a.matrix) < 1e-12


def test_adapted_roundtrip_identity_base(ctx):
    rng = _rng()
    v = ctx.random_element(rng, 1.5)
    got = nahm.adapted_roundtrip(la.identity_element(ctx), v, 400)
    assert np.linalg.norm(got.matrix - scipy.linalg.expm(1j * v)) < 1e-11


def test_gauged_connection_path_transports_to_endpoint(ctx):
    rng = _rng()
    a = la.group_exp(ctx, ctx.random_element(rng, 1.2))
    v = ctx.random_element(rng, 1.4)
    N = 500
    T0, T1 = nahm.embed_tangent(a, v, N)
    xi = nahm.solve_gauge_ode(T0)
    zero = _zero(ctx, N)
    gauged = nahm.gauge_transform(xi, nahm.NahmConfiguration(T0, T1, zero, zero))
    dev = np.max(np.linalg.norm(gauged.T1.values - T1.end[None], axis=(1, 2)))
    assert dev < 1e-9
    assert np.linalg.norm(np.linalg.inv(xi.values[0]) - a.matrix) < 1e-10


# -- metric, symplectic pairing, potential ---------------------------------


def test_l2_metric_basics(ctx):
    N = 120
    zero = _zero(ctx, N)
    ue = nahm.constant_path(ctx, ctx.basis[0], N)
    X = nahm.PathTangent(zero, ue, zero, zero)
    assert nahm.l2_metric(X, X) == pytest.approx(1.0, abs=1e-14)
    rng = _rng()
    Y = nahm.smooth_tangent(ctx, rng, N)
    Z = nahm.smooth_tangent(ctx, rng, N)
    assert nahm.l2_metric(Y, Z) == nahm.l2_metric(Z, Y)
    assert nahm.l2_metric(Y, Y) > 0.0
    null = nahm.PathTangent(zero, zero, zero, zero)
    assert nahm.l2_metric(null, null) == 0.0


def test_omega_unit_pairing_and_antisymmetry(ctx):
    N = 120
    zero = _zero(ctx, N)
    ue = nahm.constant_path(ctx, ctx.basis[0], N)
    X = nahm.PathTangent(ue, zero, zero, zero)
    Y = nahm.PathTangent(zero, ue, zero, zero)
    assert nahm.omega_I(X, Y) == pytest.approx(1.0, abs=1e-14)
    assert nahm.omega_I(Y, X) == pytest.approx(-1.0, abs=1e-14)
    rng = _rng()
    A = nahm.smooth_tangent(ctx, rng, N)
    B = nahm.smooth_tangent(ctx, rng, N)
    assert abs(nahm.omega_I(A, A)) <= 1e-14
    assert abs(nahm.omega_I(A, B) + nahm.omega_I(B, A)) <= 1e-14
    # compatibility: omega(X, Y) = l2(IX, Y)
    assert nahm.omega_I(A, B) == pytest.approx(
        nahm.l2_metric(A.complex_rotated(), B), abs=1e-13)


def test_omega_and_l2_invariant_under_complex_rotation(ctx):
    rng = _rng()
    N = 200
    X = nahm.smooth_tangent(ctx, rng, N)
    Y = nahm.smooth_tangent(ctx, rng, N)
    assert nahm.omega_I(X.complex_rotated(), Y.complex_rotated()) == \
        pytest.approx(nahm.omega_I(X, Y), abs=1e-14)
    assert nahm.l2_metric(X.complex_rotated(), Y.complex_rotated()) == \
        pytest.approx(nahm.l2_metric(X, Y), abs=1e-14)


def test_potential_values(ctx):
    N = 100
    zero = _zero(ctx, N)
    cfg0 = nahm.NahmConfiguration(zero, zero, zero, zero)
    assert nahm.kahler_potential(cfg0) == 0.0
    ue = nahm.constant_path(ctx, ctx.basis[0], N)
    cfg1 = nahm.NahmConfiguration(zero, ue, zero, zero)
    assert nahm.kahler_potential(cfg1) == pytest.approx(0.5, abs=1e-14)
    cfg2 = nahm.NahmConfiguration(zero, zero, ue, zero)
    assert nahm.kahler_potential(cfg2) == pytest.approx(0.25, abs=1e-14)


def test_potential_on_embedded_tangents(ctx):
    rng = _rng()
    N = 400
    zero = _zero(ctx, N)
    for _ in range(5):
        a = la.group_exp(ctx, ctx.random_element(rng, 1.2))
        v = ctx.random_element(rng, 1.5)
        T0, T1 = nahm.embed_tangent(a, v, N)
        f = nahm.kahler_potential(nahm.NahmConfiguration(T0, T1, zero, zero))
        assert f == pytest.approx(0.5 * ctx.pair(v, v), abs=1e-8)


def test_two_form_matches_omega_on_grid(ctx):
    rng = _rng()
    N = 150
    T = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    X = nahm.smooth_tangent(ctx, rng, N)
    Y = nahm.smooth_tangent(ctx, rng, N)
    assert nahm.potential_two_form(T, X, Y) == pytest.approx(
        nahm.omega_I(X, Y), abs=1e-9)


def test_two_form_quadrature_order(ctx):
    seeds = (101, 102, 103)
    ref_grid = 12800
    refs = [nahm.smooth_tangent(ctx, np.random.default_rng(s), ref_grid)
            for s in seeds]
    ref_val = nahm.omega_I(refs[1], refs[2])
    errs = []
    grids = (50, 100, 200)
    for N in grids:
        T = nahm.NahmConfiguration(
            *(nahm.smooth_tangent(ctx, np.random.default_rng(seeds[0]), N).paths()))
        X = nahm.smooth_tangent(ctx, np.random.default_rng(seeds[1]), N)
        Y = nahm.smooth_tangent(ctx, np.random.default_rng(seeds[2]), N)
        errs.append(abs(nahm.potential_two_form(T, X, Y) - ref_val))
    order = np.polyfit(np.log(grids), np.log(errs), 1)[0]
    assert abs(order) >= 1.9


# -- moment map and circle action -------------------------------------------


def test_moment_map_zero_locus(ctx):
    rng = _rng()
    N = 100
    m_parts = [ctx.project_m(ctx.random_element(rng)) for _ in range(3)]
    paths = [nahm.sampled_path(ctx, lambda t, M=M: np.cos(t) * M
                               + t * (1 - t) * ctx.basis[2], N)
             for M in m_parts]
    cfg = nahm.NahmConfiguration(_zero(ctx, N), *paths)
    assert max(np.linalg.norm(x) for x in nahm.moment_map(cfg)) < 1e-12


def test_moment_map_projects_endpoints(ctx):
    N = 60
    paths = [nahm.sampled_path(ctx, lambda t: t * ctx.basis[2], N),
             _zero(ctx, N), _zero(ctx, N)]
    cfg = nahm.NahmConfiguration(_zero(ctx, N), *paths)
    mm = nahm.moment_map(cfg)
    assert np.linalg.norm(mm[0] - ctx.basis[2]) < 1e-14
    assert np.linalg.norm(mm[1]) == 0.0


def test_moment_map_invariant_under_loop_gauges(ctx):
    rng = _rng()
    N = 200
    cfg = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    mm = nahm.moment_map(cfg)
    g = nahm.smooth_gauge(ctx, rng, N, endpoints="loop")
    mm2 = nahm.moment_map(nahm.gauge_transform(g, cfg))
    assert max(np.linalg.norm(a - b) for a, b in zip(mm, mm2)) < 1e-13


def test_moment_map_equivariance_under_subgroup_gauges(ctx):
    rng = _rng()
    N = 200
    cfg = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    g = nahm.smooth_gauge(ctx, rng, N, endpoints="subgroup")
    end = la.GroupElement(g.values[-1], ctx)
    got = nahm.moment_map(nahm.gauge_transform(g, cfg))
    want = [ctx.project_h(la.adjoint(end, x))
            for x in (cfg.T1.end, cfg.T2.end, cfg.T3.end)]
    assert max(np.linalg.norm(a - b) for a, b in zip(got, want)) < 1e-12


def test_circle_action_values(ctx):
    rng = _rng()
    N = 80
    cfg = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    same = nahm.circle_action(0.0, cfg)
    for a, b in zip(cfg.paths(), same.paths()):
        assert np.max(np.abs(a.values - b.values)) == 0.0
    quarter = nahm.circle_action(np.pi / 2.0, cfg)
    assert np.max(np.abs(quarter.T2.values + cfg.T3.values)) < 1e-15
    assert np.max(np.abs(quarter.T3.values - cfg.T2.values)) < 1e-15
    assert np.max(np.abs(quarter.T0.values - cfg.T0.values)) == 0.0


def test_circle_action_preserves_structure(ctx):
    rng = _rng()
    N = 150
    cfg = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    X = nahm.smooth_tangent(ctx, rng, N)
    Y = nahm.smooth_tangent(ctx, rng, N)
    theta = 0.77
    assert nahm.kahler_potential(nahm.circle_action(theta, cfg)) == \
        pytest.approx(nahm.kahler_potential(cfg), abs=1e-14)
    assert nahm.l2_metric(X.rotated(theta), Y.rotated(theta)) == \
        pytest.approx(nahm.l2_metric(X, Y), abs=1e-14)
    assert nahm.omega_I(X.rotated(theta), Y.rotated(theta)) == \
        pytest.approx(nahm.omega_I(X, Y), abs=1e-14)


def test_circle_action_commutes_with_gauge(ctx):
    rng = _rng()
    N = 150
    cfg = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    g = nahm.smooth_gauge(ctx, rng, N)
    theta = 1.3
    lhs = nahm.circle_action(theta, nahm.gauge_transform(g, cfg))
    rhs = nahm.gauge_transform(g, nahm.circle_action(theta, cfg))
    for a, b in zip(lhs.paths(), rhs.paths()):
        assert np.max(np.abs(a.values - b.values)) < 1e-13


def test_circle_action_preserves_nahm_solutions(ctx):
    N = 1000
    T0 = nahm.sampled_path(ctx, lambda t: 0.3 * np.sin(t) * ctx.basis[0], N)
    init = [0.5 * ctx.basis[0], 0.6 * ctx.basis[1], 0.7 * ctx.basis[2]]
    sol = nahm.integrate_nahm(ctx, init, T0)
    base = nahm.nahm_residual_sup(sol)
    # rotations by multiples of pi/2 map solutions to solutions; generic
    # angles do not (the bracket term mixes slots nonlinearly)
    rot = nahm.circle_action(np.pi / 2.0, sol)
    assert nahm.nahm_residual_sup(rot) < 10.0 * base + 1e-12


# -- integrator -------------------------------------------------------------


def test_integrator_zero_data(ctx):
    sol = nahm.integrate_nahm(ctx, [np.zeros((2, 2))] * 3, _zero(ctx, 64))
    for P in (sol.T1, sol.T2, sol.T3):
        assert P.sup_norm() == 0.0


def test_integrator_commuting_constants(ctx):
    c = 0.8 * ctx.basis[2]
    sol = nahm.integrate_nahm(ctx, [c, c, c], _zero(ctx, 64))
    for P in (sol.T1, sol.T2, sol.T3):
        assert np.max(np.abs(P.values - c)) < 1e-14


def test_integrator_euler_top_residual(ctx):
    init = [0.4 * ctx.basis[0], 0.7 * ctx.basis[1], 1.1 * ctx.basis[2]]
    sol = nahm.integrate_nahm(ctx, init, _zero(ctx, 4000))
    assert nahm.nahm_residual_sup(sol) < 1e-8


def test_integrator_norm_conservation_euler_top(ctx):
    # pairwise differences of squared component norms are conserved
    init = [0.4 * ctx.basis[0], 0.7 * ctx.basis[1], 1.1 * ctx.basis[2]]
    sol = nahm.integrate_nahm(ctx, init, _zero(ctx, 2000))
    u = np.stack([ctx.path_coefficients(P.values)[:, k]
                  for k, P in enumerate((sol.T1, sol.T2, sol.T3))])
    d12 = u[0] ** 2 - u[1] ** 2
    assert np.max(np.abs(d12 - d12[0])) < 1e-10


def test_integrator_convergence_order(ctx):
    init = [0.5 * ctx.basis[0], 0.8 * ctx.basis[1], 1.0 * ctx.basis[2]]
    errs = []
    fine = nahm.integrate_nahm(ctx, init, _zero(ctx, 4096))
    for N in (64, 128, 256):
        sol = nahm.integrate_nahm(ctx, init, _zero(ctx, N))
        errs.append(np.max(np.abs(sol.T1.end - fine.T1.end)))
    orders = [np.log2(errs[k] / errs[k + 1]) for k in range(2)]
    assert min(orders) > 3.6


def test_integrator_blowup_detection(ctx):
    init = [-2.0 * ctx.basis[0], -2.0 * ctx.basis[1], -2.0 * ctx.basis[2]]
    with pytest.raises(BlowupDetected):
        nahm.integrate_nahm(ctx, init, _zero(ctx, 2000), norm_bound=1e4)


def test_integrator_requires_algebra_connection(ctx):
    g = nahm.constant_path(ctx, np.eye(2), 64, kind="group")
    with pytest.raises(MalformedInput):
        nahm.integrate_nahm(ctx, [np.zeros((2, 2))] * 3, g)


# -- complex accessors, membership, higher rank ------------------------------


def test_alpha_beta_accessors(ctx):
    rng = _rng()
    N = 40
    cfg = nahm.NahmConfiguration(*(nahm.smooth_tangent(ctx, rng, N).paths()))
    alpha = cfg.alpha()
    beta = cfg.beta()
    assert alpha.kind == "complex-algebra"
    assert np.max(np.abs(alpha.values - (cfg.T0.values + 1j * cfg.T1.values))) == 0.0
    assert np.max(np.abs(beta.values - (cfg.T2.values + 1j * cfg.T3.values))) == 0.0


def test_group_membership_defects(ctx):
    rng = _rng()
    g = nahm.smooth_gauge(ctx, rng, 100)
    assert g.group_defect() < 1e-12
    A = nahm.sampled_path(ctx, lambda t: np.sin(t) * ctx.basis[0], 100)
    xi = nahm.solve_gauge_ode(A)
    assert xi.group_defect() < 1e-13
    alpha = nahm.GaugePath(A.values + 1j * A.values, "complex-algebra", ctx)
    gc = nahm.solve_gauge_ode(alpha)
    assert gc.group_defect() < 1e-12
    with pytest.raises(MalformedInput):
        A.group_defect()


def test_higher_rank_smoke():
    ctx3 = la.su3(h_split=True)
    rng = _rng()
    a = la.group_exp(ctx3, ctx3.random_element(rng, 1.0))
    v = ctx3.random_element(rng, 1.2)
    got = nahm.adapted_roundtrip(a, v, 800)
    want = a.matrix @ scipy.linalg.expm(1j * v)
    assert np.linalg.norm(got.matrix - want) < 1e-9
    m = ctx3.project_m(ctx3.random_element(rng))
    N = 50
    paths = [nahm.sampled_path(ctx3, lambda t, M=m: np.cos(t) * M, N)
             for _ in range(3)]
    zero3 = nahm.constant_path(ctx3, np.zeros((3, 3)), N)
    cfg = nahm.NahmConfiguration(zero3, *paths)
    assert max(np.linalg.norm(x) for x in nahm.moment_map(cfg)) < 1e-13


# -- serialization -----------------------------------------------------------


def test_configuration_csv_roundtrip(ctx, tmp_path):
    N = 40
    T0 = nahm.sampled_path(ctx, lambda t: np.sin(t) * ctx.basis[0], N)
    init = [0.4 * ctx.basis[0], 0.5 * ctx.basis[1], 0.6 * ctx.basis[2]]
    cfg = nahm.integrate_nahm(ctx, init, T0)
    manifest = nahm.save_configuration(cfg, tmp_path, name="case")
    back = nahm.load_configuration(manifest, ctx)
    assert back.grid_size == cfg.grid_size
    for a, b in zip(cfg.paths(), back.paths()):
        assert np.max(np.abs(a.values - b.values)) == 0.0
