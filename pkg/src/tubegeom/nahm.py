"""Discretized path-space laboratory: Nahm flows, gauge actions, and the
flat hyperkahler structure on paths.

Configurations are quadruples (T0, T1, T2, T3) of algebra-valued paths on a
uniform grid over [0, 1].  The machinery here provides

* residuals of the Nahm system  dT1/dt + [T0,T1] + [T2,T3] = 0  (cyclic in
  1,2,3) and of its reduced two-path form  dT1/dt + [T0,T1] = 0,
* the gauge action  g.T0 = g T0 g^-1 - (dg/dt) g^-1,  g.Tj = g Tj g^-1,
* the gauge-fixing linear ODE  dg/dt = g A(t), g(1) = id,  solved by
  classical RK4 with per-step reprojection to the group,
* the flat L^2 metric, the symplectic pairing for the first complex
  structure, its quadratic potential, the endpoint moment map for a
  subgroup split, the circle action rotating (T2, T3), and a RK4
  integrator for the flow itself.

Derivatives on the grid use 4th-order stencils (one-sided at the ends) so
that residual magnitudes track the integrator's order on analytic data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (BlowupDetected, ContextMismatch, GridMismatch,
                     MalformedInput)
from .liealg import GroupElement, LieAlgebraContext, group_log

PATH_KINDS = ("group", "algebra", "complex-group", "complex-algebra")


@dataclass(frozen=True)
class GaugePath:
    """Uniformly sampled path of matrices on [0, 1]."""

    values: np.ndarray  # (N+1, m, m)
    kind: str
    context: LieAlgebraContext

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        size = self.context.matrix_size
        if v.ndim != 3 or v.shape[1:] != (size, size) or v.shape[0] < 2:
            raise MalformedInput("path values must be (N+1, m, m) with N >= 1")
        if self.kind not in PATH_KINDS:
            raise MalformedInput(f"unknown path kind {self.kind!r}")
        object.__setattr__(self, "values", v)

    @property
    def grid_size(self):
        return self.values.shape[0] - 1

    @property
    def times(self):
        return np.linspace(0.0, 1.0, self.values.shape[0])

    @property
    def start(self):
        return self.values[0]

    @property
    def end(self):
        return self.values[-1]

    def derivative(self):
        """4th-order finite-difference time derivative as a raw array."""
        return path_derivative(self.values, 1.0 / self.grid_size)

    def sup_norm(self):
        return float(np.max(np.linalg.norm(self.values, axis=(1, 2))))

    def coefficients(self):
        return self.context.path_coefficients(self.values)

    def group_defect(self):
        """Worst per-node group-membership defect for group-kind paths:
        distance from unitarity (real kind) or from unit determinant
        (complexified kind)."""
        if self.kind == "group":
            eye = np.eye(self.context.matrix_size)
            prods = np.einsum("nij,nkj->nik", self.values, self.values.conj())
            return float(np.max(np.linalg.norm(prods - eye, axis=(1, 2))))
        if self.kind == "complex-group":
            return float(np.max(np.abs(np.linalg.det(self.values) - 1.0)))
        raise MalformedInput("group_defect applies to group-kind paths")


def _same_grid(*paths):
    sizes = {p.grid_size for p in paths}
    if len(sizes) != 1:
        raise GridMismatch(f"paths on different grids: {sorted(sizes)}")
    ctxs = {id(p.context) for p in paths}
    if len(ctxs) != 1:
        raise ContextMismatch("paths from different contexts")


def constant_path(context, value, grid_size, kind="algebra"):
    reps = np.repeat(np.asarray(value, dtype=complex)[None], grid_size + 1, axis=0)
    return GaugePath(reps, kind, context)


def sampled_path(context, func, grid_size, kind="algebra"):
    ts = np.linspace(0.0, 1.0, grid_size + 1)
    vals = np.array([func(t) for t in ts], dtype=complex)
    return GaugePath(vals, kind, context)


def path_derivative(values, dt):
    """4th-order stencils: central inside, one-sided at the boundary rows."""
    v = np.asarray(values)
    N = v.shape[0] - 1
    if N < 4:
        raise MalformedInput("need at least 5 nodes for 4th-order derivatives")
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * dt)
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * dt)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * dt)
    d[-2] = (-v[-5] + 6 * v[-4] - 18 * v[-3] + 10 * v[-2] + 3 * v[-1]) / (12 * dt)
    d[-1] = (3 * v[-5] - 16 * v[-4] + 36 * v[-3] - 48 * v[-2] + 25 * v[-1]) / (12 * dt)
    return d


def _midpoints(values):
    """4th-order midpoint interpolation per grid interval."""
    v = np.asarray(values)
    mids = np.empty((v.shape[0] - 1,) + v.shape[1:], dtype=v.dtype)
    mids[1:-1] = (-v[:-3] + 9 * v[1:-2] + 9 * v[2:-1] - v[3:]) / 16.0
    mids[0] = (5 * v[0] + 15 * v[1] - 5 * v[2] + v[3]) / 16.0
    mids[-1] = (v[-4] - 5 * v[-3] + 15 * v[-2] + 5 * v[-1]) / 16.0
    return mids


@dataclass(frozen=True)
class NahmConfiguration:
    """Quadruple of algebra-valued paths on a shared grid."""

    T0: GaugePath
    T1: GaugePath
    T2: GaugePath
    T3: GaugePath

    def __post_init__(self):
        _same_grid(self.T0, self.T1, self.T2, self.T3)

    @property
    def context(self):
        return self.T0.context

    @property
    def grid_size(self):
        return self.T0.grid_size

    def paths(self):
        return (self.T0, self.T1, self.T2, self.T3)

    def alpha(self):
        """First complex combination T0 + i T1."""
        return GaugePath(self.T0.values + 1j * self.T1.values,
                         "complex-algebra", self.context)

    def beta(self):
        """Second complex combination T2 + i T3."""
        return GaugePath(self.T2.values + 1j * self.T3.values,
                         "complex-algebra", self.context)


@dataclass(frozen=True)
class PathTangent:
    """Tangent vector to the (flat) space of configurations."""

    X0: GaugePath
    X1: GaugePath
    X2: GaugePath
    X3: GaugePath

    def __post_init__(self):
        _same_grid(self.X0, self.X1, self.X2, self.X3)

    def paths(self):
        return (self.X0, self.X1, self.X2, self.X3)

    def rotated(self, theta):
        c, s = np.cos(theta), np.sin(theta)
        ctx = self.X0.context
        return PathTangent(
            self.X0, self.X1,
            GaugePath(c * self.X2.values - s * self.X3.values, "algebra", ctx),
            GaugePath(s * self.X2.values + c * self.X3.values, "algebra", ctx))

    def complex_rotated(self):
        """Action of the first complex structure: multiplication by i on
        (T0 + i T1, T2 + i T3), i.e. (X0,X1,X2,X3) -> (-X1,X0,-X3,X2)."""
        ctx = self.X0.context
        return PathTangent(
            GaugePath(-self.X1.values, "algebra", ctx),
            GaugePath(self.X0.values, "algebra", ctx),
            GaugePath(-self.X3.values, "algebra", ctx),
            GaugePath(self.X2.values, "algebra", ctx))


def _commutator_paths(A, B):
    return np.einsum("nij,njk->nik", A, B) - np.einsum("nij,njk->nik", B, A)


def nahm_residual(config):
    """Residual paths of the three cyclic equations, as GaugePaths."""
    T0, T1, T2, T3 = (p.values for p in config.paths())
    dt = 1.0 / config.grid_size
    ctx = config.context
    out = []
    for A, B, C in ((T1, T2, T3), (T2, T3, T1), (T3, T1, T2)):
        resid = (path_derivative(A, dt) + _commutator_paths(T0, A)
                 + _commutator_paths(B, C))
        out.append(GaugePath(resid, "algebra", ctx))
    return tuple(out)


def nahm_residual_sup(config):
    return max(r.sup_norm() for r in nahm_residual(config))


def baby_nahm_residual(T0, T1):
    """Residual of the reduced system dT1/dt + [T0, T1] = 0."""
    _same_grid(T0, T1)
    dt = 1.0 / T1.grid_size
    resid = path_derivative(T1.values, dt) + _commutator_paths(T0.values, T1.values)
    return GaugePath(resid, "algebra", T1.context)


def gauge_transform(g, config):
    """Gauge action: T0 conjugates with a connection shift, Tj conjugate."""
    _same_grid(g, config.T0)
    if g.kind not in ("group", "complex-group"):
        raise MalformedInput("gauge paths must be group-valued")
    gv = g.values
    ginv = np.linalg.inv(gv)
    dg = path_derivative(gv, 1.0 / g.grid_size)
    conj = lambda A: np.einsum("nij,njk,nkl->nil", gv, A, ginv)
    ctx = config.context
    T0 = conj(config.T0.values) - np.einsum("nij,njk->nik", dg, ginv)
    return NahmConfiguration(
        GaugePath(T0, "algebra", ctx),
        GaugePath(conj(config.T1.values), "algebra", ctx),
        GaugePath(conj(config.T2.values), "algebra", ctx),
        GaugePath(conj(config.T3.values), "algebra", ctx))


def compose_gauges(g, h):
    """Pointwise product path (gh)(t) = g(t) h(t)."""
    _same_grid(g, h)
    kind = "complex-group" if "complex-group" in (g.kind, h.kind) else "group"
    return GaugePath(np.einsum("nij,njk->nik", g.values, h.values), kind, g.context)


def _project_group(m, complexified):
    if complexified:
        # determinant renormalization for special linear models
        det = np.linalg.det(m)
        return m / det ** (1.0 / m.shape[0])
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def solve_gauge_ode(A, reproject=True):
    """Solve dg/dt = g A(t) backward from g(1) = id by classical RK4.

    One RK4 step per grid interval; midpoint samples of A come from
    4th-order interpolation, which preserves the integrator's global
    order.  Group membership is restored after every step (polar projection
    for unitary models, determinant renormalization for complexified ones).
    """
    if A.kind not in ("algebra", "complex-algebra"):
        raise MalformedInput("gauge ODE input must be algebra-valued")
    complexified = A.kind == "complex-algebra"
    vals = A.values
    N = A.grid_size
    h = 1.0 / N
    mids = _midpoints(vals)
    m = A.context.matrix_size
    g = np.empty((N + 1, m, m), dtype=complex)
    g[N] = np.eye(m)
    f = lambda gm, am: gm @ am
    for k in range(N - 1, -1, -1):
        g1 = g[k + 1]
        a_right, a_mid, a_left = vals[k + 1], mids[k], vals[k]
        k1 = f(g1, a_right)
        k2 = f(g1 - 0.5 * h * k1, a_mid)
        k3 = f(g1 - 0.5 * h * k2, a_mid)
        k4 = f(g1 - h * k3, a_left)
        step = g1 - (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        g[k] = _project_group(step, complexified) if reproject else step
    kind = "complex-group" if complexified else "group"
    return GaugePath(g, kind, A.context)


def embed_tangent(a, v, grid_size, h_path=None):
    """Path pair (T0, T1) representing the tangent point (a, v).

    With the default interpolating path h(t) = exp((1 - t) log a) the
    connection component is the constant log a and T1(t) = h v h^-1; any
    supplied ``h_path`` must run from a at t = 0 to the identity (or into
    the subgroup) at t = 1.  The pair satisfies the reduced flow equation
    and T1(1) = v for the default path.
    """
    ctx = a.context
    if h_path is None:
        L = group_log(a)  # LogBranchFailure propagates
        ts = np.linspace(0.0, 1.0, grid_size + 1)
        hv = np.array([scipy.linalg.expm((1.0 - t) * L) for t in ts])
        T0 = constant_path(ctx, L, grid_size)
    else:
        if h_path.grid_size != grid_size:
            raise GridMismatch("h_path grid does not match the requested grid")
        hv = h_path.values
        if np.linalg.norm(hv[0] - a.matrix) > 1e-8:
            raise MalformedInput("h_path must start at the base point")
        dh = path_derivative(hv, 1.0 / grid_size)
        hinv = np.linalg.inv(hv)
        T0 = GaugePath(-np.einsum("nij,njk->nik", dh, hinv), "algebra", ctx)
    hinv = np.linalg.inv(hv)
    T1 = GaugePath(np.einsum("nij,jk,nkl->nil", hv, np.asarray(v, dtype=complex),
                             hinv), "algebra", ctx)
    return T0, T1


def adapted_roundtrip(a, v, grid_size=2000, h_path=None):
    """Recover the complexified image of (a, v) through the gauge ODE.

    Builds the embedded pair, gauges the complex combination to zero, and
    returns g(0)^-1, which converges at 4th order to a exp(i v).
    """
    T0, T1 = embed_tangent(a, v, grid_size, h_path)
    alpha = GaugePath(T0.values + 1j * T1.values, "complex-algebra", a.context)
    g = solve_gauge_ode(alpha)
    return GroupElement(np.linalg.inv(g.values[0]), a.context, complexified=True)


# -- flat hyperkahler structure ------------------------------------------

def _trapezoid(node_values, N):
    w = np.full(N + 1, 1.0 / N)
    w[0] *= 0.5
    w[-1] *= 0.5
    return float(np.dot(w, node_values))


def l2_metric(X, Y):
    """Flat path-space metric: integral of the summed pointwise pairings."""
    _same_grid(*X.paths(), *Y.paths())
    ctx = X.X0.context
    N = X.X0.grid_size
    total = np.zeros(N + 1)
    for P, Q in zip(X.paths(), Y.paths()):
        total += ctx.pair_coeff_paths(P.coefficients(), Q.coefficients())
    return _trapezoid(total, N)


def omega_I(X, Y):
    """Symplectic pairing of the first complex structure:
    integral of <X0,Y1> - <X1,Y0> + <X2,Y3> - <X3,Y2>."""
    _same_grid(*X.paths(), *Y.paths())
    ctx = X.X0.context
    N = X.X0.grid_size
    c = [p.coefficients() for p in X.paths()]
    d = [p.coefficients() for p in Y.paths()]
    total = (ctx.pair_coeff_paths(c[0], d[1]) - ctx.pair_coeff_paths(c[1], d[0])
             + ctx.pair_coeff_paths(c[2], d[3]) - ctx.pair_coeff_paths(c[3], d[2]))
    return _trapezoid(total, N)


def kahler_potential(config):
    """Quadratic potential (1/2)|T1|^2 + (1/4)|T2|^2 + (1/4)|T3|^2 in L^2."""
    ctx = config.context
    N = config.grid_size
    weights = (0.0, 0.5, 0.25, 0.25)
    total = np.zeros(N + 1)
    for w, P in zip(weights, config.paths()):
        if w:
            cp = P.coefficients()
            total += w * ctx.pair_coeff_paths(cp, cp)
    return _trapezoid(total, N)


def potential_two_form(config, X, Y, step=1e-3):
    """d(I df)(X, Y) by centered differences of the potential.

    The configuration space is flat, so for constant directions the
    exterior derivative reduces to antisymmetrized directional derivatives
    of lambda(Z) = df(I^-1 Z); each df is itself a centered difference.
    This equals omega_I exactly at the discrete level (the potential is
    quadratic), and matches the continuum pairing at the quadrature order.
    """

    def shift(cfg, direction, eps):
        ctx = cfg.context
        return NahmConfiguration(*(GaugePath(P.values + eps * D.values,
                                             "algebra", ctx)
                                   for P, D in zip(cfg.paths(), direction.paths())))

    def lam(cfg, Z):
        # df at cfg applied to I^-1 Z; I^-1 (Z0,Z1,Z2,Z3) = (Z1,-Z0,Z3,-Z2)
        W = PathTangent(Z.X1,
                        GaugePath(-Z.X0.values, "algebra", Z.X0.context),
                        Z.X3,
                        GaugePath(-Z.X2.values, "algebra", Z.X2.context))
        return (kahler_potential(shift(cfg, W, step))
                - kahler_potential(shift(cfg, W, -step))) / (2.0 * step)

    d_x_ly = (lam(shift(config, X, step), Y) - lam(shift(config, X, -step), Y)) \
        / (2.0 * step)
    d_y_lx = (lam(shift(config, Y, step), X) - lam(shift(config, Y, -step), X)) \
        / (2.0 * step)
    return d_x_ly - d_y_lx


def moment_map(config):
    """Endpoint moment map for the subgroup action: subalgebra parts of
    T1(1), T2(1), T3(1)."""
    ctx = config.context
    return tuple(ctx.project_h(P.end) for P in (config.T1, config.T2, config.T3))


def circle_action(theta, config):
    """Rotate the (T2, T3) pair by theta; fixes (T0, T1)."""
    c, s = np.cos(theta), np.sin(theta)
    ctx = config.context
    return NahmConfiguration(
        config.T0, config.T1,
        GaugePath(c * config.T2.values - s * config.T3.values, "algebra", ctx),
        GaugePath(s * config.T2.values + c * config.T3.values, "algebra", ctx))


def integrate_nahm(context, initial, T0, norm_bound=1e6):
    """RK4 evolution of the three cyclic equations with prescribed T0.

    ``initial`` supplies (T1, T2, T3) at t = 0; T0 is connection data, not
    evolved.  Raises BlowupDetected when any evolved norm leaves the bound
    (the flow genuinely blows up in finite time for some data).
    """
    if T0.kind != "algebra":
        raise MalformedInput("T0 must be an algebra-valued path")
    N = T0.grid_size
    h = 1.0 / N
    t0_mids = _midpoints(T0.values)
    m = context.matrix_size
    Y = np.array([np.asarray(M, dtype=complex) for M in initial])
    if Y.shape != (3, m, m):
        raise MalformedInput("initial data must be three algebra matrices")

    def rhs(y, t0val):
        c = lambda A, B: A @ B - B @ A
        return np.array([
            -c(t0val, y[0]) - c(y[1], y[2]),
            -c(t0val, y[1]) - c(y[2], y[0]),
            -c(t0val, y[2]) - c(y[0], y[1]),
        ])

    out = np.empty((N + 1, 3, m, m), dtype=complex)
    out[0] = Y
    for k in range(N):
        a_left, a_mid, a_right = T0.values[k], t0_mids[k], T0.values[k + 1]
        k1 = rhs(Y, a_left)
        k2 = rhs(Y + 0.5 * h * k1, a_mid)
        k3 = rhs(Y + 0.5 * h * k2, a_mid)
        k4 = rhs(Y + h * k3, a_right)
        Y = Y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.max(np.linalg.norm(Y, axis=(1, 2))) > norm_bound:
            raise BlowupDetected(f"flow norm exceeded {norm_bound:.1e} at step {k + 1}")
        out[k + 1] = Y

    return NahmConfiguration(
        T0,
        GaugePath(out[:, 0], "algebra", context),
        GaugePath(out[:, 1], "algebra", context),
        GaugePath(out[:, 2], "algebra", context))


# -- smooth random data helpers ------------------------------------------

def smooth_gauge(context, rng, grid_size, amplitude=0.5, endpoints="free"):
    """Random smooth group path; ``endpoints`` picks the boundary behavior.

    "free": no constraint; "loop": identity at both ends; "subgroup":
    identity at t = 0 and a subgroup element at t = 1.
    """
    d = context.dim
    c1 = rng.standard_normal(d) * amplitude
    c2 = rng.standard_normal(d) * amplitude
    ts = np.linspace(0.0, 1.0, grid_size + 1)
    if endpoints == "loop":
        profiles = [np.sin(np.pi * ts), ts * (1.0 - ts)]
    elif endpoints == "subgroup":
        context._require_split()
        c_end = np.where(context.h_mask, rng.standard_normal(d) * amplitude, 0.0)
        profiles = [np.sin(np.pi * ts), ts * ts]
        c2 = c_end
    else:
        profiles = [np.cos(0.5 * np.pi * ts), np.sin(1.5 * ts)]
    vals = []
    for i, t in enumerate(ts):
        A = context.reconstruct(profiles[0][i] * c1 + profiles[1][i] * c2)
        vals.append(scipy.linalg.expm(A))
    return GaugePath(np.array(vals), "group", context)


def smooth_tangent(context, rng, grid_size, amplitude=1.0):
    """Random analytic tangent direction (trig profiles per slot)."""
    ts = np.linspace(0.0, 1.0, grid_size + 1)
    paths = []
    for _ in range(4):
        c1 = context.random_element(rng, amplitude)
        c2 = context.random_element(rng, amplitude)
        freq = rng.integers(1, 4)
        prof1 = np.cos(np.pi * freq * ts)
        prof2 = np.sin(np.pi * ts)
        vals = prof1[:, None, None] * c1 + prof2[:, None, None] * c2
        paths.append(GaugePath(vals, "algebra", context))
    return PathTangent(*paths)


# -- path serialization ---------------------------------------------------

def path_to_csv(path):
    """CSV dump: t plus interleaved re/im of the row-major matrix entries."""
    m = path.context.matrix_size
    header = ["t"]
    for i in range(m):
        for j in range(m):
            header += [f"m{i}{j}_re", f"m{i}{j}_im"]
    lines = [",".join(header)]
    for t, val in zip(path.times, path.values):
        cells = [repr(float(t))]
        for i in range(m):
            for j in range(m):
                cells += [repr(float(val[i, j].real)), repr(float(val[i, j].imag))]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def path_from_csv(text, context, kind="algebra"):
    lines = [ln for ln in text.strip().splitlines() if ln]
    m = context.matrix_size
    vals = []
    for ln in lines[1:]:
        cells = [float(tok) for tok in ln.split(",")]
        entries = np.array(cells[1:]).reshape(m * m, 2)
        vals.append((entries[:, 0] + 1j * entries[:, 1]).reshape(m, m))
    return GaugePath(np.array(vals), kind, context)


def save_configuration(config, directory, name="nahm"):
    """Write four CSV files plus a JSON manifest; returns the manifest path."""
    import json
    import os
    os.makedirs(directory, exist_ok=True)
    files = {}
    for label, path in zip(("T0", "T1", "T2", "T3"), config.paths()):
        fname = f"{name}_{label}.csv"
        with open(os.path.join(directory, fname), "w") as fh:
            fh.write(path_to_csv(path))
        files[label] = fname
    manifest = {"kind": "nahm_configuration", "context": config.context.name,
                "grid_size": config.grid_size, "files": files}
    mpath = os.path.join(directory, f"{name}_manifest.json")
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    return mpath


def load_configuration(manifest_path, context):
    import json
    import os
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if manifest.get("kind") != "nahm_configuration":
        raise MalformedInput("not a configuration manifest")
    base = os.path.dirname(manifest_path)
    paths = []
    for label in ("T0", "T1", "T2", "T3"):
        with open(os.path.join(base, manifest["files"][label])) as fh:
            paths.append(path_from_csv(fh.read(), context))
    return NahmConfiguration(*paths)
