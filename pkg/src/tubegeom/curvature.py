"""Riemannian curvature tensors, normal-coordinate metric jets, and a
finite-difference curvature oracle.

Convention lock
---------------
Components are stored as ``R[i, j, k, l] = g(R(e_i, e_j) e_l, e_k)`` in an
orthonormal frame at the base point, where ``R(X, Y) = [grad_X, grad_Y] -
grad_[X,Y]``.  With this slot order the sectional curvature of the plane
``(e_i, e_j)`` is simply ``R[i, j, i, j]`` (so the unit round sphere has
``R[0, 1, 0, 1] = +1``), and the symmetries read

* antisymmetry: ``R[i,j,k,l] = -R[j,i,k,l] = -R[i,j,l,k]``
* pair exchange: ``R[i,j,k,l] = R[k,l,i,j]``
* cyclic identity: ``R[i,j,k,l] + R[j,k,i,l] + R[k,i,j,l] = 0``

Every translation from another reference's ordering happens here and
nowhere else.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (EqualIndices, IndexOutOfRange, MalformedInput,
                     SingularMetric, SymmetryViolation)
from .jets import JetPolynomial


@dataclass(frozen=True)
class CurvatureTensor:
    """Rank-4 curvature array at a point, in the convention above."""

    components: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.components, dtype=float)
        if arr.ndim != 4 or len(set(arr.shape)) != 1:
            raise MalformedInput("curvature components must form an (n,n,n,n) array")
        object.__setattr__(self, "components", arr)

    @property
    def dimension(self):
        return self.components.shape[0]

    def validate(self, tol=1e-10):
        """Check all algebraic symmetries; raises SymmetryViolation."""
        R = self.components
        scale = max(np.max(np.abs(R)), 1.0)
        checks = {
            "antisymmetry (first pair)": R + R.transpose(1, 0, 2, 3),
            "antisymmetry (second pair)": R + R.transpose(0, 1, 3, 2),
            "pair exchange": R - R.transpose(2, 3, 0, 1),
            "cyclic identity": R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3),
        }
        for name, resid in checks.items():
            err = np.max(np.abs(resid))
            if err > tol * scale:
                raise SymmetryViolation(f"{name} violated: residual {err:.3e}")
        diag = max(abs(R[i, i, i, i]) for i in range(self.dimension))
        if diag > tol * scale:
            raise SymmetryViolation(f"R[i,i,i,i] nonzero: {diag:.3e}")
        return self

    # -- serialization: independent components + index manifest --------

    def to_json(self):
        n = self.dimension
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        rows = []
        for a, (i, j) in enumerate(pairs):
            for (k, l) in pairs[a:]:
                rows.append([i, j, k, l, float(self.components[i, j, k, l])])
        return json.dumps({
            "kind": "curvature_tensor",
            "dimension": n,
            "convention": "R[i,j,k,l] = g(R(e_i,e_j) e_l, e_k); S(i,j) = R[i,j,i,j]",
            "components": rows,
        })

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if data.get("kind") != "curvature_tensor":
            raise MalformedInput("not a curvature tensor record")
        n = data["dimension"]
        R = np.zeros((n, n, n, n))
        for i, j, k, l, v in data["components"]:
            _assign_orbit(R, i, j, k, l, v)
        return cls(R).validate()


def _assign_orbit(R, i, j, k, l, v):
    """Set one component and everything related to it by the linear symmetries."""
    for (a, b, c, d), s in (((i, j, k, l), 1.0), ((k, l, i, j), 1.0)):
        R[a, b, c, d] = s * v
        R[b, a, c, d] = -s * v
        R[a, b, d, c] = -s * v
        R[b, a, d, c] = s * v


def from_sparse(n, entries):
    """Build a tensor from a few independent components.

    ``entries`` maps (i, j, k, l) with i<j, k<l to values; the symmetry
    orbit of each entry is filled in automatically and the result is
    validated (the cyclic identity can still fail for bad data).
    """
    R = np.zeros((n, n, n, n))
    for (i, j, k, l), v in entries.items():
        _assign_orbit(R, i, j, k, l, v)
    return CurvatureTensor(R).validate()


def constant_curvature(n, kappa):
    """Space form of sectional curvature ``kappa`` in dimension ``n``."""
    delta = np.eye(n)
    R = kappa * (np.einsum("ik,jl->ijkl", delta, delta)
                 - np.einsum("il,jk->ijkl", delta, delta))
    return CurvatureTensor(R).validate()


def sphere_product(n, plane_curvatures):
    """Block tensor with prescribed curvature on disjoint coordinate 2-planes.

    ``plane_curvatures`` maps (i, j) with i < j to a sectional value; planes
    must not share indices (models products of surfaces and flat factors,
    all of which have non-negative sectional curvature when values are >= 0).
    """
    used = set()
    R = np.zeros((n, n, n, n))
    for (i, j), kappa in plane_curvatures.items():
        if {i, j} & used:
            raise MalformedInput("product planes must use disjoint indices")
        used |= {i, j}
        _assign_orbit(R, i, j, i, j, kappa)
    return CurvatureTensor(R).validate()


def random_admissible(n, rng, scale=1.0, tol=1e-10):
    """Random tensor obtained by symmetrizing noise over the full symmetry group.

    Noise is projected onto the pair symmetries, then the cyclic-identity
    defect (its totally antisymmetric part) is removed.  The result is
    validated and rejected/retried if it still fails, which does not happen
    in practice.
    """
    for _ in range(10):
        N = rng.standard_normal((n, n, n, n)) * scale
        S = 0.125 * (N - N.transpose(1, 0, 2, 3) - N.transpose(0, 1, 3, 2)
                     + N.transpose(1, 0, 3, 2) + N.transpose(2, 3, 0, 1)
                     - N.transpose(3, 2, 0, 1) - N.transpose(2, 3, 1, 0)
                     + N.transpose(3, 2, 1, 0))
        bianchi = S + S.transpose(1, 2, 0, 3) + S.transpose(2, 0, 1, 3)
        R = S - bianchi / 3.0
        try:
            return CurvatureTensor(R).validate(tol)
        except SymmetryViolation:
            continue
    raise SymmetryViolation("symmetrized noise kept failing validation")


def sectional(tensor, i, j):
    """Sectional curvature of the orthonormal coordinate plane (e_i, e_j)."""
    n = tensor.dimension
    for idx in (i, j):
        if not 0 <= idx < n:
            raise IndexOutOfRange(f"index {idx} outside [0, {n})")
    if i == j:
        raise EqualIndices("a plane needs two distinct indices")
    return float(tensor.components[i, j, i, j])


def normal_metric_jet(tensor, max_degree=2):
    """Degree-2 jet of the metric in geodesic normal coordinates.

    Returns the matrix of jets ``g_ij(x) = delta_ij - (1/3) sum_pq
    R[i,p,j,q] x_p x_q`` in the 2n-variable layout (the y variables are
    unused, which keeps the result directly consumable by the potential
    machinery).
    """
    tensor.validate()
    n = tensor.dimension
    R = tensor.components
    num_vars = 2 * n
    jet = []
    for i in range(n):
        row = []
        for j in range(n):
            coeffs = {}
            zero = [0] * num_vars
            if i == j:
                coeffs[tuple(zero)] = 1.0
            for p in range(n):
                for q in range(n):
                    if R[i, p, j, q] == 0.0:
                        continue
                    powers = zero.copy()
                    powers[p] += 1
                    powers[q] += 1
                    key = tuple(powers)
                    coeffs[key] = coeffs.get(key, 0.0) - R[i, p, j, q] / 3.0
            row.append(JetPolynomial(num_vars, max_degree, coeffs))
        jet.append(row)
    return jet


@dataclass
class MetricChart:
    """A coordinate metric: callable x -> symmetric positive matrix g(x)."""

    dimension: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    normal_at_origin: bool = True
    name: str = field(default="chart")

    def __call__(self, x):
        g = np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)
        if g.shape != (self.dimension, self.dimension):
            raise MalformedInput("chart returned a matrix of the wrong shape")
        return g


def chart_from_metric_jet(jet_matrix):
    """Wrap a matrix of (2n-variable) metric jets as a chart in x alone."""
    n = len(jet_matrix)

    def evaluator(x):
        point = np.concatenate([x, np.zeros(n)])
        return np.array([[float(np.real(jet_matrix[i][j].evaluate(point)))
                          for j in range(n)] for i in range(n)])

    return MetricChart(n, evaluator, name="metric-jet")


def sphere_chart(n, kappa=1.0):
    """Round space form metric of curvature ``kappa`` in normal coordinates."""

    def radial_factor(r2):
        # sin(sqrt(k) r)^2 / (k r^2), continued through r = 0 and kappa <= 0
        u = kappa * r2
        if abs(u) < 1e-10:
            return 1.0 - u / 3.0 + 2.0 * u * u / 45.0
        if u > 0:
            s = np.sqrt(u)
            return np.sin(s) ** 2 / u
        s = np.sqrt(-u)
        return np.sinh(s) ** 2 / (-u)

    def evaluator(x):
        r2 = float(np.dot(x, x))
        if r2 == 0.0:
            return np.eye(n)
        f = radial_factor(r2)
        proj = np.outer(x, x) / r2
        return f * np.eye(n) + (1.0 - f) * proj

    return MetricChart(n, evaluator, name=f"sphere(kappa={kappa})")


# -- finite-difference curvature oracle --------------------------------

_STENCILS = {
    2: ([-1.0, 1.0], [-1, 1], 2.0),
    4: ([1.0, -8.0, 8.0, -1.0], [-2, -1, 1, 2], 12.0),
}


def _metric_gradient(chart, x, step, order):
    weights, offsets, denom = _STENCILS[order]
    n = chart.dimension
    dg = np.zeros((n, n, n))
    for p in range(n):
        acc = np.zeros((n, n))
        for w, o in zip(weights, offsets):
            xp = x.copy()
            xp[p] += o * step
            acc += w * chart(xp)
        dg[p] = acc / (denom * step)
    return dg


def _christoffel(chart, x, step, order):
    g = chart(x)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise SingularMetric(f"metric not positive-definite at {x}")
    ginv = np.linalg.inv(g)
    dg = _metric_gradient(chart, x, step, order)
    # Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij),
    # with dg[p, i, j] = d_p g_ij:
    sym = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
    return 0.5 * np.einsum("kl,ijl->kij", ginv, sym)


def curvature_from_chart(chart, step=1e-3, stencil_order=4):
    """Curvature tensor at the origin of a (near-)normal chart.

    Central differences of the Christoffel symbols plus the quadratic
    Christoffel terms; the output is returned in the library convention and
    validated against the tensor symmetries at a tolerance that scales with
    the discretization error.
    """
    if stencil_order not in _STENCILS:
        raise MalformedInput("stencil_order must be 2 or 4")
    n = chart.dimension
    g0 = chart(np.zeros(n))
    if np.max(np.abs(g0 - np.eye(n))) > 1e-8:
        raise MalformedInput("chart is not normal at the origin (g(0) != I)")
    weights, offsets, denom = _STENCILS[stencil_order]

    gamma0 = _christoffel(chart, np.zeros(n), step, stencil_order)
    dgamma = np.zeros((n, n, n, n))  # dgamma[a, k, i, j] = d_a Gamma^k_ij
    for a in range(n):
        acc = np.zeros((n, n, n))
        for w, o in zip(weights, offsets):
            x = np.zeros(n)
            x[a] = o * step
            acc += w * _christoffel(chart, x, step, stencil_order)
        dgamma[a] = acc / (denom * step)

    # R^c_{d a b} = d_a Gamma^c_bd - d_b Gamma^c_ad
    #              + Gamma^c_am Gamma^m_bd - Gamma^c_bm Gamma^m_ad,
    # and with g(0) = I the library components are R[a,b,c,d] = R^c_{d a b}.
    R = np.zeros((n, n, n, n))
    quad = np.einsum("cam,mbd->abcd", gamma0, gamma0)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        R[a, b, c, d] = (dgamma[a, c, b, d] - dgamma[b, c, a, d]
                         + quad[a, b, c, d] - quad[b, a, c, d])

    sym_tol = max(1e-8, 100.0 * step ** stencil_order)
    return CurvatureTensor(R).validate(sym_tol)
