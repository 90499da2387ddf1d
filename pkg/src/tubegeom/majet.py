"""Tube-potential jets and Monge-Ampere residuals.

The strictly plurisubharmonic potential of the tube complexification over a
Riemannian manifold restricts, in geodesic normal coordinates, to

    rho(x + iy) = sum_i y_i^2
                  - (1/3) sum_{ipjq} R[i,p,j,q] x_p x_q y_i y_j  + higher,

with no cubic, pure-x, or pure-quartic-y terms.  ``potential_expansion``
builds this jet from a curvature tensor; ``ma_residual`` measures how well
any potential jet satisfies the degenerate Monge-Ampere identity

    sum_a rho^a rho_a - 2 rho = 0,   rho^a = sum_b rho^{a bbar} rho_bbar,

computed with exact Wirtinger calculus on jets and a Neumann-series Hessian
inverse.  ``solve_quartic_coefficients`` recovers the free quartic
coefficients of the ansatz directly from the residual, independently of the
closed form, by matching pure-y degree-4 terms at x = 0.

Normalization: the fiber quadratic carries coefficient ``FIBER_SCALE = 1``
(so ``rho = |y|^2`` on the fiber over the base point).  The alternative
convention ``rho = |v|^2 / 2`` seen elsewhere corresponds to 0.5; every
formula here assumes the value below.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateHessian, MalformedInput, SingularSystem,
                     UnorderedIndices)
from .jets import (JetPolynomial, matrix_constant_part, matrix_inverse,
                   wirtinger_z, wirtinger_zbar)

FIBER_SCALE = 1.0

DEFAULT_DEGREE = 6  # exposes the first surviving residual order above four


def potential_expansion(tensor, max_degree=DEFAULT_DEGREE):
    """Degree-4 jet of the tube potential in normal coordinates."""
    tensor.validate()
    n = tensor.dimension
    R = tensor.components
    num_vars = 2 * n
    coeffs = {}
    for i in range(n):
        powers = [0] * num_vars
        powers[n + i] = 2
        coeffs[tuple(powers)] = FIBER_SCALE
    for i, p, j, q in itertools.product(range(n), repeat=4):
        v = R[i, p, j, q]
        if v == 0.0:
            continue
        powers = [0] * num_vars
        powers[p] += 1
        powers[q] += 1
        powers[n + i] += 1
        powers[n + j] += 1
        key = tuple(powers)
        coeffs[key] = coeffs.get(key, 0.0) - v / 3.0
    return JetPolynomial(num_vars, max_degree, coeffs)


def _fiber_dimension(rho):
    if rho.num_vars % 2:
        raise MalformedInput("potential jets use 2n variables (x then y)")
    return rho.num_vars // 2


def complex_hessian(rho):
    """Matrix of jets H[a][b] = d^2 rho / dz_a dzbar_b."""
    n = _fiber_dimension(rho)
    return [[wirtinger_zbar(wirtinger_z(rho, a, n), b, n) for b in range(n)]
            for a in range(n)]


def ma_residual(rho, hessian_tol=1e-8):
    """Jet of sum_a rho^a rho_a - 2 rho.

    The raised index follows the convention sum_b rho^{a bbar} rho_{c bbar}
    = delta_{ac}.  Raises DegenerateHessian when the constant part of the
    complex Hessian is not positive-definite.
    """
    n = _fiber_dimension(rho)
    H = complex_hessian(rho)
    H0 = matrix_constant_part(H)
    eigs = np.linalg.eigvalsh(0.5 * (H0 + H0.conj().T))
    if np.min(eigs) < hessian_tol:
        raise DegenerateHessian(
            f"quadratic part not positive-definite (min eigenvalue {np.min(eigs):.3e})")
    try:
        N = matrix_inverse(H)
    except SingularSystem as exc:  # pragma: no cover - guarded by eig check
        raise DegenerateHessian(str(exc)) from exc

    dz = [wirtinger_z(rho, a, n) for a in range(n)]
    dzbar = [wirtinger_zbar(rho, b, n) for b in range(n)]

    residual = (-2.0) * rho
    for a in range(n):
        raised = JetPolynomial.zero(rho.num_vars, rho.max_degree)
        for b in range(n):
            raised = raised + N[b][a] * dzbar[b]
        residual = residual + raised * dz[a]
    return residual


def invert_near_identity(matrix_jet):
    """Inverse of ``I + a(y)`` with ``a`` homogeneous of degree 2.

    Validates the shape (identity constant part, purely degree-2
    perturbation) and returns the jet inverse, whose degree-2 part is
    ``-a_ij`` off the diagonal and ``1 - a_jj`` on it.
    """
    size = len(matrix_jet)
    num_vars = matrix_jet[0][0].num_vars
    for i in range(size):
        for j in range(size):
            entry = matrix_jet[i][j]
            const = entry.coefficient((0,) * num_vars)
            expected = 1.0 if i == j else 0.0
            if abs(const - expected) > 1e-12:
                raise MalformedInput("constant part must be the identity")
            rest = entry - JetPolynomial.constant(const, num_vars, entry.max_degree)
            if any(sum(p) != 2 for p in rest.coeffs):
                raise MalformedInput("perturbation must be homogeneous of degree 2")
    return matrix_inverse(matrix_jet)


@dataclass(frozen=True)
class QuarticCoefficients:
    """Free quartic y-coefficients of the potential ansatz.

    ``values`` maps non-decreasing quadruples (i <= j <= k <= l) to the
    coefficient of y_i y_j y_k y_l; any other arrangement counts as zero.
    The derived single-shift and double-shift sums used by the matching
    combinatorics are exposed as methods.
    """

    dimension: int
    values: dict

    def coefficient(self, i, j, k, l):
        return self.values.get((i, j, k, l), 0.0)

    def shift_sum(self, a, i, j, k):
        """Coefficient sum with ``a`` inserted in each of the 4 slots."""
        return (self.coefficient(a, i, j, k) + self.coefficient(i, a, j, k)
                + self.coefficient(i, j, a, k) + self.coefficient(i, j, k, a))

    def double_shift_sum(self, a, b, k, l):
        """Second-layer sum: shift_sum with ``a`` walked through (b, k, l)."""
        return (self.shift_sum(b, a, k, l) + self.shift_sum(b, k, a, l)
                + self.shift_sum(b, k, l, a))

    def max_abs(self):
        return max((abs(v) for v in self.values.values()), default=0.0)


def ordered_quadruples(n):
    return list(itertools.combinations_with_replacement(range(n), 4))


def permutation_identity_deviation(quartic, i, j, k, l):
    """Deviation of the permutation identity tying the shifted sums back to
    the coefficient itself.

    Over the distinct arrangements (a, b, c, d) of the multiset {i, j, k, l},

        sum [ shift(a; b, c, d) - double_shift(d, c, a, b) / 2 ]
            = -2 * coefficient(i, j, k, l),

    so the returned value (the left side plus twice the coefficient) must
    vanish for any coefficient table respecting the ordering convention.
    Summing with multiplicity instead of over distinct arrangements breaks
    the identity for repeated indices.
    """
    if not (i <= j <= k <= l):
        raise UnorderedIndices("quadruple must be non-decreasing")
    total = 0.0
    for a, b, c, d in sorted(set(itertools.permutations((i, j, k, l)))):
        total += quartic.shift_sum(a, b, c, d)
        total -= 0.5 * quartic.double_shift_sum(d, c, a, b)
    return total + 2.0 * quartic.coefficient(i, j, k, l)


def _quartic_ansatz(tensor, quartic_values, max_degree=4):
    """Potential ansatz: expansion from R plus free pure-y quartic terms."""
    n = tensor.dimension
    rho = potential_expansion(tensor, max_degree)
    extra = {}
    for (i, j, k, l), v in quartic_values.items():
        powers = [0] * (2 * n)
        for idx in (i, j, k, l):
            powers[n + idx] += 1
        key = tuple(powers)
        extra[key] = extra.get(key, 0.0) + v
    return rho + JetPolynomial(2 * n, max_degree, extra)


def _pure_y_quartic_vector(residual, n, quads):
    out = np.zeros(len(quads))
    for idx, (i, j, k, l) in enumerate(quads):
        powers = [0] * (2 * n)
        for m in (i, j, k, l):
            powers[n + m] += 1
        out[idx] = float(np.real(residual.coefficient(tuple(powers))))
    return out


def solve_quartic_coefficients(tensor, cond_limit=1e8):
    """Solve for the free quartic coefficients directly from the identity.

    Imposes the Monge-Ampere residual on the quartic ansatz and solves the
    (exactly affine) system obtained by matching the pure-y degree-4
    residual coefficients at x = 0.  The probe matrix depends only on the
    dimension, not on the curvature input.
    """
    tensor.validate()
    n = tensor.dimension
    quads = ordered_quadruples(n)

    flat = _zero_tensor_like(tensor)
    base = _pure_y_quartic_vector(
        ma_residual(_quartic_ansatz(flat, {}, 4)), n, quads)
    columns = []
    for q in quads:
        res = ma_residual(_quartic_ansatz(flat, {q: 1.0}, 4))
        columns.append(_pure_y_quartic_vector(res, n, quads) - base)
    L = np.column_stack(columns)
    if np.linalg.cond(L) > cond_limit:
        raise SingularSystem("quartic matching system is ill-conditioned")

    rhs = _pure_y_quartic_vector(ma_residual(_quartic_ansatz(tensor, {}, 4)),
                                 n, quads)
    solution = np.linalg.solve(L, -rhs)
    values = {q: float(v) for q, v in zip(quads, solution)}
    return QuarticCoefficients(n, values)


def _zero_tensor_like(tensor):
    from .curvature import CurvatureTensor
    n = tensor.dimension
    return CurvatureTensor(np.zeros((n, n, n, n)))


def matching_cross_check(tensor, quartic):
    """Largest deviation of 3*A = (1/6) * permutation curvature sum.

    The degree-4 matching step equates three times each quartic coefficient
    with one sixth of the curvature sum over distinct arrangements
    (a, b, c, d) of the index multiset of R[a,d,b,c] + R[a,c,b,d]; both
    sides vanish identically, and this returns the worst numerical gap.
    """
    R = tensor.components
    worst = 0.0
    for (i, j, k, l) in ordered_quadruples(tensor.dimension):
        total = 0.0
        for a, b, c, d in sorted(set(itertools.permutations((i, j, k, l)))):
            total += R[a, d, b, c] + R[a, c, b, d]
        gap = abs(3.0 * quartic.coefficient(i, j, k, l) - total / 6.0)
        worst = max(worst, gap)
    return worst


# -- residual scaling study --------------------------------------------

def residual_sup_on_polydisk(residual, n, eps, samples=400, rng=None):
    """Sup of |residual| over sampled points of the polydisk of radius eps."""
    if rng is None:
        rng = np.random.default_rng(2024)
    pts = rng.uniform(-1.0, 1.0, size=(samples, 2 * n)) * eps
    vals = residual.evaluate(pts)
    return float(np.max(np.abs(vals)))


def residual_scaling_table(rho, eps_values=None, samples=400, seed=2024):
    """Rows (eps, sup |residual|) for the numerically evaluated identity."""
    n = _fiber_dimension(rho)
    residual = ma_residual(rho)
    if eps_values is None:
        eps_values = np.geomspace(1e-2, 1e-1, 7)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, size=(samples, 2 * n))
    rows = []
    for eps in eps_values:
        vals = residual.evaluate(pts * eps)
        rows.append((float(eps), float(np.max(np.abs(vals)))))
    return rows


def fitted_loglog_slope(rows):
    """Least-squares slope of log(sup) against log(eps)."""
    eps = np.array([r[0] for r in rows])
    sup = np.array([max(r[1], 1e-300) for r in rows])
    return float(np.polyfit(np.log(eps), np.log(sup), 1)[0])


def scaling_table_csv(rows):
    lines = ["eps,sup_residual"]
    lines += [f"{eps:.6e},{sup:.12e}" for eps, sup in rows]
    return "\n".join(lines) + "\n"


def quartic_to_json(quartic):
    rows = [[list(k), v] for k, v in sorted(quartic.values.items())]
    return json.dumps({"kind": "quartic_coefficients",
                       "dimension": quartic.dimension, "values": rows})
