"""Truncated multivariate polynomial (jet) arithmetic.

A jet is a polynomial in ``num_vars`` real variables kept only up to total
degree ``max_degree``.  All arithmetic truncates consistently, so a product
of two jets is the exact degree-``max_degree`` part of the product of the
underlying polynomials.  Coefficients may be real or complex; complex
coefficients appear once Wirtinger derivatives enter.

The tube-potential work uses the variable layout ``(x_1..x_n, y_1..y_n)``:
variable ``i`` is ``x_{i+1}`` and variable ``n+i`` is ``y_{i+1}``.  The
Wirtinger helpers below assume that layout; the rest of the module is
agnostic.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import MalformedInput, SingularSystem


class JetPolynomial:
    """Sparse polynomial truncated at a total degree bound.

    Terms are stored as a dict mapping exponent tuples (one exponent per
    variable) to scalar coefficients.  Instances are treated as immutable;
    all operations return new jets.
    """

    __slots__ = ("num_vars", "max_degree", "coeffs")

    def __init__(self, num_vars, max_degree, coeffs=None):
        self.num_vars = int(num_vars)
        self.max_degree = int(max_degree)
        cleaned = {}
        if coeffs:
            for powers, c in coeffs.items():
                if len(powers) != self.num_vars:
                    raise MalformedInput(
                        f"exponent tuple {powers} has {len(powers)} entries, "
                        f"expected {self.num_vars}")
                if sum(powers) > self.max_degree or c == 0:
                    continue
                cleaned[tuple(int(p) for p in powers)] = c
        self.coeffs = cleaned

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, num_vars, max_degree):
        return cls(num_vars, max_degree)

    @classmethod
    def constant(cls, value, num_vars, max_degree):
        return cls(num_vars, max_degree, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, index, num_vars, max_degree):
        powers = [0] * num_vars
        powers[index] = 1
        return cls(num_vars, max_degree, {tuple(powers): 1.0})

    # -- structure ----------------------------------------------------

    def coefficient(self, powers):
        """Coefficient of the monomial with the given exponent tuple."""
        return self.coeffs.get(tuple(powers), 0.0)

    def degree(self):
        """Largest total degree with a stored term (0 for the zero jet)."""
        return max((sum(p) for p in self.coeffs), default=0)

    def terms_of_degree(self, d):
        """Sub-jet keeping only terms of total degree exactly ``d``."""
        kept = {p: c for p, c in self.coeffs.items() if sum(p) == d}
        return JetPolynomial(self.num_vars, self.max_degree, kept)

    def truncated(self, new_max_degree):
        kept = {p: c for p, c in self.coeffs.items() if sum(p) <= new_max_degree}
        return JetPolynomial(self.num_vars, new_max_degree, kept)

    def is_real(self, tol=0.0):
        return all(abs(np.imag(c)) <= tol for c in self.coeffs.values())

    def real_part(self):
        return JetPolynomial(
            self.num_vars, self.max_degree,
            {p: float(np.real(c)) for p, c in self.coeffs.items()})

    def max_abs_coeff(self, degrees=None):
        """Largest |coefficient|, optionally restricted to a set of total degrees."""
        vals = [abs(c) for p, c in self.coeffs.items()
                if degrees is None or sum(p) in degrees]
        return max(vals, default=0.0)

    # -- arithmetic ---------------------------------------------------

    def _check_compatible(self, other):
        if self.num_vars != other.num_vars:
            raise MalformedInput("jets have different variable counts")

    def __add__(self, other):
        if np.isscalar(other):
            other = JetPolynomial.constant(other, self.num_vars, self.max_degree)
        self._check_compatible(other)
        bound = min(self.max_degree, other.max_degree)
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0.0) + c
        return JetPolynomial(self.num_vars, bound, out)

    __radd__ = __add__

    def __neg__(self):
        return JetPolynomial(self.num_vars, self.max_degree,
                             {p: -c for p, c in self.coeffs.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = JetPolynomial.constant(other, self.num_vars, self.max_degree)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return JetPolynomial(self.num_vars, self.max_degree,
                                 {p: c * other for p, c in self.coeffs.items()})
        self._check_compatible(other)
        bound = min(self.max_degree, other.max_degree)
        out = {}
        for p1, c1 in self.coeffs.items():
            d1 = sum(p1)
            for p2, c2 in other.coeffs.items():
                if d1 + sum(p2) > bound:
                    continue
                key = tuple(a + b for a, b in zip(p1, p2))
                out[key] = out.get(key, 0.0) + c1 * c2
        return JetPolynomial(self.num_vars, bound, out)

    __rmul__ = __mul__

    def partial(self, var_index):
        """Partial derivative with respect to one variable.

        The result of differentiating a degree-d jet is complete through
        degree d-1, so the degree bound is kept as is.
        """
        out = {}
        for p, c in self.coeffs.items():
            e = p[var_index]
            if e == 0:
                continue
            q = list(p)
            q[var_index] = e - 1
            key = tuple(q)
            out[key] = out.get(key, 0.0) + e * c
        return JetPolynomial(self.num_vars, self.max_degree, out)

    def evaluate(self, points):
        """Evaluate at one point (1-d array) or many points ((P, num_vars))."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.shape[1] != self.num_vars:
            raise MalformedInput("point dimension does not match variable count")
        vals = np.zeros(pts.shape[0], dtype=complex)
        for p, c in self.coeffs.items():
            mono = np.ones(pts.shape[0])
            for k, e in enumerate(p):
                if e:
                    mono = mono * pts[:, k] ** e
            vals += c * mono
        if self.is_real():
            vals = vals.real
        return vals[0] if single else vals

    def __repr__(self):
        n_terms = len(self.coeffs)
        return (f"JetPolynomial(num_vars={self.num_vars}, "
                f"max_degree={self.max_degree}, terms={n_terms})")

    # -- serialization ------------------------------------------------

    def to_json(self):
        terms = [{"powers": list(p), "re": float(np.real(c)), "im": float(np.imag(c))}
                 for p, c in sorted(self.coeffs.items())]
        return json.dumps({"kind": "jet", "num_vars": self.num_vars,
                           "max_degree": self.max_degree, "terms": terms})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if data.get("kind") != "jet":
            raise MalformedInput("not a jet record")
        coeffs = {}
        for t in data["terms"]:
            c = t["re"] + 1j * t["im"]
            coeffs[tuple(t["powers"])] = c.real if c.imag == 0.0 else c
        return cls(data["num_vars"], data["max_degree"], coeffs)


# -- Wirtinger derivatives on the (x_1..x_n, y_1..y_n) layout ----------

def wirtinger_z(jet, alpha, n):
    """d/dz_alpha = (d/dx_alpha - i d/dy_alpha) / 2 for the 2n-variable layout."""
    return 0.5 * (jet.partial(alpha) - 1j * jet.partial(n + alpha))


def wirtinger_zbar(jet, alpha, n):
    """d/dzbar_alpha = (d/dx_alpha + i d/dy_alpha) / 2."""
    return 0.5 * (jet.partial(alpha) + 1j * jet.partial(n + alpha))


# -- matrix jets -------------------------------------------------------

def matrix_identity(size, num_vars, max_degree):
    return [[JetPolynomial.constant(1.0 if i == j else 0.0, num_vars, max_degree)
             for j in range(size)] for i in range(size)]


def matrix_multiply(A, B):
    size = len(A)
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = A[i][0] * B[0][j]
            for k in range(1, size):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def matrix_constant_part(A):
    size = len(A)
    zero = (0,) * A[0][0].num_vars
    return np.array([[complex(A[i][j].coefficient(zero)) for j in range(size)]
                     for i in range(size)])


def matrix_inverse(A, cond_limit=1e12):
    """Jet-matrix inverse by a degree-truncated Neumann series.

    Writes A = A0 + dA with A0 the constant part, requires A0 invertible,
    and expands (I + A0^-1 dA)^-1 A0^-1.  Since dA has no constant term the
    series terminates at the degree bound, so the result is exact at jet
    level: A @ inverse == identity through max_degree.
    """
    size = len(A)
    num_vars = A[0][0].num_vars
    bound = min(A[i][j].max_degree for i in range(size) for j in range(size))
    A0 = matrix_constant_part(A)
    if not np.all(np.isfinite(A0)) or np.linalg.cond(A0) > cond_limit:
        raise SingularSystem("constant part of the jet matrix is singular")
    A0inv = np.linalg.inv(A0)

    # E = A0^-1 dA as a jet matrix with zero constant part
    E = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = JetPolynomial.zero(num_vars, bound)
            for k in range(size):
                dA = A[k][j] - JetPolynomial.constant(A0[k, j], num_vars, bound)
                acc = acc + A0inv[i, k] * dA
            row.append(acc)
        E.append(row)

    # Neumann sum I - E + E^2 - ... ; E has valuation >= 1 so powers beyond
    # the degree bound vanish identically.
    series = matrix_identity(size, num_vars, bound)
    power = matrix_identity(size, num_vars, bound)
    for k in range(1, bound + 1):
        power = matrix_multiply(power, E)
        if all(not power[i][j].coeffs for i in range(size) for j in range(size)):
            break
        sign = -1.0 if k % 2 else 1.0
        for i in range(size):
            for j in range(size):
                series[i][j] = series[i][j] + sign * power[i][j]

    # inverse = series @ A0^-1
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = JetPolynomial.zero(num_vars, bound)
            for k in range(size):
                acc = acc + series[i][k] * A0inv[k, j]
            row.append(acc)
        out.append(row)
    return out
