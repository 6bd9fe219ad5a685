"""Truncated multivariate Taylor-jet arithmetic.

A jet stores the Taylor expansion of a scalar function around a point,
truncated at a fixed total degree.  The coefficient attached to a
multi-index ``alpha`` is the Taylor-normalized derivative
``d^alpha f / alpha!``, so the zero multi-index carries the plain value
and degree-1 coefficients carry the gradient.  Arithmetic is exact
truncation: products are Cauchy products with all terms of total degree
above ``order`` dropped.

Multi-indices are enumerated in graded lexicographic order, which makes
monomials of degree <= k a prefix of the enumeration; truncating a jet
to a lower order is then just an array slice.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_ORDER = 4


class JetDomainError(ArithmeticError):
    """Raised when an elementary function is applied outside its domain."""


@lru_cache(maxsize=None)
def monomials(num_vars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples with total degree <= order, graded-lex sorted."""
    result = []
    for deg in range(order + 1):
        level = []

        def build(prefix, remaining, slots):
            if slots == 1:
                level.append(prefix + (remaining,))
                return
            for k in range(remaining, -1, -1):
                build(prefix + (k,), remaining - k, slots - 1)

        build((), deg, num_vars)
        result.extend(level)
    return tuple(result)


@lru_cache(maxsize=None)
def _index_map(num_vars: int, order: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(monomials(num_vars, order))}


@lru_cache(maxsize=None)
def _product_table(num_vars: int, order: int):
    """Index triples (i, j, k) with monomial_i * monomial_j = monomial_k."""
    mono = monomials(num_vars, order)
    idx = _index_map(num_vars, order)
    ii, jj, kk = [], [], []
    for i, a in enumerate(mono):
        da = sum(a)
        for j, b in enumerate(mono):
            if da + sum(b) > order:
                continue
            ii.append(i)
            jj.append(j)
            kk.append(idx[tuple(x + y for x, y in zip(a, b))])
    return np.array(ii), np.array(jj), np.array(kk)


@lru_cache(maxsize=None)
def _partial_table(num_vars: int, order: int, var: int):
    """Source/target indices and factors for d/du_var on Taylor coefficients.

    Maps the order-`order` coefficient array to an order-`order-1` one:
    coeff'[beta] = (beta_var + 1) * coeff[beta + e_var].
    """
    idx = _index_map(num_vars, order)
    mono_lo = monomials(num_vars, order - 1)
    src, fac = [], []
    for b in mono_lo:
        shifted = tuple(e + (1 if t == var else 0) for t, e in enumerate(b))
        src.append(idx[shifted])
        fac.append(b[var] + 1)
    return np.array(src), np.array(fac, dtype=float)


class Jet:
    """Truncated Taylor expansion of a scalar function of ``num_vars`` variables."""

    __slots__ = ("num_vars", "order", "coeffs")

    def __init__(self, num_vars: int, order: int, coeffs: np.ndarray):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
        self.num_vars = num_vars
        self.order = order
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.shape != (len(monomials(num_vars, order)),):
            raise ValueError("coefficient vector has the wrong length")

    # -- constructors ------------------------------------------------

    @classmethod
    def constant(cls, value: float, num_vars: int, order: int) -> "Jet":
        c = np.zeros(len(monomials(num_vars, order)))
        c[0] = value
        return cls(num_vars, order, c)

    @classmethod
    def variable(cls, var: int, value: float, num_vars: int, order: int) -> "Jet":
        """The coordinate function u_var expanded around ``value``."""
        if not 0 <= var < num_vars:
            raise ValueError("variable index out of range")
        c = np.zeros(len(monomials(num_vars, order)))
        c[0] = value
        if order >= 1:
            unit = tuple(1 if t == var else 0 for t in range(num_vars))
            c[_index_map(num_vars, order)[unit]] = 1.0
        return cls(num_vars, order, c)

    # -- accessors ---------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def gradient(self) -> np.ndarray:
        """Degree-1 coefficients as a vector (the plain gradient)."""
        out = np.zeros(self.num_vars)
        if self.order < 1:
            return out
        idx = _index_map(self.num_vars, self.order)
        for v in range(self.num_vars):
            unit = tuple(1 if t == v else 0 for t in range(self.num_vars))
            out[v] = self.coeffs[idx[unit]]
        return out

    def coefficient(self, alpha: tuple[int, ...]) -> float:
        return float(self.coeffs[_index_map(self.num_vars, self.order)[alpha]])

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot extend a jet to a higher order")
        if order == self.order:
            return self
        return Jet(self.num_vars, order, self.coeffs[: len(monomials(self.num_vars, order))].copy())

    def partial(self, var: int) -> "Jet":
        """Partial derivative; the result is one order lower."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        src, fac = _partial_table(self.num_vars, self.order, var)
        return Jet(self.num_vars, self.order - 1, self.coeffs[src] * fac)

    def embed(self, num_vars: int, var_offset: int) -> "Jet":
        """Re-read this jet as one in ``num_vars`` variables, with variable i
        of this jet becoming variable ``var_offset + i``."""
        if var_offset + self.num_vars > num_vars:
            raise ValueError("embedded variables exceed target dimension")
        idx = _index_map(num_vars, self.order)
        out = np.zeros(len(monomials(num_vars, self.order)))
        for m, c in zip(monomials(self.num_vars, self.order), self.coeffs):
            if c == 0.0:
                continue
            big = [0] * num_vars
            big[var_offset : var_offset + self.num_vars] = m
            out[idx[tuple(big)]] = c
        return Jet(num_vars, self.order, out)

    # -- arithmetic --------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.num_vars != self.num_vars:
                raise ValueError("jets live in different variable spaces")
            if other.order != self.order:
                o = min(self.order, other.order)
                return self.truncate(o), other.truncate(o)
            return self, other
        return self, Jet.constant(float(other), self.num_vars, self.order)

    def __add__(self, other):
        a, b = self._coerce(other)
        return Jet(a.num_vars, a.order, a.coeffs + b.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return Jet(a.num_vars, a.order, a.coeffs - b.coeffs)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return Jet(a.num_vars, a.order, b.coeffs - a.coeffs)

    def __neg__(self):
        return Jet(self.num_vars, self.order, -self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.num_vars, self.order, self.coeffs * float(other))
        a, b = self._coerce(other)
        ii, jj, kk = _product_table(a.num_vars, a.order)
        out = np.zeros_like(a.coeffs)
        np.add.at(out, kk, a.coeffs[ii] * b.coeffs[jj])
        return Jet(a.num_vars, a.order, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.num_vars, self.order, self.coeffs / float(other))
        return self * recip(other)

    def __rtruediv__(self, other):
        return recip(self) * float(other)

    def __repr__(self):
        return f"Jet(n={self.num_vars}, order={self.order}, value={self.value:.6g})"


# -- composition with univariate series -------------------------------


def _compose_series(series: list[float], x: Jet) -> Jet:
    """Evaluate sum_k series[k] * (x - x.value)^k, truncated at x.order."""
    dx = x - x.value
    out = Jet.constant(series[-1], x.num_vars, x.order)
    for c in reversed(series[:-1]):
        out = out * dx + c
    return out


def exp(x: Jet) -> Jet:
    ev = math.exp(x.value)
    series = [ev / math.factorial(k) for k in range(x.order + 1)]
    return _compose_series(series, x)


def log(x: Jet) -> Jet:
    if x.value <= 0.0:
        raise JetDomainError(f"log of non-positive value part {x.value}")
    series = [math.log(x.value)]
    for k in range(1, x.order + 1):
        series.append((-1.0) ** (k + 1) / (k * x.value**k))
    return _compose_series(series, x)


def recip(x: Jet) -> Jet:
    if x.value == 0.0:
        raise JetDomainError("reciprocal of a jet with zero value part")
    series = [(-1.0) ** k / x.value ** (k + 1) for k in range(x.order + 1)]
    return _compose_series(series, x)


def power(x: Jet, p) -> Jet:
    """x**p for a rational (or float) constant exponent p.

    Non-negative integer exponents are evaluated by repeated squaring and
    stay valid at zero value parts; everything else requires a positive
    value part.
    """
    pf = float(p)
    if isinstance(p, (int, Fraction)) and pf == int(pf) and pf >= 0:
        k = int(pf)
        result = Jet.constant(1.0, x.num_vars, x.order)
        base = x
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result
    if x.value <= 0.0:
        raise JetDomainError(f"power {p} of non-positive value part {x.value}")
    series = []
    coeff = 1.0
    for k in range(x.order + 1):
        series.append(coeff * x.value ** (pf - k))
        coeff *= (pf - k) / (k + 1)
    return _compose_series(series, x)


def sqrt(x: Jet) -> Jet:
    return power(x, Fraction(1, 2))


def sin(x: Jet) -> Jet:
    s, c = math.sin(x.value), math.cos(x.value)
    cycle = [s, c, -s, -c]
    series = [cycle[k % 4] / math.factorial(k) for k in range(x.order + 1)]
    return _compose_series(series, x)


def cos(x: Jet) -> Jet:
    s, c = math.sin(x.value), math.cos(x.value)
    cycle = [c, -s, -c, s]
    series = [cycle[k % 4] / math.factorial(k) for k in range(x.order + 1)]
    return _compose_series(series, x)


def neg(x: Jet) -> Jet:
    return -x


_ELEMENTARY = {
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "sin": sin,
    "cos": cos,
    "neg": neg,
    "recip": recip,
}


def jet_eval(func: str, x: Jet, exponent=None) -> Jet:
    """Apply an elementary function to a jet.

    ``func`` is one of exp, log, sqrt, sin, cos, neg, recip, pow; for
    ``pow`` the rational ``exponent`` must be supplied.
    """
    if func == "pow":
        if exponent is None:
            raise ValueError("pow requires an exponent")
        return power(x, exponent)
    try:
        return _ELEMENTARY[func](x)
    except KeyError:
        raise ValueError(f"unknown elementary function {func!r}") from None


# -- linear algebra over jets ------------------------------------------


def _as_jet_matrix(mat) -> list[list[Jet]]:
    return [list(row) for row in mat]


def jet_solve(mat, rhs) -> list[list[Jet]]:
    """Solve A X = B where A is a square matrix of jets and B a matrix of
    jet columns, by Gaussian elimination with partial pivoting on value
    parts.  Returns X as a list of rows."""
    a = _as_jet_matrix(mat)
    b = _as_jet_matrix(rhs)
    n = len(a)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col].value))
        if abs(a[piv][col].value) == 0.0:
            raise np.linalg.LinAlgError("singular jet matrix")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        inv = recip(a[col][col])
        for r in range(col + 1, n):
            f = a[r][col] * inv
            for c in range(col + 1, n):
                a[r][c] = a[r][c] - f * a[col][c]
            for c in range(len(b[0])):
                b[r][c] = b[r][c] - f * b[col][c]
    x = [[None] * len(b[0]) for _ in range(n)]
    for row in range(n - 1, -1, -1):
        inv = recip(a[row][row])
        for c in range(len(b[0])):
            acc = b[row][c]
            for k in range(row + 1, n):
                acc = acc - a[row][k] * x[k][c]
            x[row][c] = acc * inv
    return x


def jet_det(mat) -> Jet:
    """Determinant of a square jet matrix.

    Division-free: elimination would need invertible (nonzero-value)
    pivots, but the determinant of a jet matrix is well defined even
    when every value part vanishes.  Uses the subset dynamic program
    over columns (Laplace expansion shared across row subsets), which
    is O(2^n n) jet operations and exact.
    """
    a = _as_jet_matrix(mat)
    n = len(a)
    some = a[0][0]
    # partial[S] = det of the top-|S| rows restricted to column set S
    partial = {0: Jet.constant(1.0, some.num_vars, some.order)}
    for row in range(n):
        nxt: dict[int, Jet] = {}
        for subset, sub_det in partial.items():
            for col in range(n):
                bit = 1 << col
                if subset & bit:
                    continue
                # permutation sign: parity of used columns above this one
                sign = -1.0 if (subset >> (col + 1)).bit_count() & 1 else 1.0
                term = sub_det * a[row][col] * sign
                key = subset | bit
                nxt[key] = term if key not in nxt else nxt[key] + term
        partial = nxt
    return partial[(1 << n) - 1]


def jet_inverse(mat) -> list[list[Jet]]:
    n = len(mat)
    some = mat[0][0]
    eye = [
        [Jet.constant(1.0 if i == j else 0.0, some.num_vars, some.order) for j in range(n)]
        for i in range(n)
    ]
    return jet_solve(mat, eye)
