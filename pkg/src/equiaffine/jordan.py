"""Octonion and exceptional Jordan-algebra arithmetic.

Octonions are built by Cayley-Dickson doubling from the reals with the
convention (a, b)(c, d) = (ac - conj(d) b, da + b conj(c)), basis ordered
(1, e1, ..., e7).  The Albert algebra is the 27-dimensional space of 3x3
octonion Hermitian matrices with the symmetrized product X o Y =
(XY + YX)/2, trace inner product, Freudenthal cross product and cubic
determinant.  The coordinate basis is frozen as (E1, E2, E3,
F1(e0..e7), F2(e0..e7), F3(e0..e7)) with

    F1(x) = [[0,0,0],[0,0,x],[0,conj(x),0]]   (and cyclic for F2, F3),

so a matrix with diagonal (xi1, xi2, xi3) and octonion entries x1, x2,
x3 has coordinates (xi1, xi2, xi3, x1, x2, x3).  Note the F-basis
vectors have trace-form norm squared 2, not 1.

The equivariant-orbit data built from this algebra (base point C * I3,
induced metric g_o, cubic form A_o on the traceless part) is packaged by
e6_embedding_data together with its internal consistency residuals.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

OCT_DIM = 8
JORDAN_DIM = 27

_CONJ_SIGNS = np.array([1.0] + [-1.0] * 7)


@lru_cache(maxsize=1)
def oct_table() -> np.ndarray:
    """Structure tensor M with e_i e_j = sum_k M[i, j, k] e_k."""
    t = np.ones((1, 1, 1))
    while t.shape[0] < OCT_DIM:
        n = t.shape[0]
        conj = -np.eye(n)
        conj[0, 0] = 1.0
        new = np.zeros((2 * n, 2 * n, 2 * n))
        new[:n, :n, :n] = t
        new[:n, n:, n:] = np.einsum("jik->ijk", t)
        new[n:, :n, n:] = np.einsum("jl,ilk->ijk", conj, t)
        new[n:, n:, :n] = -np.einsum("jl,lik->ijk", conj, t)
        t = new
    t.setflags(write=False)
    return t


def oct_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Octonion product; broadcasts over leading axes."""
    return np.einsum("...i,...j,ijk->...k", np.asarray(a, float), np.asarray(b, float), oct_table())


def oct_conj(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, float) * _CONJ_SIGNS


def oct_inner(a: np.ndarray, b: np.ndarray) -> float:
    """(x, y) = sum of coefficient products; (x, x) = |x|^2."""
    return float(np.dot(np.asarray(a, float), np.asarray(b, float)))


def oct_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a, float)))


def oct_unit(k: int) -> np.ndarray:
    e = np.zeros(OCT_DIM)
    e[k] = 1.0
    return e


class JordanMatrix:
    """3x3 octonion Hermitian matrix stored as a (3, 3, 8) real array."""

    __slots__ = ("entries",)

    def __init__(self, entries: np.ndarray):
        entries = np.asarray(entries, float)
        if entries.shape != (3, 3, OCT_DIM):
            raise ValueError("JordanMatrix needs a (3, 3, 8) array")
        herm = entries - oct_conj(entries).transpose(1, 0, 2)
        if np.max(np.abs(herm)) > 1e-12 * max(1.0, np.max(np.abs(entries))):
            raise ValueError("entries are not octonion Hermitian")
        self.entries = entries

    @classmethod
    def from_parts(cls, xi, x1, x2, x3) -> "JordanMatrix":
        """Diagonal reals (xi1, xi2, xi3) and octonions per the layout
        [[xi1, x3, conj(x2)], [conj(x3), xi2, x1], [x2, conj(x1), xi3]]."""
        x1, x2, x3 = (np.asarray(v, float) for v in (x1, x2, x3))
        m = np.zeros((3, 3, OCT_DIM))
        for i in range(3):
            m[i, i, 0] = xi[i]
        m[0, 1], m[1, 0] = x3, oct_conj(x3)
        m[1, 2], m[2, 1] = x1, oct_conj(x1)
        m[0, 2], m[2, 0] = oct_conj(x2), x2
        return cls(m)

    @classmethod
    def from_coords(cls, coords: np.ndarray) -> "JordanMatrix":
        coords = np.asarray(coords, float)
        if coords.shape != (JORDAN_DIM,):
            raise ValueError("expected 27 coordinates")
        return cls.from_parts(coords[:3], coords[3:11], coords[11:19], coords[19:27])

    def coords(self) -> np.ndarray:
        """Coordinates in the frozen (E_i, F_i(e_k)) basis."""
        out = np.empty(JORDAN_DIM)
        out[:3] = self.entries[0, 0, 0], self.entries[1, 1, 0], self.entries[2, 2, 0]
        out[3:11] = self.entries[1, 2]
        out[11:19] = self.entries[2, 0]
        out[19:27] = self.entries[0, 1]
        return out

    @classmethod
    def identity(cls) -> "JordanMatrix":
        return cls.from_parts(np.ones(3), np.zeros(8), np.zeros(8), np.zeros(8))

    @classmethod
    def diag_unit(cls, i: int) -> "JordanMatrix":
        xi = np.zeros(3)
        xi[i - 1] = 1.0
        return cls.from_parts(xi, np.zeros(8), np.zeros(8), np.zeros(8))

    @classmethod
    def off_diag(cls, i: int, x) -> "JordanMatrix":
        """F_i(x) for i in {1, 2, 3}."""
        parts = [np.zeros(8), np.zeros(8), np.zeros(8)]
        parts[i - 1] = np.asarray(x, float)
        return cls.from_parts(np.zeros(3), *parts)

    def __add__(self, other):
        return JordanMatrix(self.entries + other.entries)

    def __sub__(self, other):
        return JordanMatrix(self.entries - other.entries)

    def __mul__(self, scalar):
        return JordanMatrix(self.entries * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return JordanMatrix(-self.entries)

    def trace(self) -> float:
        return float(self.entries[0, 0, 0] + self.entries[1, 1, 0] + self.entries[2, 2, 0])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))


def _mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Plain (non-Hermitian) product of 3x3 octonion matrices."""
    return np.einsum("abi,bcj,ijk->ack", a, b, oct_table())


def jordan_product(X: JordanMatrix, Y: JordanMatrix) -> JordanMatrix:
    m = 0.5 * (_mat_mul(X.entries, Y.entries) + _mat_mul(Y.entries, X.entries))
    return JordanMatrix(m)


def jordan_inner(X: JordanMatrix, Y: JordanMatrix) -> float:
    return jordan_product(X, Y).trace()


def jordan_cross(X: JordanMatrix, Y: JordanMatrix) -> JordanMatrix:
    """Freudenthal cross product X x Y."""
    prod = jordan_product(X, Y)
    tx, ty = X.trace(), Y.trace()
    scal = tx * ty - prod.trace()
    m = 2.0 * prod.entries - ty * X.entries - tx * Y.entries + scal * JordanMatrix.identity().entries
    return JordanMatrix(0.5 * m)


def jordan_det(X: JordanMatrix) -> float:
    return jordan_inner(jordan_cross(X, X), X) / 3.0


def jordan_ops(X: JordanMatrix, Y: JordanMatrix) -> dict:
    """Product, inner product, cross product and det(X) in one call."""
    return {
        "product": jordan_product(X, Y),
        "inner": jordan_inner(X, Y),
        "cross": jordan_cross(X, Y),
        "det_X": jordan_det(X),
    }


def basis_27() -> list[JordanMatrix]:
    """The frozen coordinate basis E1, E2, E3, F_i(e_k)."""
    out = [JordanMatrix.diag_unit(i) for i in (1, 2, 3)]
    for i in (1, 2, 3):
        out.extend(JordanMatrix.off_diag(i, oct_unit(k)) for k in range(OCT_DIM))
    return out


def mult_operator(T: JordanMatrix) -> np.ndarray:
    """27x27 matrix of X -> T o X in the frozen basis."""
    cols = [jordan_product(T, e).coords() for e in basis_27()]
    return np.array(cols).T


def bracket_operator(A: np.ndarray) -> np.ndarray:
    """27x27 matrix of X -> [A, X] = AX - XA for skew A (conj(A)^t = -A).

    With zero diagonal these are the compact generators that fix I3;
    Hermiticity of the image is validated entrywise.
    """
    A = np.asarray(A, float)
    if A.shape != (3, 3, OCT_DIM):
        raise ValueError("expected a (3, 3, 8) octonion matrix")
    skew = A + oct_conj(A).transpose(1, 0, 2)
    if np.max(np.abs(skew)) > 1e-12 * max(1.0, np.max(np.abs(A))):
        raise ValueError("matrix is not octonion skew-Hermitian")
    cols = []
    for e in basis_27():
        img = _mat_mul(A, e.entries) - _mat_mul(e.entries, A)
        cols.append(JordanMatrix(img).coords())
    return np.array(cols).T


def random_skew_offdiag(rng: np.random.Generator) -> np.ndarray:
    """Random element with conj(A)^t = -A and zero diagonal."""
    a = np.zeros((3, 3, OCT_DIM))
    for i, j in ((0, 1), (0, 2), (1, 2)):
        x = rng.standard_normal(OCT_DIM)
        a[i, j] = x
        a[j, i] = -oct_conj(x)
    return a


def traceless_basis() -> list[JordanMatrix]:
    """A (non-orthogonal) basis of the 26-dimensional traceless part."""
    out = [
        JordanMatrix.diag_unit(1) - JordanMatrix.diag_unit(2),
        JordanMatrix.diag_unit(2) - JordanMatrix.diag_unit(3),
    ]
    for i in (1, 2, 3):
        out.extend(JordanMatrix.off_diag(i, oct_unit(k)) for k in range(OCT_DIM))
    return out


def random_traceless(rng: np.random.Generator) -> JordanMatrix:
    xi = rng.standard_normal(3)
    xi -= xi.mean()
    return JordanMatrix.from_parts(
        xi, rng.standard_normal(8), rng.standard_normal(8), rng.standard_normal(8)
    )


@dataclass(frozen=True)
class EmbeddingData:
    """Base-point data of the determinant-preserving orbit of C * I3."""

    L1: float
    C: float
    x_o: JordanMatrix
    on_basis: tuple[JordanMatrix, ...]  # g_o-orthonormal basis of the traceless part
    g_o: np.ndarray  # (26, 26) in on_basis coordinates (the identity, kept for checks)
    A_o: np.ndarray  # (26, 26, 26) in on_basis coordinates

    @property
    def dim(self) -> int:
        return len(self.on_basis)


def e6_embedding_data(L1: float) -> EmbeddingData:
    """Metric and cubic form of the 26-dimensional orbit x = C * L(I3).

    C = sqrt(3) (-3 L1)^(-(n+2)/2) with n = 26; g_o(X, Y) =
    -(1/(3 L1)) tr(X o Y) on traceless matrices; A_o(X, Y, Z) =
    g_o(-L1 (X o Y - tr(X o Y) I3 / 3), Z) = (X o Y, Z) / 3.
    """
    if L1 >= 0:
        raise ValueError("the orbit construction needs L1 < 0")
    n = JORDAN_DIM - 1
    C = np.sqrt(3.0) * (-3.0 * L1) ** (-(n + 2) / 2.0)
    x_o = C * JordanMatrix.identity()

    def g_o_pair(X, Y):
        return -jordan_inner(X, Y) / (3.0 * L1)

    # Gram-Schmidt in the g_o inner product
    on = []
    for v in traceless_basis():
        w = v
        for u in on:
            w = w - g_o_pair(w, u) * u
        w = w * (1.0 / np.sqrt(g_o_pair(w, w)))
        on.append(w)

    gram = np.array([[g_o_pair(a, b) for b in on] for a in on])
    prods = [[jordan_product(a, b) for b in on] for a in on]
    A_o = np.array([[[jordan_inner(prods[i][j], z) / 3.0 for z in on] for j in range(n)] for i in range(n)])

    return EmbeddingData(L1=L1, C=C, x_o=x_o, on_basis=tuple(on), g_o=gram, A_o=A_o)


def gaussf_residual(data: EmbeddingData, X: JordanMatrix, Y: JordanMatrix) -> float:
    """Residual of the second-derivative decomposition C(X o Y) =
    C(X o Y - tr(X o Y) I3 / 3) + C (X, Y) I3 / 3 for traceless X, Y."""
    C = data.C
    prod = jordan_product(X, Y)
    t = prod.trace()
    lhs = C * prod
    tangential = C * (prod - (t / 3.0) * JordanMatrix.identity())
    transversal = (C * jordan_inner(X, Y) / 3.0) * JordanMatrix.identity()
    return (lhs - tangential - transversal).max_abs()


def hypersphere_residual(data: EmbeddingData) -> float:
    """max |xi + L1 x_o| where xi is the g_o-trace of the transversal
    second-derivative parts, (1/n) sum_i C (T_i, T_i) I3 / 3 over the
    g_o-orthonormal basis."""
    n = data.dim
    acc = np.zeros((3, 3, OCT_DIM))
    for t in data.on_basis:
        acc += (data.C * jordan_inner(t, t) / 3.0) * JordanMatrix.identity().entries
    xi = JordanMatrix(acc / n)
    return (xi + data.L1 * data.x_o).max_abs()


def transversality_residual(data: EmbeddingData, T: JordanMatrix) -> float:
    """(T, I3) = tr T must vanish for tangent directions T."""
    return abs(jordan_inner(T, JordanMatrix.identity()))


def apolarity_residual(data: EmbeddingData) -> float:
    """g_o-trace of A_o in the first two slots (must vanish)."""
    g_inv = np.linalg.inv(data.g_o)
    return float(np.max(np.abs(np.einsum("ij,ijk->k", g_inv, data.A_o))))
