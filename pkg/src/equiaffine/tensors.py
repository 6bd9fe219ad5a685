"""Intrinsic Riemannian tensor calculus on jet-valued metric fields.

Everything here is pointwise: a metric field is an n x n symmetric array
of jets expanded around one point, and the outputs (Christoffel symbols,
curvature, covariant derivatives) are plain numeric arrays at that point.

Curvature conventions: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
- nabla_[X,Y] Z, with fully covariant components
R_ijkl = g(R(d_i, d_j) d_k, d_l), Ricci R_ij = g^{kl} R_kijl, and the
normalized scalar curvature chi = sum g^{il} g^{jk} R_ijkl / (n(n-1)).
With these signs the unit round sphere has chi = +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Jet, jet_inverse

SPD_RTOL = 1e-10


class MetricError(ValueError):
    """Raised for metrics that are not symmetric positive definite."""


@dataclass(frozen=True)
class MetricField:
    """Symmetric positive definite metric given as jets around a point."""

    dim: int
    components: np.ndarray  # (n, n) object array of Jets

    def __post_init__(self):
        comp = np.asarray(self.components, dtype=object)
        object.__setattr__(self, "components", comp)
        if comp.shape != (self.dim, self.dim):
            raise MetricError("metric component array must be n x n")
        vals = self.values()
        if not np.allclose(vals, vals.T, atol=1e-12 * (1 + np.abs(vals).max())):
            raise MetricError("metric value part is not symmetric")
        check_spd(vals)

    def values(self) -> np.ndarray:
        return np.array([[self.components[i, j].value for j in range(self.dim)] for i in range(self.dim)])

    @property
    def order(self) -> int:
        return self.components[0, 0].order


def check_spd(values: np.ndarray) -> None:
    """Fail loudly if the value matrix is not (numerically) SPD."""
    eig = np.linalg.eigvalsh(values)
    if eig[0] <= SPD_RTOL * max(eig[-1], 0.0) or eig[-1] <= 0.0:
        raise MetricError(f"metric value part is not positive definite (eigenvalues {eig})")


@dataclass(frozen=True)
class CurvatureData:
    christoffel: np.ndarray  # Gamma^k_ij, shape (n, n, n) indexed [k, i, j]
    riemann: np.ndarray  # R_ijkl, shape (n, n, n, n)
    ricci: np.ndarray  # R_ij
    chi: float


def christoffel_jets(g: MetricField) -> np.ndarray:
    """Levi-Civita symbols Gamma^k_ij as jets (one order below the metric)."""
    if g.order < 1:
        raise ValueError("christoffel needs metric jets of order >= 1")
    n = g.dim
    lo = g.order - 1
    gl = [[g.components[i, j].truncate(lo) for j in range(n)] for i in range(n)]
    ginv = jet_inverse(gl)
    dg = [[[g.components[i, j].partial(l) for j in range(n)] for i in range(n)] for l in range(n)]
    gamma = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(i + 1):
                acc = None
                for l in range(n):
                    term = ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])
                    acc = term if acc is None else acc + term
                gamma[k, i, j] = gamma[k, j, i] = acc * 0.5
    return gamma


def christoffel(g: MetricField) -> np.ndarray:
    """Gamma^k_ij = g^{kl}(d_i g_jl + d_j g_il - d_l g_ij)/2, value parts."""
    gamma = christoffel_jets(g)
    n = g.dim
    return np.array([[[gamma[k, i, j].value for j in range(n)] for i in range(n)] for k in range(n)])


def riemann(g: MetricField) -> CurvatureData:
    """Full curvature data of a metric field (needs jet order >= 2)."""
    if g.order < 2:
        raise ValueError("riemann needs metric jets of order >= 2")
    n = g.dim
    gamma_jets = christoffel_jets(g)
    gamma = np.array([[[gamma_jets[k, i, j].value for j in range(n)] for i in range(n)] for k in range(n)])
    dgamma = np.zeros((n, n, n, n))  # dgamma[l, k, i, j] = d_l Gamma^k_ij
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(i + 1):
                    d = gamma_jets[k, i, j].partial(l).value
                    dgamma[l, k, i, j] = dgamma[l, k, j, i] = d
    # Rup[m, i, j, k]: R(d_i, d_j) d_k = Rup[m, i, j, k] d_m
    rup = (
        np.einsum("imjk->mijk", dgamma)
        - np.einsum("jmik->mijk", dgamma)
        + np.einsum("mil,ljk->mijk", gamma, gamma)
        - np.einsum("mjl,lik->mijk", gamma, gamma)
    )
    gval = g.values()
    ginv = np.linalg.inv(gval)
    riem = np.einsum("ml,mijk->ijkl", gval, rup)
    ricci = np.einsum("kl,kijl->ij", ginv, riem)
    chi = float(np.einsum("il,jk,ijkl->", ginv, ginv, riem)) / (n * (n - 1)) if n > 1 else 0.0
    return CurvatureData(christoffel=gamma, riemann=riem, ricci=ricci, chi=chi)


def cov_deriv_sym3(a_jets: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Covariant derivative A_ijk,l of a symmetric 3-tensor field.

    ``a_jets`` is an (n, n, n) object array of jets of order >= 1 and
    ``gamma`` the Christoffel values of the same metric; the result is the
    (n, n, n, n) value array A_ijk,l = d_l A_ijk - Gamma^m_li A_mjk
    - Gamma^m_lj A_imk - Gamma^m_lk A_ijm.
    """
    a_jets = np.asarray(a_jets, dtype=object)
    n = a_jets.shape[0]
    if gamma.shape != (n, n, n):
        raise ValueError("tensor and Christoffel dimensions do not match")
    avals = np.array(
        [[[a_jets[i, j, k].value for k in range(n)] for j in range(n)] for i in range(n)]
    )
    out = np.zeros((n, n, n, n))
    for l in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    out[i, j, k, l] = a_jets[i, j, k].partial(l).value
    out -= np.einsum("mli,mjk->ijkl", gamma, avals)
    out -= np.einsum("mlj,imk->ijkl", gamma, avals)
    out -= np.einsum("mlk,ijm->ijkl", gamma, avals)
    return out
