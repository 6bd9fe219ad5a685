"""The equiaffine invariant pipeline.

From a chart and a point this computes the Berwald-Blaschke metric g, the
Fubini-Pick cubic form A, the affine second fundamental form B, the
affine normal xi, the affine mean curvature L1, the Pick invariant J and
the normalized scalar curvature chi, and evaluates the residuals of the
structural identities tying them together (apolarity, the affine Gauss
and Codazzi equations, the hypersphere conditions).

The transversal is bootstrapped determinant-free-frame style:
G_ij = det(x_1, ..., x_n, x_ij) built directly from chart jets, then
g_ij = |det G|^{-1/(n+2)} G_ij.  The affine normal is the metric
Laplacian xi = (1/n) Delta_g x, the induced connection comes from
solving the affine Gauss formula in the frame {x_k, xi}, and the
recovered transversal coefficient h_ij is checked against g_ij as an
internal consistency gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tensors
from .dsl import ChartDef, eval_chart_jet
from .jets import Jet, jet_det, jet_solve
from .tensors import MetricField, cov_deriv_sym3, riemann

H_EQUALS_G_TOL = 1e-9
TAU_TOL = 1e-9


class ConvexityError(ValueError):
    """The second-order determinant form is indefinite at the point."""


class FrameError(ValueError):
    """Tangents plus affine normal fail to span the ambient space."""


class ConsistencyError(RuntimeError):
    """Internal cross-check (h = g or tau = 0) failed beyond tolerance."""


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return f"{self.check_name}: residual={self.residual:.3e} tol={self.tolerance:.1e} {status}"


@dataclass
class BlaschkeInvariants:
    """Pointwise bundle of equiaffine invariants in chart coordinates."""

    point: np.ndarray
    g: np.ndarray  # (n, n) SPD
    g_inv: np.ndarray
    A: np.ndarray  # (n, n, n) totally symmetric, indices down
    B: np.ndarray  # (n, n) symmetric, indices down
    xi: np.ndarray  # (n+1,) affine normal
    L1: float
    J: float
    chi: float
    frame: np.ndarray  # (n+1, n+1) columns x_1..x_n, xi
    position: np.ndarray  # (n+1,) ambient position of the point
    curvature: tensors.CurvatureData = field(repr=False, default=None)
    # internals kept for the structural checks
    _A_jets: np.ndarray = field(repr=False, default=None)  # (n,n,n) of order-1 jets
    _gamma_hat: np.ndarray = field(repr=False, default=None)  # Levi-Civita values
    _nabla_A: np.ndarray = field(repr=False, default=None)  # A_ijk,l values

    @property
    def dim(self) -> int:
        return len(self.point)

    def nabla_A(self) -> np.ndarray:
        if self._nabla_A is None:
            self._nabla_A = cov_deriv_sym3(self._A_jets, self._gamma_hat)
        return self._nabla_A


def blaschke_at(chart: ChartDef, point, order: int = 4) -> BlaschkeInvariants:
    """Compute all Blaschke data of a chart at a point.

    ``order`` 4 yields the full bundle; order 3 is enough for g and A but
    B, L1 and the curvature are only available at order 4, so order 4 is
    the default and the only supported order here for the full bundle.
    """
    if order not in (3, 4):
        raise ValueError("blaschke_at requires jet order 3 or 4")
    if order != 4:
        raise ValueError("the full invariant bundle needs order 4 jets")
    point = np.asarray(point, float)
    n = chart.dim
    x = eval_chart_jet(chart, point, order)  # n+1 jets of order 4

    xi_1 = [[x[a].partial(i) for a in range(n + 1)] for i in range(n)]  # order 3
    xij = [[[xi_1[i][a].partial(j) for a in range(n + 1)] for j in range(i + 1)] for i in range(n)]

    def x2(i, j):  # second-derivative jet vector, order 2
        return xij[i][j] if j <= i else xij[j][i]

    # G_ij = det(x_1, ..., x_n, x_ij), order-2 jets
    cols = [[xi_1[i][a].truncate(2) for a in range(n + 1)] for i in range(n)]
    G = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(i + 1):
            mat = [[cols[k][a] for k in range(n)] + [x2(i, j)[a]] for a in range(n + 1)]
            G[i, j] = G[j, i] = jet_det(mat)
    gvals = np.array([[G[i, j].value for j in range(n)] for i in range(n)])
    eig = np.linalg.eigvalsh(gvals)
    if eig[0] > 0:
        eps = 1.0
    elif eig[-1] < 0:
        eps = -1.0
    else:
        raise ConvexityError(f"chart is not locally strongly convex at {point} (form eigenvalues {eig})")
    Gp = G * eps if eps < 0 else G

    # Berwald-Blaschke metric g = |det G|^{-1/(n+2)} * (eps G)
    from .jets import power as jet_power

    det_g = jet_det([[Gp[i, j] for j in range(n)] for i in range(n)])
    scale = jet_power(det_g, -1.0 / (n + 2))
    g_jets = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(i + 1):
            g_jets[i, j] = g_jets[j, i] = scale * Gp[i, j]
    metric = MetricField(n, g_jets)
    gval = metric.values()
    ginv = np.linalg.inv(gval)

    # Levi-Civita of g: order-1 jets and their values
    gamma_hat_jets = tensors.christoffel_jets(metric)  # order-1 jets
    gamma_hat = np.array(
        [[[gamma_hat_jets[k, i, j].value for j in range(n)] for i in range(n)] for k in range(n)]
    )

    # xi = (1/n) g^{ij} (x_ij - Gamma^k_ij x_k), as order-1 jets
    g1 = [[g_jets[i][j].truncate(1) for j in range(n)] for i in range(n)]
    ginv_jets = _jet_matrix_inverse(g1)
    xi_jets = []
    for a in range(n + 1):
        acc = None
        for i in range(n):
            for j in range(n):
                hess = x2(i, j)[a].truncate(1)
                for k in range(n):
                    hess = hess - gamma_hat_jets[k, i, j] * xi_1[k][a].truncate(1)
                term = ginv_jets[i][j] * hess
                acc = term if acc is None else acc + term
        xi_jets.append(acc * (1.0 / n))
    xi_val = np.array([j.value for j in xi_jets])

    # frame {x_1, ..., x_n, xi}: solve x_ij = Gamma^k_ij x_k + h_ij xi
    frame_jets = [[xi_1[k][a].truncate(1) for k in range(n)] + [xi_jets[a]] for a in range(n + 1)]
    frame_val = np.array([[frame_jets[a][c].value for c in range(n + 1)] for a in range(n + 1)])
    sv = np.linalg.svd(frame_val, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise FrameError(f"frame {{x_k, xi}} is singular at {point}")

    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    rhs = [[x2(i, j)[a].truncate(1) for (i, j) in pairs] for a in range(n + 1)]
    sol = jet_solve(frame_jets, rhs)  # rows: coefficients on x_1..x_n, xi
    gamma_ind = np.empty((n, n, n), dtype=object)  # induced connection, order-1 jets
    h_val = np.zeros((n, n))
    for c, (i, j) in enumerate(pairs):
        for k in range(n):
            gamma_ind[k, i, j] = gamma_ind[k, j, i] = sol[k][c]
        h_val[i, j] = h_val[j, i] = sol[n][c].value
    h_resid = float(np.max(np.abs(h_val - gval)))
    if h_resid > H_EQUALS_G_TOL * max(1.0, np.max(np.abs(gval))):
        raise ConsistencyError(
            f"transversal coefficient h differs from g by {h_resid:.3e} at {point}"
        )

    # Fubini-Pick form: A^k_ij = Gamma^k_ij - hat-Gamma^k_ij, lowered with g
    a_jets = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                up = [gamma_ind[l, i, j] - gamma_hat_jets[l, i, j] for l in range(n)]
                acc = None
                for l in range(n):
                    term = g1[k][l] * up[l]
                    acc = term if acc is None else acc + term
                a_jets[i, j, k] = a_jets[j, i, k] = acc
    A = np.array([[[a_jets[i, j, k].value for k in range(n)] for j in range(n)] for i in range(n)])
    A = _symmetrize3(A)

    # shape operator: xi_i = -B^k_i x_k + tau_i xi
    dxi = np.array([[xi_jets[a].gradient()[i] for a in range(n + 1)] for i in range(n)])
    coeff = np.linalg.solve(frame_val, dxi.T)  # (n+1, n): columns per direction i
    B_up = -coeff[:n, :]  # B^k_i
    tau = coeff[n, :]
    if np.max(np.abs(tau)) > TAU_TOL * max(1.0, np.max(np.abs(B_up))):
        raise ConsistencyError(f"equiaffine normalization failed: tau = {tau}")
    Bv = np.einsum("jk,ki->ij", gval, B_up)
    Bv = 0.5 * (Bv + Bv.T)
    L1 = float(np.trace(B_up)) / n

    J = float(np.einsum("ijk,pqr,ip,jq,kr->", A, A, ginv, ginv, ginv)) / (n * (n - 1)) if n > 1 else 0.0
    curv = riemann(metric)

    pos = np.array([c.value for c in x])
    return BlaschkeInvariants(
        point=point,
        g=gval,
        g_inv=ginv,
        A=A,
        B=Bv,
        xi=xi_val,
        L1=L1,
        J=J,
        chi=curv.chi,
        frame=frame_val,
        position=pos,
        curvature=curv,
        _A_jets=a_jets,
        _gamma_hat=gamma_hat,
    )


def _jet_matrix_inverse(mat):
    n = len(mat)
    some = mat[0][0]
    eye = [
        [Jet.constant(1.0 if i == j else 0.0, some.num_vars, some.order) for j in range(n)]
        for i in range(n)
    ]
    return jet_solve(mat, eye)


def _symmetrize3(t: np.ndarray) -> np.ndarray:
    return (
        t
        + t.transpose(0, 2, 1)
        + t.transpose(1, 0, 2)
        + t.transpose(1, 2, 0)
        + t.transpose(2, 0, 1)
        + t.transpose(2, 1, 0)
    ) / 6.0


# -- structural checks ----------------------------------------------------


def check_apolarity(inv: BlaschkeInvariants, tolerance: float = 1e-8) -> CheckReport:
    """Residual of the apolarity condition g^{ij} A_ijk = 0."""
    trace = np.einsum("ij,ijk->k", inv.g_inv, inv.A)
    return CheckReport("apolarity", float(np.max(np.abs(trace))), tolerance)


def gauss_rhs(g: np.ndarray, g_inv: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Right-hand side of the affine Gauss equation for R_ijkl."""
    A_up = np.einsum("mp,ikp->mik", g_inv, A)  # A^m_ik
    comm = np.einsum("mik,jlm->ijkl", A_up, A) - np.einsum("mil,jkm->ijkl", A_up, A)
    wedge = 0.5 * (
        np.einsum("il,jk->ijkl", g, B)
        + np.einsum("jk,il->ijkl", g, B)
        - np.einsum("ik,jl->ijkl", g, B)
        - np.einsum("jl,ik->ijkl", g, B)
    )
    return comm + wedge


def check_gauss(chart: ChartDef, point, tolerance: float = 1e-6, inv=None) -> CheckReport:
    """Affine Gauss equation: curvature of g against A- and B-terms."""
    inv = inv or blaschke_at(chart, point)
    rhs = gauss_rhs(inv.g, inv.g_inv, inv.A, inv.B)
    resid = float(np.max(np.abs(inv.curvature.riemann - rhs)))
    return CheckReport("gauss", resid, tolerance)


def check_ricci(inv: BlaschkeInvariants, tolerance: float = 1e-6) -> CheckReport:
    """Contracted Gauss identity for the Ricci tensor."""
    n = inv.dim
    A_up = np.einsum("mp,ilp->mil", inv.g_inv, inv.A)
    rhs = (
        np.einsum("kil,ljk->ij", A_up, A_up)
        + 0.5 * n * inv.L1 * inv.g
        + 0.5 * (n - 2) * inv.B
    )
    resid = float(np.max(np.abs(inv.curvature.ricci - rhs)))
    return CheckReport("ricci", resid, tolerance)


def codazzi_rhs(g: np.ndarray, B: np.ndarray) -> np.ndarray:
    # symmetric in (i, j) like the left-hand side, antisymmetric in (k, l)
    return 0.5 * (
        np.einsum("ik,jl->ijkl", g, B)
        + np.einsum("jk,il->ijkl", g, B)
        - np.einsum("il,jk->ijkl", g, B)
        - np.einsum("jl,ik->ijkl", g, B)
    )


def check_codazzi(inv: BlaschkeInvariants, tolerance: float = 1e-6) -> CheckReport:
    """Codazzi equation for the cubic form: antisymmetrized nabla A."""
    na = inv.nabla_A()
    lhs = na - na.transpose(0, 1, 3, 2)  # A_ijk,l - A_ijl,k
    resid = float(np.max(np.abs(lhs - codazzi_rhs(inv.g, inv.B))))
    return CheckReport("codazzi", resid, tolerance)


def check_trace_identity(inv: BlaschkeInvariants, tolerance: float = 1e-6) -> CheckReport:
    """Contracted Codazzi identity: div A = (n/2)(L1 g - B)."""
    n = inv.dim
    na = inv.nabla_A()
    div = np.einsum("lm,ijml->ij", inv.g_inv, na)
    rhs = 0.5 * n * (inv.L1 * inv.g - inv.B)
    resid = float(np.max(np.abs(div - rhs)))
    return CheckReport("trace_identity", resid, tolerance)


def check_gauss_alt(inv: BlaschkeInvariants, tolerance: float = 1e-6) -> CheckReport:
    """Alternative Gauss form expressed through chi, J and nabla A."""
    n = inv.dim
    g, ginv, A = inv.g, inv.g_inv, inv.A
    na = inv.nabla_A()
    div = np.einsum("mp,jlpm->jl", ginv, na)  # A^m_{jl,m}
    A_up = np.einsum("mp,ikp->mik", ginv, A)
    rhs = (
        na - na.transpose(0, 1, 3, 2)
        + (inv.chi - inv.J) * (np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g))
        + (2.0 / n) * (np.einsum("ik,jl->ijkl", g, div) - np.einsum("il,jk->ijkl", g, div))
        + np.einsum("mik,jlm->ijkl", A_up, A)
        - np.einsum("mil,jkm->ijkl", A_up, A)
    )
    resid = float(np.max(np.abs(inv.curvature.riemann - rhs)))
    return CheckReport("gauss_alt", resid, tolerance)


def check_hypersphere(inv: BlaschkeInvariants, tolerance: float = 1e-6) -> tuple[CheckReport, CheckReport]:
    """Affine hypersphere tests: B = L1 g, and xi = -L1 x for proper spheres
    centered at the origin.  Returns (shape-operator report, center report);
    the center residual is 0 by convention when L1 = 0."""
    resid_b = float(np.max(np.abs(inv.B - inv.L1 * inv.g)))
    if abs(inv.L1) > 1e-12:
        resid_c = float(np.max(np.abs(inv.xi + inv.L1 * inv.position)))
    else:
        resid_c = 0.0
    return (
        CheckReport("hypersphere_shape", resid_b, tolerance),
        CheckReport("hypersphere_center", resid_c, tolerance),
    )


def nabla_A_norm(chart: ChartDef, point, inv=None) -> tuple[float, CheckReport]:
    """The g-norm of nabla A (parallelism test) plus the Codazzi side report."""
    inv = inv or blaschke_at(chart, point)
    na = inv.nabla_A()
    gi = inv.g_inv
    norm2 = float(np.einsum("ijkl,pqrs,ip,jq,kr,ls->", na, na, gi, gi, gi, gi))
    side = check_codazzi(inv)
    return float(np.sqrt(max(norm2, 0.0))), side
