"""Pointwise duality between hyperbolic affine hyperspheres and minimal
Lagrangian data.

A hypersphere point carries (g, A, L1) with L1 < 0; the dual minimal
Lagrangian point keeps the metric, reuses the cubic form as the second
fundamental form, and flips the sign of the curvature operator.  Both
sides are validated through their Gauss-type equations

    R(X,Y)Z  =  c (g(Y,Z) X - g(X,Z) Y) - [A_X, A_Y] Z      (c = L1)
    R~(X,Y)Z = -c (g(Y,Z) X - g(X,Z) Y) + [A_X, A_Y] Z

and trace-freeness of A, which on the Lagrangian side is the minimality
condition and on the hypersphere side is apolarity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeInvariants, CheckReport


class DualityError(ValueError):
    """Raised for data that cannot sit on either side of the duality."""


@dataclass(frozen=True)
class LagrangianPointData:
    """Pointwise minimal-Lagrangian data: metric, second fundamental form
    (fully lowered, totally symmetric), and the sectional constant c > 0."""

    g: np.ndarray
    sigma: np.ndarray
    c: float

    def __post_init__(self):
        g = np.asarray(self.g, float)
        sigma = np.asarray(self.sigma, float)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "sigma", sigma)
        n = g.shape[0]
        if g.shape != (n, n) or sigma.shape != (n, n, n):
            raise DualityError("shape mismatch between metric and cubic data")
        if self.c <= 0:
            raise DualityError("the ambient sectional constant c must be positive")
        if np.linalg.eigvalsh(g)[0] <= 0:
            raise DualityError("metric must be positive definite")

    @property
    def dim(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True)
class HyperspherePointData:
    """Pointwise hyperbolic affine hypersphere data (L1 < 0)."""

    g: np.ndarray
    A: np.ndarray
    L1: float

    def __post_init__(self):
        g = np.asarray(self.g, float)
        A = np.asarray(self.A, float)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "A", A)
        n = g.shape[0]
        if g.shape != (n, n) or A.shape != (n, n, n):
            raise DualityError("shape mismatch between metric and cubic data")
        if self.L1 >= 0:
            raise DualityError("hypersphere data must be hyperbolic (L1 < 0)")
        if np.linalg.eigvalsh(g)[0] <= 0:
            raise DualityError("metric must be positive definite")

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @classmethod
    def from_invariants(cls, inv: BlaschkeInvariants) -> "HyperspherePointData":
        return cls(g=inv.g, A=inv.A, L1=inv.L1)


def dualize(data):
    """Map hypersphere data to Lagrangian data or back.

    The metric is kept, the cubic tensor is reused verbatim, and the
    curvature constant flips sign: c = -L1 going forward, L1 = -c going
    back.  Applying dualize twice is the identity.
    """
    if isinstance(data, HyperspherePointData):
        return LagrangianPointData(g=data.g, sigma=data.A, c=-data.L1)
    if isinstance(data, LagrangianPointData):
        return HyperspherePointData(g=data.g, A=data.sigma, L1=-data.c)
    raise TypeError("dualize expects hypersphere or Lagrangian point data")


def curvature_operator(g: np.ndarray, A: np.ndarray, c: float) -> np.ndarray:
    """R(d_i, d_j) d_k as Rup[m, i, j, k] for the hypersphere-side Gauss
    equation with constant c: R = c (g wedge id) - [A, A]."""
    g_inv = np.linalg.inv(g)
    n = g.shape[0]
    A_up = np.einsum("mp,ikp->mik", g_inv, A)  # shape operator A^m_ik of d_i
    # [A_X, A_Y] Z with X = d_i, Y = d_j, Z = d_k
    comm = np.einsum("mil,ljk->mijk", A_up, A_up) - np.einsum("mjl,lik->mijk", A_up, A_up)
    eye = np.eye(n)
    wedge = np.einsum("jk,mi->mijk", g, eye) - np.einsum("ik,mj->mijk", g, eye)
    return c * wedge - comm


def gauss_residual_hypersphere(data: HyperspherePointData, riemann_up: np.ndarray) -> float:
    """max |R - (L1 (g wedge id) - [A, A])| against a supplied curvature."""
    expected = curvature_operator(data.g, data.A, data.L1)
    return float(np.max(np.abs(riemann_up - expected)))


def check_gauss_swap(data: HyperspherePointData, tolerance: float = 1e-12) -> CheckReport:
    """Verify that dualizing flips the curvature operator exactly.

    The hypersphere Gauss equation determines R from (g, A, L1); the dual
    Lagrangian Gauss equation determines R~ from (g, sigma, c).  The swap
    identity is R~ = -R, which holds algebraically; this check evaluates
    both sides numerically and reports the residual.
    """
    dual = dualize(data)
    r_hyp = curvature_operator(data.g, data.A, data.L1)
    r_lag = -curvature_operator(dual.g, dual.sigma, -dual.c)
    resid = float(np.max(np.abs(r_lag - (-r_hyp))))
    return CheckReport("gauss_swap", resid, tolerance)


def check_trace_free(data, tolerance: float = 1e-8) -> CheckReport:
    """Trace-freeness g^{ij} T_ijk = 0: apolarity on the hypersphere side,
    minimality on the Lagrangian side.  The contraction is literally the
    same, which is the point of the check."""
    cubic = data.A if isinstance(data, HyperspherePointData) else data.sigma
    trace = np.einsum("ij,ijk->k", np.linalg.inv(data.g), cubic)
    name = "apolarity" if isinstance(data, HyperspherePointData) else "minimality"
    return CheckReport(name, float(np.max(np.abs(trace))), tolerance)


def check_involution(data: HyperspherePointData, tolerance: float = 1e-15) -> CheckReport:
    """dualize(dualize(x)) == x componentwise."""
    back = dualize(dualize(data))
    resid = max(
        float(np.max(np.abs(back.g - data.g))),
        float(np.max(np.abs(back.A - data.A))),
        abs(back.L1 - data.L1),
    )
    return CheckReport("duality_involution", resid, tolerance)


def random_hypersphere_data(n: int, rng: np.random.Generator) -> HyperspherePointData:
    """Random pointwise data (SPD g, symmetric apolar A, L1 < 0) for
    property tests of the purely algebraic identities."""
    m = rng.standard_normal((n, n))
    g = m @ m.T + n * np.eye(n)
    raw = rng.standard_normal((n, n, n))
    A = np.zeros_like(raw)
    import itertools

    for perm in itertools.permutations(range(3)):
        A += raw.transpose(perm)
    A /= 6.0
    # project out the trace so apolarity holds
    g_inv = np.linalg.inv(g)
    tr = np.einsum("ij,ijk->k", g_inv, A)
    corr = np.einsum("ij,k->ijk", g, tr) + np.einsum("ik,j->ijk", g, tr) + np.einsum("jk,i->ijk", g, tr)
    A -= corr / (n + 2)
    L1 = -float(rng.uniform(0.2, 3.0))
    return HyperspherePointData(g=g, A=A, L1=L1)
