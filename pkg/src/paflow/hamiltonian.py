"""Quadratic Hamiltonians in length coordinates and their linear flows.

A point sigma is a vector of weight-space coordinates.  The length of a
cocycle v at sigma is omega(v, sigma).  For a symplectic basis P the length
coordinates are l_m(sigma) = omega(P[:, m], sigma); with coordinates (x, y)
in that basis, l_{alpha_j} = y_j and l_{beta_j} = -x_j.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from . import symplectic as sym
from .errors import (DecompositionMismatch, LeftCone, NotSymplectic, ShapeMismatch,
                     ZeroLength)
from .tracks import omega as _omega

Term = tuple[float, int, int]


# ------------------------------------------------------------ polynomials

def block_polynomial(kind: str, params: dict) -> list[Term]:
    """Length polynomial of one canonical block, in local length indices.

    Index m < h refers to l_{alpha}, index h + m to l_{beta}, where h is the
    block's half dimension and the alpha/beta order matches block_generator.
    """
    k = int(params.get("size", 1))
    if kind == "RealPair":
        return [(float(np.log(params["lam"])), 0, 1)]
    if kind == "UnitCircleSimple":
        th = params["theta"]
        return [(th / 2, 0, 0), (th / 2, 1, 1)]
    if kind == "RealJordan":
        L = float(np.log(params["lam"]))
        a = lambda j: j - 1
        b = lambda j: k + j - 1
        return [(L, a(j), b(j)) for j in range(1, k + 1)] + \
               [(1.0, a(j + 1), b(j)) for j in range(1, k)]
    if kind in ("ComplexQuad", "ComplexJordan"):
        if kind == "ComplexQuad":
            k = 1
        L, th = float(np.log(params["modulus"])), params["theta"]
        ap = lambda j: j - 1
        am = lambda j: k + j - 1
        bp = lambda j: 2 * k + j - 1
        bm = lambda j: 3 * k + j - 1
        out = []
        for j in range(1, k + 1):
            out += [(L, ap(j), bp(j)), (L, am(j), bm(j)), (th, am(j), bp(j)), (-th, ap(j), bm(j))]
        for j in range(1, k):
            out += [(1.0, ap(j + 1), bp(j)), (1.0, am(j + 1), bm(j))]
        return out
    if kind == "UnipotentLagrangian":
        return [(1.0, j, k + j - 1) for j in range(1, k)]
    if kind == "UnipotentNonLagrangian":
        return [((-1) ** (k // 2) / 2, 2 * k - 1, 2 * k - 1)] + \
               [(1.0, j, k + j - 1) for j in range(1, k)]
    th = params.get("theta", 0.0)
    if kind == "UnitCircleLagrangian":
        ap = lambda j: j - 1
        am = lambda j: k + j - 1
        bp = lambda j: 2 * k + j - 1
        bm = lambda j: 3 * k + j - 1
        out = []
        for j in range(1, k):
            out += [(1.0, ap(j + 1), bp(j)), (1.0, am(j), bm(j + 1))]
        for j in range(1, k + 1):
            out += [(th, am(k + 1 - j), bp(j)), (-th, ap(k + 1 - j), bm(j))]
        return out
    a = lambda j: j - 1
    b = lambda j: k + j - 1
    if kind == "UnitCircleOddNoSplit":
        out = []
        for j in range(1, k + 1):
            s = (-1) ** (j + 1) * th / 2
            out += [(s, a(j), a(k + 1 - j)), (s, b(j), b(k + 1 - j))]
        out += [(1.0, a(j + 1), b(j)) for j in range(1, k)]
        return out
    if kind == "UnitCircleEvenNoSplit":
        out = []
        for j in range(1, k + 1):
            out += [(-th / 2, a(j), a(k + 1 - j)), (-th / 2, b(j), b(k + 1 - j))]
        for j in range(1, k):
            s = (-1) ** j / 2
            out += [(s, a(j + 1), a(k + 1 - j)), (s, b(j), b(k - j))]
        return out
    raise DecompositionMismatch(f"unknown block kind {kind!r}")


def evaluate_terms(terms: Sequence[Term], lengths) -> float:
    return float(sum(c * lengths[i] * lengths[j] for c, i, j in terms))


# -------------------------------------------------------------- potential

@dataclass(frozen=True)
class Potential:
    terms: tuple[Term, ...]
    X: np.ndarray            # exp(X) = B; the flow of F is exp(-tX)
    basis: np.ndarray        # columns: the symplectic basis vectors
    omega: np.ndarray
    mu_plus: np.ndarray | None = None

    @property
    def length_functionals(self) -> np.ndarray:
        """Row m is the covector sigma -> omega(basis[:, m], sigma)."""
        return self.basis.T @ self.omega

    def lengths(self, sigma) -> np.ndarray:
        return self.length_functionals @ np.asarray(sigma, dtype=float)

    def __call__(self, sigma) -> float:
        return evaluate_terms(self.terms, self.lengths(sigma))

    def quadratic_form_value(self, sigma) -> float:
        """-1/2 omega(X sigma, sigma)."""
        s = np.asarray(sigma, dtype=float)
        return -0.5 * float((self.X @ s) @ self.omega @ s)


def potential_from_blocks(blocks: Sequence[sym.Block], basis, omega, mu_plus=None) -> Potential:
    """Sum of the block polynomials; X is the canonical generator moved to the given basis."""
    basis = np.asarray(basis, dtype=float)
    n = basis.shape[0] // 2
    terms: list[Term] = []
    for blk in blocks:
        idx = list(blk.alpha) + list(blk.beta)
        for c, i, j in block_polynomial(blk.kind, blk.params):
            terms.append((c, idx[i], idx[j]))
    Xc, _ = sym.canonical_matrix(blocks, n)
    X = basis @ Xc @ np.linalg.inv(basis)
    return Potential(tuple(terms), X, basis, np.asarray(omega, dtype=float), mu_plus)


def build_potential(pa_data, dec: sym.BlockDecomposition | None = None, tol: float = 1e-8) -> Potential:
    """Potential whose time-one flow is B^{-1} for the pseudo-Anosov action B."""
    if dec is None:
        dec = sym.symplectic_eigenbasis(pa_data.B, pa_data.form, mu_plus=pa_data.mu_plus)
    P = dec.basis
    n = P.shape[0] // 2
    _, Bc = sym.canonical_matrix(dec.blocks, n)
    R = np.linalg.solve(P, pa_data.B @ P)
    if np.abs(R - Bc).max() > tol * max(1.0, np.abs(pa_data.B).max()) * np.linalg.cond(P):
        raise DecompositionMismatch("block decomposition does not match B")
    return potential_from_blocks(dec.blocks, P, dec.omega, pa_data.mu_plus)


# ------------------------------------------------------------------- flow

@dataclass(frozen=True)
class ShearPoint:
    sigma: np.ndarray
    witness: float | None = None  # omega(mu_plus, sigma)

    @property
    def in_cone(self) -> bool:
        return self.witness is None or self.witness > 0


def cone_witness(mu_plus, sigma, omega) -> float:
    return float(np.asarray(mu_plus, dtype=float) @ np.asarray(omega, dtype=float) @ np.asarray(sigma, dtype=float))


def flow_matrix(p: Potential, t: float, inverse: bool = False) -> np.ndarray:
    """exp(-tX); ``inverse`` flips X so the flow realizes B instead of B^{-1}."""
    return expm((t if inverse else -t) * p.X)


def flow(p: Potential, sigma0, t: float, inverse: bool = False) -> ShearPoint:
    sigma0 = np.asarray(sigma0, dtype=float)
    if p.mu_plus is not None and cone_witness(p.mu_plus, sigma0, p.omega) <= 0:
        raise LeftCone("starting point is outside the positive cone")
    s = flow_matrix(p, t, inverse) @ sigma0
    w = cone_witness(p.mu_plus, s, p.omega) if p.mu_plus is not None else None
    return ShearPoint(s, w)


def trajectory(p: Potential, sigma0, ts, inverse: bool = False) -> tuple[list[ShearPoint], bool]:
    """Sampled flow; the flag is True when some sample left the cone."""
    pts = [flow(p, sigma0, float(t), inverse) for t in ts]
    return pts, any(not q.in_cone for q in pts)


def earthquake(sigma, mu, t: float) -> np.ndarray:
    sigma = np.asarray(sigma)
    mu = np.asarray(mu)
    if sigma.shape != mu.shape:
        raise ShapeMismatch("earthquake direction and point differ in shape")
    return sigma + t * mu


def stretch(sigma, t: float) -> np.ndarray:
    return np.exp(t) * np.asarray(sigma, dtype=float)


def length_of(v, sigma, omega):
    if len(v) != len(sigma):
        raise ShapeMismatch("cocycle and point differ in dimension")
    return _omega(omega, v, sigma)


def poisson_same_lamination(alpha, beta, omega):
    """{l_alpha, l_beta} = omega(alpha, beta): shear fields are constant in coordinates."""
    if len(alpha) != len(beta):
        raise ShapeMismatch("cocycles differ in dimension")
    return _omega(omega, alpha, beta)


def dlog_length_along_stretch_same(alpha, sigma, omega) -> float:
    """d log l_alpha along the stretch field of the lamination sigma lives on.

    The stretch field at sigma is sigma itself, so the derivative of l_alpha
    is omega(alpha, sigma), which is l_alpha(sigma).
    """
    velocity = sigma
    length = length_of(alpha, sigma, omega)
    if length == 0:
        raise ZeroLength("l_alpha vanishes at this point")
    return float(length_of(alpha, velocity, omega) / length)


# ---------------------------------------------------------------- Jacobian

def jacobian_assembly(A, B, C, D, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """J = [[A, B], [C, D]] and its inverse [[D^T, -B^T], [-C^T, A^T]]."""
    A, B, C, D = (np.asarray(m, dtype=float) for m in (A, B, C, D))
    n = A.shape[0]
    if any(m.shape != (n, n) for m in (A, B, C, D)):
        raise ShapeMismatch("Jacobian blocks must be square and equal in size")
    J = np.block([[A, B], [C, D]])
    W = sym.standard_form(n)
    res = float(np.abs(J.T @ W @ J - W).max())
    if res > tol * max(1.0, np.abs(J).max() ** 2):
        raise NotSymplectic(f"J^T W J - W = {res:.3e}")
    J_inv = np.block([[D.T, -B.T], [-C.T, A.T]])
    return J, J_inv


# ----------------------------------------------------------------- bracket

def pa_bracket_evaluate(log_lambda, l_alpha, l_beta, l_A, l_B,
                        cos_beta_B, cos_beta_A, cos_alpha_B, cos_alpha_A,
                        log_lambda_minus=None) -> float:
    """Double sum over i, j of log L_i log L_j times the four length-cosine products.

    cos_x_Y[i, j] holds Cos(x_i, Y_j).
    """
    Li = np.asarray(log_lambda, dtype=float)
    Lj = Li if log_lambda_minus is None else np.asarray(log_lambda_minus, dtype=float)
    la, lb, lA, lB = (np.asarray(v, dtype=float) for v in (l_alpha, l_beta, l_A, l_B))
    mats = [np.asarray(m, dtype=float) for m in (cos_beta_B, cos_beta_A, cos_alpha_B, cos_alpha_A)]
    n, m = len(Li), len(Lj)
    if any(len(v) != n for v in (la, lb)) or any(len(v) != m for v in (lA, lB)) or \
            any(M.shape != (n, m) for M in mats):
        raise ShapeMismatch("bracket inputs disagree in size")
    cbB, cbA, caB, caA = mats
    inner = (np.outer(la, lA) * cbB + np.outer(la, lB) * cbA
             + np.outer(lb, lA) * caB + np.outer(lb, lB) * caA)
    return float(Li @ inner @ Lj)
