"""Real symplectic spectral analysis.

Symplectic bases are ordered (alpha_1..alpha_n, beta_1..beta_n) so the form
in such a basis is the standard J = [[0, I], [-I, 0]].  For a vector with
coordinates (x, y) in such a basis, omega(alpha_j, .) = y_j and
omega(beta_j, .) = -x_j.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np
from scipy.linalg import expm, logm

from .errors import (BadParams, NegativeRealEigenvalue, NotDiagonalizable, NotSymplectic,
                     SpectrumOnCut)

KINDS = (
    "RealPair", "UnitCircleSimple", "ComplexQuad", "RealJordan", "ComplexJordan",
    "UnipotentLagrangian", "UnipotentNonLagrangian", "UnitCircleLagrangian",
    "UnitCircleOddNoSplit", "UnitCircleEvenNoSplit",
)


def standard_form(n: int) -> np.ndarray:
    """The 2n x 2n matrix [[0, I], [-I, 0]]."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def symplectic_residual(B, omega) -> float:
    B = np.asarray(B, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return float(np.abs(B.T @ omega @ B - omega).max())


def infinitesimal_residual(X, omega) -> float:
    """max |omega(Xv, w) + omega(v, Xw)| over basis vectors, i.e. |X^T W + W X|."""
    X = np.asarray(X, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return float(np.abs(X.T @ omega + omega @ X).max())


# ------------------------------------------------------------------ blocks

@dataclass(frozen=True)
class Block:
    kind: str
    params: dict
    alpha: tuple[int, ...]  # column indices of the alpha vectors in the basis
    beta: tuple[int, ...]

    @property
    def half(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[Block, ...]
    basis: np.ndarray  # columns: alphas of all blocks, then betas
    omega: np.ndarray

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    def local_indices(self, b: Block) -> list[int]:
        return list(b.alpha) + list(b.beta)


def _shift(k: int) -> np.ndarray:
    """Nilpotent N with N e_j = e_{j+1}."""
    return np.eye(k, k, -1)


def _nil_exp(N: np.ndarray) -> np.ndarray:
    """exp of a nilpotent matrix as a finite sum."""
    n = N.shape[0]
    out = np.eye(n)
    P = np.eye(n)
    for j in range(1, n + 1):
        P = P @ N
        if not P.any():
            break
        out = out + P / factorial(j)
    return out


def _lagrangian(A: np.ndarray, expA: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = A.shape[0]
    X = np.zeros((2 * n, 2 * n))
    X[:n, :n] = A
    X[n:, n:] = -A.T
    B = np.zeros((2 * n, 2 * n))
    B[:n, :n] = expA
    B[n:, n:] = np.linalg.inv(expA).T
    return X, B


def _rotation_part(T: np.ndarray, N: np.ndarray, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """X = T + N with T^2 = -theta^2, [T, N] = 0, N nilpotent."""
    n = T.shape[0]
    S = np.cos(theta) * np.eye(n) + np.sinc(theta / np.pi) * T
    return T + N, S @ _nil_exp(N)


def _check_params(kind: str, params: dict) -> None:
    size = params.get("size", 1)
    if not isinstance(size, (int, np.integer)) or size < 1:
        raise BadParams(f"{kind}: size must be a positive integer")
    if kind in ("RealPair", "RealJordan"):
        if not params.get("lam", 0) > 1:
            raise BadParams(f"{kind}: needs lam > 1")
    if kind in ("ComplexQuad", "ComplexJordan"):
        if not params.get("modulus", 0) > 1:
            raise BadParams(f"{kind}: needs modulus > 1")
        if not 0 < params.get("theta", 0) < np.pi:
            raise BadParams(f"{kind}: needs theta in (0, pi)")
    if kind in ("UnitCircleSimple", "UnitCircleLagrangian", "UnitCircleOddNoSplit",
                "UnitCircleEvenNoSplit"):
        if "theta" not in params or not -np.pi < params["theta"] < np.pi:
            raise BadParams(f"{kind}: needs theta in (-pi, pi)")
    if kind == "UnipotentNonLagrangian" and size % 2:
        raise BadParams("UnipotentNonLagrangian needs even size")
    if kind == "UnitCircleOddNoSplit" and size % 2 == 0:
        raise BadParams("UnitCircleOddNoSplit needs odd size")
    if kind == "UnitCircleEvenNoSplit" and size % 2:
        raise BadParams("UnitCircleEvenNoSplit needs even size")


def block_half_dimension(kind: str, params: dict) -> int:
    k = params.get("size", 1)
    if kind in ("ComplexQuad",):
        return 2
    if kind in ("ComplexJordan", "UnitCircleLagrangian"):
        return 2 * k
    if kind in ("RealPair", "UnitCircleSimple"):
        return 1
    return k


def block_generator(kind: str, params: dict) -> tuple[np.ndarray, np.ndarray]:
    """Canonical generator X and B = exp(X) for one block in its local symplectic basis.

    Local coordinates list the alpha vectors first, then the beta vectors, in
    the index order used by the block's length polynomial.  Complex blocks
    order alpha^+_1..alpha^+_k, alpha^-_1..alpha^-_k and likewise for beta.
    B is assembled in closed form (semisimple part times a finite nilpotent
    series), independently of any general-purpose matrix exponential.
    """
    if kind not in KINDS:
        raise BadParams(f"unknown block kind {kind!r}")
    _check_params(kind, params)
    k = int(params.get("size", 1))
    if kind == "RealPair":
        kind, k = "RealJordan", 1
    if kind == "ComplexQuad":
        kind, k = "ComplexJordan", 1

    if kind == "RealJordan":
        L = np.log(params["lam"])
        N = _shift(k)
        return _lagrangian(L * np.eye(k) + N, params["lam"] * _nil_exp(N))

    if kind == "ComplexJordan":
        L, th = np.log(params["modulus"]), params["theta"]
        N = np.kron(np.eye(2), _shift(k))
        R = np.kron(np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]]), np.eye(k))
        Jr = np.kron(np.array([[0.0, -1.0], [1.0, 0.0]]), np.eye(k))
        A = L * np.eye(2 * k) + th * Jr + N
        return _lagrangian(A, params["modulus"] * R @ _nil_exp(N))

    if kind == "UnipotentLagrangian":
        N = _shift(k)
        return _lagrangian(N, _nil_exp(N))

    if kind == "UnitCircleSimple":
        th = params["theta"]
        X = np.array([[0.0, -th], [th, 0.0]])
        B = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        return X, B

    if kind == "UnipotentNonLagrangian":
        Xf = [[Fraction(0)] * (2 * k) for _ in range(2 * k)]
        for j in range(k - 1):
            Xf[j + 1][j] = Fraction(1)          # alpha_j -> alpha_{j+1}
            Xf[k + j][k + j + 1] = Fraction(-1)  # beta_{j+1} -> -beta_j
        Xf[2 * k - 1][k - 1] = Fraction((-1) ** (k // 2))  # alpha_k -> +-beta_k
        B = _exact_nil_exp(Xf)
        return np.array(Xf, dtype=float), np.array(B, dtype=float)

    th = params["theta"]
    if kind == "UnitCircleLagrangian":
        # alpha^+ = 0..k-1, alpha^- = k..2k-1 inside the 2k-dim alpha block
        N = np.zeros((2 * k, 2 * k))
        N[:k, :k] = _shift(k)
        N[k:, k:] = _shift(k).T
        T = np.zeros((2 * k, 2 * k))
        for j in range(k):
            T[k + (k - 1 - j), j] = th       # alpha^+_j -> theta alpha^-_{k+1-j}
            T[k - 1 - j, k + j] = -th        # alpha^-_j -> -theta alpha^+_{k+1-j}
        A, expA = _rotation_part(T, N, th)
        return _lagrangian(A, expA)

    n2 = 2 * k
    T = np.zeros((n2, n2))
    N = np.zeros((n2, n2))
    a = lambda i: i - 1          # alpha_i, 1-based
    b = lambda i: k + i - 1      # beta_i
    if kind == "UnitCircleOddNoSplit":
        for i in range(1, k):
            N[a(i + 1), a(i)] = 1.0
            N[b(i), b(i + 1)] = -1.0
        for i in range(1, k + 1):
            T[a(i), b(k + 1 - i)] = th * (-1) ** i
            T[b(i), a(k + 1 - i)] = th * (-1) ** (i + 1)
    else:  # UnitCircleEvenNoSplit
        for i in range(1, k + 1):
            T[a(i), b(k + 1 - i)] = th
            T[b(i), a(k + 1 - i)] = -th
        for i in range(2, k + 1):
            N[a(i), b(k + 2 - i)] = (-1) ** i
        for i in range(1, k):
            N[b(i), a(k - i)] = (-1) ** i
    return _rotation_part(T, N, th)


def _exact_nil_exp(X: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(X)
    out = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    P = [row[:] for row in out]
    for j in range(1, n + 1):
        P = [[sum((P[r][m] * X[m][c] for m in range(n)), Fraction(0)) for c in range(n)] for r in range(n)]
        if not any(x for row in P for x in row):
            break
        f = Fraction(1, factorial(j))
        out = [[out[r][c] + f * P[r][c] for c in range(n)] for r in range(n)]
    return out


def canonical_matrix(blocks, n_half: int) -> tuple[np.ndarray, np.ndarray]:
    """Assemble (X, B) in the global basis ordering from the blocks' local forms."""
    X = np.zeros((2 * n_half, 2 * n_half))
    B = np.zeros((2 * n_half, 2 * n_half))
    for blk in blocks:
        Xb, Bb = block_generator(blk.kind, blk.params)
        idx = list(blk.alpha) + list(blk.beta)
        X[np.ix_(idx, idx)] = Xb
        B[np.ix_(idx, idx)] = Bb
    return X, B


# ------------------------------------------------------------- eigenbasis

def _cluster(ev: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, z in enumerate(ev):
        for g in groups:
            if abs(ev[g[0]] - z) <= tol * max(1.0, abs(z)):
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _real_span(U: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the real span of the columns of a real-valued complex matrix."""
    Q, _ = np.linalg.qr(np.real(U))
    return Q


def _gs_pairs(E: np.ndarray, omega: np.ndarray) -> tuple[list, list]:
    """Symplectic basis (alpha_i, beta_i) of the subspace spanned by E."""
    vecs = [E[:, j].copy() for j in range(E.shape[1])]
    alphas, betas = [], []
    w = lambda u, v: float(u @ omega @ v)
    while vecs:
        a = vecs.pop(0)
        vals = [w(a, v) for v in vecs]
        if not vals:
            raise NotSymplectic("odd-dimensional fixed subspace")
        j = int(np.argmax(np.abs(vals)))
        if abs(vals[j]) < 1e-12:
            raise NotSymplectic("fixed subspace is degenerate for the form")
        b = vecs.pop(j) / vals[j]
        alphas.append(a)
        betas.append(b)
        # project the rest onto the omega-complement of span(a, b)
        vecs = [v - w(v, b) * a + w(v, a) * b for v in vecs]
    return alphas, betas


def symplectic_eigenbasis(B, omega, cond_cap: float = 1e8, tol: float = 1e-8,
                          mu_plus=None) -> BlockDecomposition:
    """Symplectic basis adapted to a diagonalizable symplectic B.

    Blocks are RealPair (alpha with eigenvalue lam > 1, beta with 1/lam),
    UnitCircleSimple (B alpha = cos t alpha + sin t beta) and ComplexQuad
    (B alpha^+ = |L|(cos t alpha^+ + sin t alpha^-), B alpha^- = |L|(cos t alpha^- - sin t alpha^+),
    and beta^+, beta^- rotate the same way scaled by 1/|L|).  Every pair is
    normalized to omega(alpha, beta) = 1.  If ``mu_plus`` is given it must be
    an eigenvector for the largest eigenvalue; it becomes alpha_1 unchanged.
    """
    B = np.asarray(B, dtype=float)
    omega = np.asarray(omega, dtype=float)
    n = B.shape[0]
    scale = max(1.0, float(np.abs(B).max()) ** 2)
    if symplectic_residual(B, omega) > tol * scale * max(1.0, np.abs(omega).max()):
        raise NotSymplectic(f"B^T W B - W = {symplectic_residual(B, omega):.3e}")
    ev, V = np.linalg.eig(B)
    if np.linalg.cond(V) > cond_cap:
        raise NotDiagonalizable(f"eigenvector condition number {np.linalg.cond(V):.3e} exceeds {cond_cap:.1e}")
    on_axis = np.abs(ev.imag) <= 1e-9 * np.maximum(1.0, np.abs(ev))
    if np.any(on_axis & (ev.real < 0)):
        raise NegativeRealEigenvalue("B has a negative real eigenvalue; use a power of B")
    groups = _cluster(ev, 1e-6)
    w = lambda u, v: u @ omega @ v

    real_pairs, circle, quads = [], [], []
    for g in groups:
        z = ev[g[0]]
        mod, arg = abs(z), float(np.angle(z))
        if abs(mod - 1) <= 1e-6:
            if abs(arg) <= 1e-9:
                E = _real_span(V[:, g])
                for a, b in zip(*_gs_pairs(E, omega)):
                    circle.append((0.0, a, b))
            elif arg > 0:
                U = V[:, g]
                H = 0.5j * (U.conj().T @ omega @ U)
                H = (H + H.conj().T) / 2
                d, Q = np.linalg.eigh(H)
                U = U @ Q
                for j in range(len(g)):
                    u = U[:, j] / np.sqrt(abs(d[j]))
                    if d[j] > 0:
                        circle.append((arg, u.real.copy(), -u.imag.copy()))
                    else:
                        circle.append((-arg, u.real.copy(), u.imag.copy()))
        elif mod > 1:
            partner = next(h for h in groups if abs(ev[h[0]] - 1 / np.conj(z)) <= 1e-6 * max(1, abs(z)))
            if abs(arg) <= 1e-9:
                Aa = np.real(V[:, g])
                Cc = np.real(V[:, partner])
                Aa, _ = np.linalg.qr(Aa)
                Cc, _ = np.linalg.qr(Cc)
                G = Aa.T @ omega @ Cc
                Bb = Cc @ np.linalg.inv(G)
                for j in range(len(g)):
                    real_pairs.append((mod, Aa[:, j], Bb[:, j]))
            elif arg > 0:
                Av, Cv = V[:, g], V[:, partner]
                Aa = np.column_stack([c for j in range(len(g)) for c in (Av[:, j].real, -Av[:, j].imag)])
                Cc = np.column_stack([c for j in range(len(g)) for c in (Cv[:, j].real, -Cv[:, j].imag)])
                G = Aa.T @ omega @ Cc
                Bb = Cc @ np.linalg.inv(G)
                for j in range(len(g)):
                    quads.append((mod, arg, Aa[:, 2 * j], Aa[:, 2 * j + 1], Bb[:, 2 * j], Bb[:, 2 * j + 1]))

    real_pairs.sort(key=lambda r: -r[0])
    if mu_plus is not None:
        if not real_pairs:
            raise NotSymplectic("no real eigenvalue above 1 to attach mu_plus to")
        lam, a, b = real_pairs[0]
        mu = np.asarray(mu_plus, dtype=float)
        if np.abs(B @ mu - lam * mu).max() > 1e-7 * lam * np.abs(mu).max():
            raise NotSymplectic("mu_plus is not the leading eigenvector")
        # a and b are eigenvectors; rescale b so omega(mu, b) = 1
        real_pairs[0] = (lam, mu, b / w(mu, b))
    circle.sort(key=lambda r: abs(r[0]))
    quads.sort(key=lambda r: (-r[0], r[1]))

    alphas, betas, specs = [], [], []
    for lam, a, b in real_pairs:
        specs.append(("RealPair", {"lam": float(lam)}, 1))
        alphas.append(a)
        betas.append(b)
    for th, a, b in circle:
        specs.append(("UnitCircleSimple", {"theta": float(th)}, 1))
        alphas.append(a)
        betas.append(b)
    for mod, th, ap, am, bp, bm in quads:
        specs.append(("ComplexQuad", {"modulus": float(mod), "theta": float(th)}, 2))
        alphas += [ap, am]
        betas += [bp, bm]
    h = len(alphas)
    if 2 * h != n:
        raise NotSymplectic("eigenvectors do not cover the space")
    P = np.column_stack(alphas + betas)
    blocks, pos = [], 0
    for kind, params, width in specs:
        blocks.append(Block(kind, params, tuple(range(pos, pos + width)),
                            tuple(range(h + pos, h + pos + width))))
        pos += width
    dec = BlockDecomposition(tuple(blocks), P, omega)
    _post_check(dec, B, tol)
    return dec


def _post_check(dec: BlockDecomposition, B: np.ndarray, tol: float) -> None:
    P = dec.basis
    n = P.shape[0] // 2
    if np.abs(P.T @ dec.omega @ P - standard_form(n)).max() > tol * max(1.0, np.abs(P).max() ** 2):
        raise NotSymplectic("assembled basis is not symplectic")
    _, Bc = canonical_matrix(dec.blocks, n)
    R = np.linalg.solve(P, B @ P)
    if np.abs(R - Bc).max() > tol * max(1.0, np.abs(B).max()) * np.linalg.cond(P):
        raise NotSymplectic("B is not block-canonical in the computed basis")


# ------------------------------------------------------------- logarithm

@dataclass(frozen=True)
class Generator:
    X: np.ndarray
    source: np.ndarray
    tol: float
    exp_residual: float
    symplectic_residual: float | None = None


def principal_log(B, omega=None, cond_cap: float = 1e8, tol: float = 1e-9) -> Generator:
    """Real X with exp(X) = B, eigenvalue logs taken on the principal branch."""
    B = np.asarray(B, dtype=float)
    ev, V = np.linalg.eig(B)
    on_axis = np.abs(ev.imag) <= 1e-12 * np.maximum(1.0, np.abs(ev))
    if np.any(np.abs(ev) == 0) or np.any(on_axis & (ev.real <= 0)):
        raise SpectrumOnCut("an eigenvalue lies on the closed negative real axis")
    if np.linalg.cond(V) <= cond_cap:
        logs = np.log(ev.astype(complex))
        Xc = V @ np.diag(logs) @ np.linalg.inv(V)
        X = (Xc + Xc.conj()) / 2  # conjugate-pair symmetrization
        if np.abs(Xc.imag).max() > 1e-10 * max(1.0, np.abs(Xc).max()):
            X = Xc
        X = np.real(X)
    else:
        X = np.real(logm(B))
    res = float(np.abs(expm(X) - B).max() / max(1.0, np.abs(B).max()))
    if res > tol:
        X = np.real(logm(B))
        res = float(np.abs(expm(X) - B).max() / max(1.0, np.abs(B).max()))
    sres = None
    if omega is not None:
        sres = infinitesimal_residual(X, omega)
    return Generator(X, B, tol, res, sres)
