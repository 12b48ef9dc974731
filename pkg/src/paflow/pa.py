"""Perron-Frobenius data and the linear action of a pseudo-Anosov on weights."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import exact
from .errors import (InputError, NoConvergence, NotPrimitive, NotPseudoAnosov, NotReciprocal,
                     NotSymplectic, ShapeMismatch, SignViolation)
from .tracks import IncidenceMatrix, WeightSpace, thurston_form


# ------------------------------------------------------- Perron-Frobenius

def is_primitive(M) -> bool:
    """Some power M^p with p <= n^2 is strictly positive."""
    A = np.asarray(M) > 0
    n = A.shape[0]
    P = A.copy()
    for _ in range(n * n):
        if P.all():
            return True
        P = (P.astype(np.int64) @ A.astype(np.int64)) > 0
    return bool(P.all())


def perron_frobenius(M, tol: float = 1e-12, max_iter: int = 1_000_000) -> tuple[float, np.ndarray]:
    """Stretch factor and positive eigenvector (unit 1-norm) by power iteration."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatch("matrix must be square")
    if (M < 0).any():
        raise NotPrimitive("matrix has negative entries")
    if not is_primitive(M):
        raise NotPrimitive("no power up to n^2 is strictly positive")
    n = M.shape[0]
    v = np.full(n, 1.0 / n)
    lam = 0.0
    for _ in range(max_iter):
        w = M @ v
        lam_new = float(v @ w / (v @ v))
        w /= w.sum()
        if np.abs(w - v).max() < tol and abs(lam_new - lam) <= tol * max(1.0, lam_new):
            v = w
            lam = lam_new
            break
        v, lam = w, lam_new
    else:
        raise NoConvergence(f"power iteration did not settle in {max_iter} steps")
    # one polishing step: Rayleigh quotient at the converged vector
    lam = float(v @ (M @ v) / (v @ v))
    return lam, v


# --------------------------------------------------------- twist systems

@dataclass(frozen=True)
class TwistSystem:
    curves: tuple[str, ...]
    intersections: tuple[tuple[int, ...], ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        n = len(self.curves)
        I = np.array(self.intersections)
        if I.shape != (n, n) or len(self.signs) != n:
            raise ShapeMismatch("intersection matrix and signs must match the curve list")
        if (I != I.T).any() or (np.diag(I) != 0).any() or (I < 0).any():
            raise InputError("intersection matrix must be symmetric, nonnegative, zero diagonal")
        for i in range(n):
            for j in range(n):
                if self.signs[i] == self.signs[j] and I[i, j] != 0:
                    raise InputError(f"curves {self.curves[i]} and {self.curves[j]} in one family intersect")

    @classmethod
    def from_dict(cls, d: dict) -> "TwistSystem":
        if d.get("schema", "twists/1") != "twists/1":
            raise InputError("expected schema twists/1")
        try:
            return cls(tuple(str(c) for c in d["curves"]),
                       tuple(tuple(int(x) for x in r) for r in d["intersections"]),
                       tuple(int(s) for s in d["signs"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed twist system: {exc}") from exc


def load_twists(path) -> TwistSystem:
    try:
        return TwistSystem.from_dict(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read twist system {path}: {exc}") from exc


def twist_word_matrix(sys: TwistSystem, word: Sequence[tuple[str, int]],
                      enforce_signs: bool = True) -> np.ndarray:
    """Product, left to right, of I + e*s_c * e_c row_c(i) over the twists in the word.

    With the sign convention (e*s_c >= 0) every factor is nonnegative.
    """
    n = len(sys.curves)
    pos = {c: i for i, c in enumerate(sys.curves)}
    I = np.array(sys.intersections, dtype=object)
    out = np.eye(n, dtype=object) * 1
    for c, e in word:
        if c not in pos:
            raise InputError(f"unknown curve {c!r}")
        i = pos[c]
        scale = int(e) * sys.signs[i]
        if enforce_signs and scale < 0:
            raise SignViolation(f"twist {c}^{e} has the wrong sign for its family")
        T = np.eye(n, dtype=object) * 1
        T[i, :] = T[i, :] + scale * I[i, :]
        out = out.dot(T)
    return np.array(out.tolist(), dtype=np.int64)


# ------------------------------------------------- pseudo-Anosov action

@dataclass(frozen=True)
class PseudoAnosovData:
    space: WeightSpace
    form: np.ndarray
    k: int
    B: np.ndarray
    B_exact: tuple | None
    stretch: float
    mu_plus: np.ndarray
    spectrum: np.ndarray
    incidence: np.ndarray


def sort_eigenvalues(ev) -> np.ndarray:
    """|lambda| descending, then |arg| ascending, upper half-plane first; stable."""
    ev = np.asarray(ev, dtype=complex)
    order = sorted(range(len(ev)),
                   key=lambda i: (-round(abs(ev[i]), 10), round(abs(np.angle(ev[i])), 10),
                                  -np.sign(round(ev[i].imag, 10)), i))
    return ev[order]


def reciprocal_residual(ev) -> float:
    """Greedy matching of each eigenvalue with the inverse of another; worst mismatch."""
    ev = list(np.asarray(ev, dtype=complex))
    inv = [1 / z for z in ev]
    used = [False] * len(ev)
    worst = 0.0
    for z in ev:
        best, bj = np.inf, -1
        for j, w in enumerate(inv):
            if not used[j] and abs(z - w) < best:
                best, bj = abs(z - w), j
        used[bj] = True
        worst = max(worst, best / max(1.0, abs(z)))
    return worst


def _has_negative_real(ev, tol: float) -> bool:
    ev = np.asarray(ev, dtype=complex)
    return bool(np.any((np.abs(ev.imag) <= tol * np.maximum(1, np.abs(ev))) & (ev.real < 0)))


def restricted_matrix(m: IncidenceMatrix | np.ndarray, space: WeightSpace) -> tuple:
    """Exact coordinates of M applied to each basis vector, in that basis."""
    M = m.matrix if isinstance(m, IncidenceMatrix) else np.asarray(m).tolist()
    basis = space.matrix()
    image = exact.matmul([[int(x) for x in row] for row in M], basis)
    try:
        return exact.solve(basis, image)
    except ValueError as exc:
        raise InputError("incidence matrix does not preserve the weight space") from exc


def power_until_positive(B: np.ndarray, tol: float = 1e-9, cap: int = 64) -> tuple[int, np.ndarray]:
    """Double k until B^k has no negative real eigenvalue."""
    k = 1
    while _has_negative_real(np.linalg.eigvals(B), tol):
        if 2 * k > cap:
            raise NotPseudoAnosov(f"negative real eigenvalue persists up to k = {cap}")
        B = B @ B
        k *= 2
    return k, B


def build_linear_action(m: IncidenceMatrix | np.ndarray, space: WeightSpace,
                        tol: float = 1e-9) -> PseudoAnosovData:
    B_exact = restricted_matrix(m, space)
    Mi = np.asarray(m.matrix if isinstance(m, IncidenceMatrix) else m, dtype=float)
    sp = thurston_form(space.track, space)
    form = sp.form
    lhs = exact.matmul(exact.matmul(exact.transpose(B_exact), form), B_exact)
    Omega = sp.as_array()
    if lhs != form:
        res = float(np.abs(np.array(lhs, dtype=float) - Omega).max())
        if res > tol:
            raise NotSymplectic(f"B^T Omega B - Omega = {res:.3e}")
    B = np.array([[float(x) for x in r] for r in B_exact])
    rho = float(np.abs(np.linalg.eigvals(B)).max())
    if rho <= 1 + tol:
        raise NotPseudoAnosov(f"spectral radius {rho:.6g} <= 1")
    lam, v = perron_frobenius(Mi)
    basis = space.as_array()
    coords, *_ = np.linalg.lstsq(basis, v, rcond=None)
    if np.abs(basis @ coords - v).max() > 1e-8:
        raise NotPseudoAnosov("Perron-Frobenius vector is not a weight vector")
    k, Bk = power_until_positive(B, tol)
    if k > 1:
        Bk_exact = B_exact
        for _ in range(int(np.log2(k))):
            Bk_exact = exact.matmul(Bk_exact, Bk_exact)
        B_exact = Bk_exact
        Bk = np.array([[float(x) for x in r] for r in B_exact])
    # powers of the eigenvalues of B keep the small ones accurate
    ev = sort_eigenvalues(np.linalg.eigvals(B) ** k)
    if reciprocal_residual(ev) > 1e-8:
        raise NotReciprocal(f"spectrum is not closed under inversion: {ev}")
    if np.abs(Bk @ coords - lam ** k * coords).max() > 1e-8 * lam ** k * np.abs(coords).max():
        raise NotPseudoAnosov("mu_plus is not an eigenvector of B")
    return PseudoAnosovData(space, Omega, k, Bk, B_exact, lam, coords, ev, Mi)


def analyze_files(track_path, incidence_path, tol: float = 1e-9) -> PseudoAnosovData:
    """Load a track and a self-carrying incidence matrix and build the linear action."""
    from .tracks import load_incidence, load_track, weight_space
    t = load_track(track_path)
    m = load_incidence(incidence_path, t)
    return build_linear_action(m, weight_space(t), tol)


def shipped_example() -> PseudoAnosovData:
    """The genus-2 example bundled with the package."""
    from importlib.resources import files
    d = files("paflow") / "data"
    return analyze_files(d / "genus2_track.json", d / "genus2_pa.json")
