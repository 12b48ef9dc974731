"""Fuchsian-group harness: isometries, axes, lifts, twists and length derivatives.

Points of the boundary circle are homogeneous pairs (x, y) standing for x/y,
with infinity = (1, 0).  A 2x2 matrix acts on them by ordinary matrix
multiplication and on the upper half plane by Moebius transformations.
Words are strings over generator letters; a lowercase letter is the inverse
of the uppercase generator.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (BadConfiguration, DegenerateGluing, DepthTooSmall, InputError,
                     NoRealSolution, NotHyperbolic, NotSimple, NotTransverse, SharedEndpoint)

ENDPOINT_TOL = 1e-12
DEDUP_TOL = 1e-9


# --------------------------------------------------------------- isometries

@dataclass(frozen=True)
class Isometry:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (2, 2):
            raise InputError("isometries are 2x2 matrices")
        if abs(np.linalg.det(m) - 1) > 1e-12 * max(1.0, np.abs(m).max() ** 2):
            raise InputError(f"determinant {np.linalg.det(m)!r} is not 1")
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    @property
    def kind(self) -> str:
        t = abs(self.trace)
        if abs(t - 2) <= 1e-12:
            return "parabolic"
        return "hyperbolic" if t > 2 else "elliptic"


def _mat(g) -> np.ndarray:
    return g.matrix if isinstance(g, Isometry) else np.asarray(g, dtype=float)


def mobius(g, z: complex) -> complex:
    (a, b), (c, d) = _mat(g)
    return (a * z + b) / (c * z + d)


def hyperbolic_distance(z: complex, w: complex) -> float:
    return float(np.arccosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag)))


def trace_length(g) -> float:
    """Translation length 2 arccosh(|tr| / 2)."""
    tau = abs(float(np.trace(_mat(g))))
    if tau <= 2:
        raise NotHyperbolic(f"|trace| = {tau!r} is not above 2")
    return float(2 * np.arccosh(tau / 2))


def translation(s: float) -> np.ndarray:
    """Translation by s along (0, infinity), towards infinity."""
    return np.diag([np.exp(s / 2), np.exp(-s / 2)])


# ---------------------------------------------------------------- geodesics

def _normalize_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    p = p / np.hypot(*p)
    if p[1] < 0 or (p[1] == 0 and p[0] < 0):
        p = -p
    return p


def point(x: float) -> np.ndarray:
    """Homogeneous coordinates of a real number or infinity."""
    return np.array([1.0, 0.0]) if np.isinf(x) else _normalize_point([x, 1.0])


def _circle_xy(p) -> np.ndarray:
    x, y = _normalize_point(p)
    return np.array([y * y - x * x, 2 * x * y])


def circle_angle(p) -> float:
    """Position on the boundary circle in (-pi, pi]; infinity sits at pi."""
    x, y = _normalize_point(p)
    return float(2 * np.arctan2(x, y))


@dataclass(frozen=True)
class Geodesic:
    a: np.ndarray  # start (repelling) endpoint
    b: np.ndarray  # end (attracting) endpoint

    def __post_init__(self):
        a, b = _normalize_point(self.a), _normalize_point(self.b)
        if _same_point(a, b):
            raise InputError("geodesic endpoints coincide")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def between(cls, a: float, b: float) -> "Geodesic":
        return cls(point(a), point(b))

    def reversed(self) -> "Geodesic":
        return Geodesic(self.b, self.a)

    def image(self, g) -> "Geodesic":
        m = _mat(g)
        return Geodesic(m @ self.a, m @ self.b)

    def angles(self) -> tuple[float, float]:
        return circle_angle(self.a), circle_angle(self.b)

    def same_as(self, other: "Geodesic", tol: float = DEDUP_TOL) -> bool:
        return _same_point(self.a, other.a, tol) and _same_point(self.b, other.b, tol)


def _same_point(p, q, tol: float = ENDPOINT_TOL) -> bool:
    return abs(p[0] * q[1] - p[1] * q[0]) <= tol


def axis(g) -> Geodesic:
    """Oriented axis (repelling fixed point, attracting fixed point)."""
    m = _mat(g)
    if abs(np.trace(m)) <= 2:
        raise NotHyperbolic(f"|trace| = {abs(np.trace(m))!r} is not above 2")
    ev, V = np.linalg.eig(m)
    ev, V = ev.real, V.real
    big = int(np.argmax(np.abs(ev)))
    return Geodesic(V[:, 1 - big], V[:, big])


def normalizer(g: Geodesic) -> np.ndarray:
    """Orientation-preserving map sending g.a to 0 and g.b to infinity."""
    (a1, a2), (b1, b2) = g.a, g.b
    N = np.array([[a2, -a1], [b2, -b1]])
    det = a2 * (-b1) + a1 * b2
    if det < 0:
        N = np.diag([-1.0, 1.0]) @ N
        det = -det
    return N / np.sqrt(det)


def _boundary_value(N: np.ndarray, p) -> float:
    x, y = N @ p
    return x / y


def interlaced(g1: Geodesic, g2: Geodesic) -> bool:
    """True iff exactly one endpoint of g2 lies on each side of g1."""
    for p in (g1.a, g1.b):
        for q in (g2.a, g2.b):
            if _same_point(p, q):
                raise SharedEndpoint("geodesics share an endpoint")
    s, e = sorted(g1.angles())
    inside = [s < t < e for t in g2.angles()]
    return inside[0] != inside[1]


def cos_from(g_ref: Geodesic, g: Geodesic) -> float:
    """Cosine of the angle at the crossing of g_ref and g.

    g is moved to (0, infinity) and g_ref, traversed from its negative to its
    positive endpoint (a, b), gives -cos = (b + a) / (b - a).  The value does
    not depend on either orientation and changes sign when the two
    geodesics are swapped.
    """
    try:
        ok = interlaced(g_ref, g)
    except SharedEndpoint as exc:
        raise NotTransverse("geodesics share an endpoint") from exc
    if not ok:
        raise NotTransverse("geodesics do not cross")
    N = normalizer(g)
    u, v = sorted((_boundary_value(N, g_ref.a), _boundary_value(N, g_ref.b)))
    return float(-(v + u) / (v - u))


def distance_to_geodesic(z: complex, g: Geodesic) -> float:
    w = mobius(normalizer(g), z)
    return float(np.arcsinh(abs(w.real) / w.imag))


# ----------------------------------------------------------- representations

def invert_word(word: str) -> str:
    return word[::-1].swapcase()


@dataclass(frozen=True)
class FuchsianRep:
    surface: str
    generators: dict
    relators: tuple[str, ...] = ()
    peripheral: tuple[str, ...] = field(default=())

    def letter(self, c: str) -> np.ndarray:
        g = self.generators.get(c.upper())
        if g is None:
            raise InputError(f"unknown generator {c!r}")
        if c.isupper():
            return g
        (a, b), (cc, d) = g
        return np.array([[d, -b], [-cc, a]])

    def image(self, word: str) -> np.ndarray:
        out = np.eye(2)
        for c in word:
            out = out @ self.letter(c)
        return out

    def relator_residual(self) -> float:
        res = 0.0
        for r in self.relators:
            m = self.image(r)
            res = max(res, min(np.abs(m - np.eye(2)).max(), np.abs(m + np.eye(2)).max()))
        return float(res)

    def with_generators(self, gens: dict) -> "FuchsianRep":
        return FuchsianRep(self.surface, gens, self.relators, self.peripheral)

    def to_dict(self) -> dict:
        return {"schema": "rep/1", "surface": self.surface,
                "generators": {k: np.asarray(v).tolist() for k, v in self.generators.items()},
                "relators": list(self.relators)}

    @classmethod
    def from_dict(cls, d: dict) -> "FuchsianRep":
        if d.get("schema") != "rep/1":
            raise InputError("expected schema rep/1")
        try:
            gens = {str(k): np.array(v, dtype=float) for k, v in d["generators"].items()}
            surface = str(d["surface"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed representation: {exc}") from exc
        for k, m in gens.items():
            Isometry(m)
        rel = tuple(d.get("relators", ("ABabCDcd",) if surface == "genus2" else ()))
        per = ("ABab",) if surface == "punctured-torus" else ()
        return cls(surface, gens, rel, per)


def load_rep(path) -> FuchsianRep:
    try:
        return FuchsianRep.from_dict(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read representation {path}: {exc}") from exc


def build_punctured_torus(trA: float, trB: float) -> FuchsianRep:
    """A, B with the given traces and tr[A, B] = -2, trace of AB the smaller Markov root."""
    x, y = float(trA), float(trB)
    if x <= 2 or y <= 2:
        raise NoRealSolution("both generators must be hyperbolic (trace > 2)")
    disc = x * x * y * y - 4 * (x * x + y * y)
    if disc < 0:
        raise NoRealSolution("no real trace for AB satisfies the Markov relation")
    z = (x * y - np.sqrt(disc)) / 2
    lam = (x + np.sqrt(x * x - 4)) / 2
    p = (z - y / lam) / (lam - 1 / lam)
    s = y - p
    A = np.diag([lam, 1 / lam])
    B = np.array([[p, 1.0], [p * s - 1, s]])
    rep = FuchsianRep("punctured-torus", {"A": A, "B": B}, (), ("ABab",))
    if abs(np.trace(rep.image("ABab")) + 2) > 1e-10 * max(1.0, x * y):
        raise NoRealSolution("commutator trace check failed")
    return rep


def _one_holed_torus(l: float, twist: float, boundary: float) -> tuple[np.ndarray, np.ndarray]:
    """A of length l along (0, inf); B twisted by ``twist`` along A; tr[A, B] = -2cosh(boundary/2)."""
    A = translation(l)
    m = 2 * np.arcsinh(np.cosh(boundary / 4) / np.sinh(l / 2))
    B0 = np.array([[np.cosh(m / 2), np.sinh(m / 2)], [np.sinh(m / 2), np.cosh(m / 2)]])
    return A, translation(twist) @ B0


def _foot_position(N: np.ndarray, g: Geodesic) -> float:
    """Position along (0, inf), after applying N, of the common perpendicular with g."""
    u, v = _boundary_value(N, g.a), _boundary_value(N, g.b)
    if u * v <= 0:
        raise DegenerateGluing("pants curve crosses the gluing curve")
    return 0.5 * float(np.log(u * v))


def build_genus2_fn(lengths: Sequence[float], twists: Sequence[float] = (0.0, 0.0, 0.0),
                    tol: float = 1e-9) -> FuchsianRep:
    """Genus-2 group from two one-holed tori glued along a separating curve.

    lengths and twists are for (A, C, separating curve); A and C are the
    interior pants curves of the two tori, B and D their duals.  The
    relator is ABabCDcd.
    """
    l1, l2, L = (float(x) for x in lengths)
    t1, t2, t3 = (float(x) for x in twists)
    if min(l1, l2, L) <= 0:
        raise BadConfiguration("pants-curve lengths must be positive")
    A, B = _one_holed_torus(l1, t1, L)
    C0, D0 = _one_holed_torus(l2, t2, L)
    inv = lambda M: np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]])
    K1 = A @ B @ inv(A) @ inv(B)
    K2 = C0 @ D0 @ inv(C0) @ inv(D0)
    N1 = normalizer(axis(inv(K1)))
    N2 = normalizer(axis(K2))
    shift = _foot_position(N1, axis(A)) - _foot_position(N2, axis(C0))
    X = np.linalg.solve(N1, translation(shift + t3) @ N2)
    C = X @ C0 @ inv(X)
    D = X @ D0 @ inv(X)
    # recentre so i sits on the separating axis, between the two tori
    Y = translation(-_foot_position(N1, axis(A))) @ N1
    gens = {k: Y @ M @ inv(Y) for k, M in zip("ABCD", (A, B, C, D))}
    rep = FuchsianRep("genus2", gens, ("ABabCDcd",))
    res = rep.relator_residual()
    if not np.isfinite(res) or res > tol * max(1.0, np.abs(K1).max()):
        raise DegenerateGluing(f"relator residual {res:.3e}")
    for w, l in (("A", l1), ("C", l2), ("ABab", L)):
        if abs(trace_length(rep.image(w)) - l) > 1e-9 * max(1.0, l):
            raise DegenerateGluing(f"length of {w} does not match")
    return rep


# -------------------------------------------------------------- orbit search

def _keys(ms: np.ndarray) -> list[bytes]:
    """Hashable keys for a stack of matrices, identifying M with -M."""
    flat = ms.reshape(len(ms), 4)
    neg = (flat[:, 0] < 0) | ((flat[:, 0] == 0) & (flat[:, 1] < 0))
    flat = np.where(neg[:, None], -flat, flat)
    r = np.round(flat * 1e7).astype(np.int64)
    return [row.tobytes() for row in r]


def _displacement(ms: np.ndarray, z: complex) -> np.ndarray:
    w = (ms[:, 0, 0] * z + ms[:, 0, 1]) / (ms[:, 1, 0] * z + ms[:, 1, 1])
    return np.arccosh(1 + np.abs(w - z) ** 2 / (2 * z.imag * w.imag))


def orbit_ball(rep: FuchsianRep, center: complex, radius: float, depth: int,
               slack: float | None = None) -> list[tuple[str, np.ndarray, int]]:
    """Group elements g with d(center, g center) <= radius, found by breadth-first search.

    Words are expanded while their displacement stays below radius + slack.
    Returns (word, matrix, layer at which the element first appeared).
    """
    letters = [c for g in sorted(rep.generators) for c in (g, g.lower())]
    L = np.array([rep.letter(c) for c in letters])
    inverse_of = np.array([letters.index(c.swapcase()) for c in letters])
    if slack is None:
        slack = float(_displacement(L, center).max())
    seen = set(_keys(np.eye(2)[None]))
    out = [("", np.eye(2), 0)]
    words = [""]
    mats = np.eye(2)[None]
    last = np.array([-1])
    for layer in range(1, depth + 1):
        if not len(mats):
            break
        prod = np.einsum("nij,ljk->nlik", mats, L).reshape(-1, 2, 2)
        parent = np.repeat(np.arange(len(mats)), len(L))
        letter = np.tile(np.arange(len(L)), len(mats))
        ok = inverse_of[letter] != last[parent]
        d = _displacement(prod, center)
        ok &= d <= radius + slack
        idx = np.flatnonzero(ok)
        keep = []
        for i, k in zip(idx, _keys(prod[idx])):
            if k not in seen:
                seen.add(k)
                keep.append(i)
        keep = np.array(keep, dtype=np.int64)
        new_words = [words[parent[i]] + letters[letter[i]] for i in keep]
        for i, w in zip(keep, new_words):
            if d[i] <= radius:
                out.append((w, prod[i], layer))
        words, mats, last = new_words, prod[keep], letter[keep]
    return out


@dataclass(frozen=True)
class Lift:
    word: str
    geodesic: Geodesic
    layer: int


def _lifts(rep: FuchsianRep, delta: str, center: complex, radius: float, depth: int) -> list[Lift]:
    """Distinct translates h.axis(delta) for h in the orbit ball."""
    ax = axis(rep.image(delta))
    lifts: list[Lift] = []
    buckets: dict[tuple, list[int]] = {}
    for w, m, layer in orbit_ball(rep, center, radius, depth):
        g = ax.image(m)
        # points on the unit circle are continuous in the endpoint, unlike angles
        k = tuple(np.round(np.concatenate([_circle_xy(g.a), _circle_xy(g.b)]) * 1e6).astype(np.int64))
        if any(lifts[i].geodesic.same_as(g) for i in buckets.get(k, ())):
            continue
        buckets.setdefault(k, []).append(len(lifts))
        lifts.append(Lift(w, g, layer))
    return lifts


def check_simple(lifts: Sequence[Lift]) -> None:
    """Raise NotSimple if two of the given lifts cross."""
    if len(lifts) < 2:
        return
    ang = np.array([sorted(l.geodesic.angles()) for l in lifts])
    s, e = ang[:, 0][:, None], ang[:, 1][:, None]
    ins = (s < ang[:, 0][None, :]) & (ang[:, 0][None, :] < e)
    ins2 = (s < ang[:, 1][None, :]) & (ang[:, 1][None, :] < e)
    shared = (np.abs(s - ang[:, 0][None, :]) < 1e-12) | (np.abs(s - ang[:, 1][None, :]) < 1e-12) | \
             (np.abs(e - ang[:, 0][None, :]) < 1e-12) | (np.abs(e - ang[:, 1][None, :]) < 1e-12)
    cross = (ins != ins2) & ~shared
    if cross.any():
        i, j = np.argwhere(cross)[0]
        raise NotSimple(f"lifts {lifts[i].word or '1'} and {lifts[j].word or '1'} cross")


# ----------------------------------------------------------------- crossings

@dataclass(frozen=True)
class Crossing:
    word: str
    geodesic: Geodesic
    position: float
    cosine: float
    weight: float


@dataclass(frozen=True)
class CrossingReport:
    gamma: str
    delta: str
    length: float
    crossings: tuple[Crossing, ...]
    saturated: bool
    depth: int

    @property
    def count(self) -> int:
        return len(self.crossings)


def _axis_frame(m: np.ndarray) -> np.ndarray:
    """Normalizer of axis(m) rescaled so the axis point nearest i goes to i."""
    N = normalizer(axis(m))
    r = abs(mobius(N, 1j))
    return translation(-np.log(r)) @ N


def enumerate_crossings(rep: FuchsianRep, gamma: str, delta: str, depth: int = 8,
                        weight: float = 1.0, require_saturation: bool = False) -> CrossingReport:
    """Lifts of delta crossing axis(gamma), one per crossing point in a period of gamma."""
    if depth < 1:
        raise DepthTooSmall("depth must be at least 1")
    mg, md = rep.image(gamma), rep.image(delta)
    lg, ld = trace_length(mg), trace_length(md)
    F = _axis_frame(mg)
    ag = axis(mg)
    c = mobius(np.linalg.inv(F), 1j)
    radius = lg + ld / 2 + distance_to_geodesic(c, axis(md)) + 1e-6
    found: list[tuple[float, Lift, float]] = []
    for lift in _lifts(rep, delta, c, radius, depth):
        g = lift.geodesic
        if any(_same_point(p, q) for p in (g.a, g.b) for q in (ag.a, ag.b)):
            continue
        if not interlaced(ag, g):
            continue
        u, v = _boundary_value(F, g.a), _boundary_value(F, g.b)
        pos = 0.5 * float(np.log(-u * v)) % lg
        found.append((pos, lift, cos_from(ag, g)))
    found.sort(key=lambda r: r[0])
    kept: list[tuple[float, Lift, float]] = []
    for r in found:
        if kept and abs(r[0] - kept[-1][0]) < DEDUP_TOL * max(1.0, lg):
            if r[1].layer < kept[-1][1].layer:
                kept[-1] = r
            continue
        kept.append(r)
    if len(kept) > 1 and kept[-1][0] > lg - DEDUP_TOL * max(1.0, lg) + kept[0][0]:
        first, last = kept[0], kept.pop()
        if last[1].layer < first[1].layer:
            kept[0] = last
    saturated = all(r[1].layer < depth for r in kept)
    if require_saturation and not saturated:
        raise DepthTooSmall(f"crossings of {gamma} with {delta} not saturated at depth {depth}")
    cr = tuple(Crossing(l.word, l.geodesic, p, cs, weight) for p, l, cs in kept)
    return CrossingReport(gamma, delta, lg, cr, saturated, depth)


def cosine_sum(rep: FuchsianRep, gamma: str, delta: str, weight: float = 1.0, depth: int = 8) -> float:
    """Sum of weight * cos over the crossings of gamma with delta in one period."""
    rpt = enumerate_crossings(rep, gamma, delta, depth, weight)
    return float(sum(c.weight * c.cosine for c in rpt.crossings))


def multicurve_bracket(rep: FuchsianRep, gamma: Iterable[tuple[str, float]],
                       delta: Iterable[tuple[str, float]], depth: int = 8) -> float:
    """Weighted double sum of cosine_sum over component pairs."""
    delta = list(delta)
    total = 0.0
    for g, wg in gamma:
        for d, wd in delta:
            total += wg * wd * cosine_sum(rep, g, d, 1.0, depth)
    return float(total)


# -------------------------------------------------------------------- twists

@dataclass(frozen=True)
class TwistData:
    """Per generator, the oriented lifts of delta met on the way from x0 to g x0."""
    rep: FuchsianRep
    delta: str
    basepoint: complex
    frames: dict  # generator letter -> list of normalizers, nearest lift first


def _basepoint(rep: FuchsianRep, delta: str) -> complex:
    return 0.1234567 + 1.0987654j


def twist_data(rep: FuchsianRep, delta: str, depth: int = 8) -> TwistData:
    md = rep.image(delta)
    ld = trace_length(md)
    x0 = _basepoint(rep, delta)
    dx = distance_to_geodesic(x0, axis(md))
    frames = {}
    for gname in sorted(rep.generators):
        y = mobius(rep.generators[gname], x0)
        radius = hyperbolic_distance(x0, y) + ld / 2 + dx + 1e-6
        lifts = _lifts(rep, delta, x0, radius, depth)
        check_simple(lifts)
        sep = []
        for l in lifts:
            N = normalizer(l.geodesic)
            if abs(mobius(N, x0).real) < 1e-9 or abs(mobius(N, y).real) < 1e-9:
                raise BadConfiguration("basepoint lies on a lift of the twist curve")
            if mobius(N, x0).real < 0:
                N = normalizer(l.geodesic.reversed())
            if mobius(N, y).real < 0:
                sep.append((distance_to_geodesic(x0, l.geodesic), N))
        sep.sort(key=lambda r: r[0])
        frames[gname] = [N for _, N in sep]
    return TwistData(rep, delta, x0, frames)


def apply_twist(data: TwistData, s: float) -> FuchsianRep:
    """Generators twisted by s along delta: rho_s(g) = E(x0, g x0) rho(g)."""
    gens = {}
    for gname, m in data.rep.generators.items():
        E = np.eye(2)
        for N in data.frames[gname]:
            # x0 lies to the right of each oriented lift; the far side moves
            # forward by s, which makes d length / ds equal the cosine sum
            E = E @ np.linalg.solve(N, translation(s) @ N)
        gens[gname] = E @ m
    return data.rep.with_generators(gens)


def twist_deform(rep: FuchsianRep, delta: str, weight: float, t: float, depth: int = 8) -> FuchsianRep:
    if t == 0:
        return rep
    return apply_twist(twist_data(rep, delta, depth), weight * t)


@dataclass(frozen=True)
class Derivative:
    value: float
    error: float


def richardson_derivative(f, h: float = 1e-4) -> Derivative:
    """Central differences at h, h/2, h/4 with two levels of Richardson extrapolation."""
    d = [(f(hh) - f(-hh)) / (2 * hh) for hh in (h, h / 2, h / 4)]
    r1 = [(4 * d[1] - d[0]) / 3, (4 * d[2] - d[1]) / 3]
    r2 = (16 * r1[1] - r1[0]) / 15
    return Derivative(float(r2), float(abs(r2 - r1[1])))


def dlength_dtwist(rep: FuchsianRep, gamma: str, delta: str, weight: float = 1.0,
                   depth: int = 8, h: float = 1e-4) -> Derivative:
    data = twist_data(rep, delta, depth)
    f = lambda t: trace_length(apply_twist(data, weight * t).image(gamma))
    return richardson_derivative(f, h)


# --------------------------------------------------- trace along a shear

def shear_matrices(a: float, b: float, ell: float, alpha: float, t: float):
    """gamma from a to b with length ell, and the elementary shear product at time t.

    The shear is the translation by t*alpha along (0, inf) composed with the
    parabolic fixing infinity that carries 1 to 0, conjugated back.
    """
    ep, em = np.exp(ell / 2), np.exp(-ell / 2)
    gamma = np.array([[b * ep - a * em, a * b * (em - ep)],
                      [ep - em, b * em - a * ep]]) / (b - a)
    s = t * alpha
    E = (np.diag([np.exp(s / 2), np.exp(-s / 2)]) @ np.array([[1.0, 1.0], [0.0, 1.0]])
         @ np.diag([np.exp(-s / 2), np.exp(s / 2)]) @ np.array([[1.0, -1.0], [0.0, 1.0]]))
    return gamma, E


def dtau_dshear_printed(a: float, b: float, ell: float, alpha: float) -> float:
    return float(-alpha * np.sinh(ell / 2) / (a - b))


def dtau_dshear_exact(a: float, b: float, ell: float, alpha: float) -> float:
    """Derivative of tr(E gamma) at 0: alpha times the lower-left entry of gamma."""
    return float(2 * alpha * np.sinh(ell / 2) / (b - a))


def dtau_dshear_check(a: float, b: float, ell: float, alpha: float,
                      h: float = 1e-4) -> tuple[float, float]:
    """(value of the printed closed form, finite-difference derivative of the trace)."""
    if not a < 0 < b or ell <= 0:
        raise BadConfiguration("need a < 0 < b and ell > 0")
    def f(t):
        g, E = shear_matrices(a, b, ell, alpha, t)
        return float(np.trace(E @ g))
    return dtau_dshear_printed(a, b, ell, alpha), richardson_derivative(f, h).value
