"""Trivalent train tracks: switch conditions, weight spaces and the Thurston form.

A half-branch slot is a pair ``(branch, end)`` with ``end`` in {0, 1}.  Each
switch lists its large slot and its two small slots.  Left and right are read
while travelling along the large half-branch into the switch, facing the small
side, so the counterclockwise order at a switch is (large, right, left) and the
single cusp of a switch sits between the right and the left slot.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import exact
from .errors import DegenerateForm, InputError, ShapeMismatch, SwitchViolation

Slot = tuple[int, int]


@dataclass(frozen=True)
class Switch:
    id: int
    large: Slot
    small_left: Slot
    small_right: Slot

    def slots(self) -> tuple[Slot, Slot, Slot]:
        return (self.large, self.small_left, self.small_right)


@dataclass(frozen=True)
class TrainTrack:
    genus: int
    branches: tuple[int, ...]
    switches: tuple[Switch, ...]

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    def index(self) -> dict[int, int]:
        """Branch id -> coordinate position."""
        return {b: i for i, b in enumerate(self.branches)}

    def to_dict(self) -> dict:
        return {
            "schema": "track/1",
            "genus": self.genus,
            "branches": [{"id": b} for b in self.branches],
            "switches": [
                {"id": s.id, "large": list(s.large), "small_left": list(s.small_left),
                 "small_right": list(s.small_right)}
                for s in self.switches
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainTrack":
        try:
            if d.get("schema") != "track/1":
                raise InputError(f"expected schema track/1, got {d.get('schema')!r}")
            branches = tuple(int(b["id"]) for b in d["branches"])
            switches = tuple(
                Switch(int(s["id"]), _slot(s["large"]), _slot(s["small_left"]), _slot(s["small_right"]))
                for s in d["switches"]
            )
            return cls(int(d["genus"]), branches, switches)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed track: {exc}") from exc


def _slot(x) -> Slot:
    b, e = x
    return (int(b), int(e))


def load_track(path) -> TrainTrack:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read track {path}: {exc}") from exc
    return TrainTrack.from_dict(data)


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problem: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_track(t: TrainTrack) -> ValidationReport:
    """Check the structural invariants and name the first one that fails."""
    if len(set(t.branches)) != len(t.branches):
        return ValidationReport(False, "duplicate branch id")
    if not t.branches:
        return ValidationReport(False, "track has no branches")
    if t.genus < 1:
        return ValidationReport(False, "genus must be positive")
    known = set(t.branches)
    seen: dict[Slot, int] = {}
    for s in t.switches:
        slots = s.slots()
        for b, e in slots:
            if b not in known:
                return ValidationReport(False, f"dangling half-branch: switch {s.id} references missing branch {b}")
            if e not in (0, 1):
                return ValidationReport(False, f"switch {s.id}: end must be 0 or 1, got {e}")
        if len(set(slots)) != 3:
            return ValidationReport(False, f"switch {s.id} uses the same half-branch slot twice")
        for sl in slots:
            if sl in seen:
                return ValidationReport(False, f"half-branch {sl} attached to switches {seen[sl]} and {s.id}")
            seen[sl] = s.id
    for b in t.branches:
        for e in (0, 1):
            if (b, e) not in seen:
                return ValidationReport(False, f"dangling half-branch: end {e} of branch {b} has no switch")
    if len({s.id for s in t.switches}) != len(t.switches):
        return ValidationReport(False, "duplicate switch id")
    # connectivity over switches and branches
    adj: dict[int, set[int]] = {b: set() for b in t.branches}
    for s in t.switches:
        bs = {b for b, _ in s.slots()}
        for b in bs:
            adj[b] |= bs
    start = t.branches[0]
    reached = {start}
    queue = deque([start])
    while queue:
        for nb in adj[queue.popleft()]:
            if nb not in reached:
                reached.add(nb)
                queue.append(nb)
    if len(reached) != len(t.branches):
        return ValidationReport(False, "track is not connected")
    return ValidationReport(True, None)


def _require_valid(t: TrainTrack) -> None:
    rep = validate_track(t)
    if not rep.ok:
        raise InputError(f"invalid track: {rep.problem}")


# ------------------------------------------------------------- weight space

def switch_matrix(t: TrainTrack) -> list[list[int]]:
    """One row per switch: w(large) - w(left) - w(right)."""
    idx = t.index()
    rows = []
    for s in t.switches:
        row = [0] * t.n_branches
        row[idx[s.large[0]]] += 1
        row[idx[s.small_left[0]]] -= 1
        row[idx[s.small_right[0]]] -= 1
        rows.append(row)
    return rows


@dataclass(frozen=True)
class WeightSpace:
    track: TrainTrack
    basis: tuple[tuple[Fraction, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        """Branches x dimension matrix whose columns are the basis vectors."""
        return exact.transpose(self.basis)

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.basis]).T

    def coordinates(self, w: Sequence) -> tuple[Fraction, ...]:
        """Exact basis coordinates of a branch-weight vector lying in the space."""
        sol = exact.solve(self.matrix(), [[Fraction(x)] for x in w])
        return tuple(r[0] for r in sol)

    def vector(self, coords: Sequence) -> tuple:
        """Branch weights of the combination with the given basis coordinates."""
        return tuple(sum((c * v[i] for c, v in zip(coords, self.basis)), Fraction(0) * 0)
                     for i in range(self.track.n_branches))


def weight_space(t: TrainTrack) -> WeightSpace:
    _require_valid(t)
    basis = exact.nullspace(switch_matrix(t), t.n_branches)
    return WeightSpace(t, tuple(basis))


def load_weights(path, track: TrainTrack) -> tuple[Fraction, ...]:
    """Weight vector from a weights/1 file; values are rational strings such as "3/2"."""
    try:
        data = json.loads(Path(path).read_text())
        if data.get("schema") != "weights/1":
            raise InputError("expected schema weights/1")
        w = tuple(Fraction(str(x)) for x in data["values"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot read weights {path}: {exc}") from exc
    if len(w) != track.n_branches:
        raise ShapeMismatch(f"{len(w)} weights for {track.n_branches} branches")
    if not satisfies_switch_conditions(track, w):
        raise SwitchViolation("weights violate the switch conditions")
    return w


def satisfies_switch_conditions(t: TrainTrack, w: Sequence, tol: float = 1e-9) -> bool:
    exact_mode = all(isinstance(x, (int, Fraction)) for x in w)
    for row in switch_matrix(t):
        r = sum(c * x for c, x in zip(row, w))
        if exact_mode:
            if r != 0:
                return False
        elif abs(r) > tol * max(1.0, max(abs(float(x)) for x in w)):
            return False
    return True


# ------------------------------------------------------------ Thurston form

@dataclass(frozen=True)
class SymplecticSpace:
    dimension: int
    form: tuple[tuple, ...]
    degenerate: bool = False

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.form])


def thurston_pairing(t: TrainTrack, a: Sequence, b: Sequence):
    """omega(a, b) = 1/2 sum over switches of a(r) b(l) - b(r) a(l) on branch weights."""
    idx = t.index()
    half = Fraction(1, 2) if all(isinstance(x, (int, Fraction)) for x in list(a) + list(b)) else 0.5
    total = 0
    for s in t.switches:
        r = idx[s.small_right[0]]
        l = idx[s.small_left[0]]
        total += a[r] * b[l] - b[r] * a[l]
    return half * total


def thurston_form(t: TrainTrack, basis: Sequence[Sequence] | WeightSpace) -> SymplecticSpace:
    if isinstance(basis, WeightSpace):
        basis = basis.basis
    n = len(basis)
    form = tuple(tuple(thurston_pairing(t, basis[i], basis[j]) for j in range(n)) for i in range(n))
    degenerate = n == 0 or n % 2 == 1 or exact.det(form) == 0
    return SymplecticSpace(n, form, degenerate)


def omega(form, u, v):
    """Evaluate u^T form v; exact when every entry is rational."""
    if all(isinstance(x, (int, Fraction)) for x in list(u) + list(v)) and \
            all(isinstance(x, (int, Fraction)) for row in form for x in row):
        return sum((Fraction(u[i]) * form[i][j] * Fraction(v[j])
                    for i in range(len(u)) for j in range(len(v))), Fraction(0))
    F = np.asarray(form, dtype=float)
    return float(np.asarray(u, dtype=float) @ F @ np.asarray(v, dtype=float))


# ----------------------------------------------------------------- carrying

@dataclass(frozen=True)
class IncidenceMatrix:
    source: TrainTrack
    target: TrainTrack
    matrix: tuple[tuple[int, ...], ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)


def load_incidence(path, source: TrainTrack, target: TrainTrack | None = None) -> IncidenceMatrix:
    try:
        data = json.loads(Path(path).read_text())
        if data.get("schema") != "incidence/1":
            raise InputError("expected schema incidence/1")
        m = tuple(tuple(int(x) for x in row) for row in data["matrix"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read incidence matrix {path}: {exc}") from exc
    return IncidenceMatrix(source, target if target is not None else source, m)


def apply_carrying(m: IncidenceMatrix, w: Sequence) -> tuple:
    """Push a source weight vector forward through the incidence matrix."""
    rows, cols = len(m.matrix), len(m.matrix[0]) if m.matrix else 0
    if cols != m.source.n_branches or rows != m.target.n_branches or len(w) != cols:
        raise ShapeMismatch(f"incidence {rows}x{cols} vs source {m.source.n_branches}, "
                            f"target {m.target.n_branches}, vector {len(w)}")
    if not satisfies_switch_conditions(m.source, w):
        raise SwitchViolation("input weights violate the source switch conditions")
    out = tuple(sum((c * x for c, x in zip(row, w)), 0 * w[0]) for row in m.matrix)
    if not satisfies_switch_conditions(m.target, out):
        raise SwitchViolation("incidence matrix does not map into the target weight space")
    return out


# ------------------------------------------------------------------ duality

def duality_star(space: SymplecticSpace | np.ndarray, covector: Sequence) -> tuple | np.ndarray:
    """The vector x with omega(w, x) = <w, c> for every w, i.e. x = Omega^{-1} c.

    Exact when the form and covector are rational, float otherwise.
    """
    form = space.form if isinstance(space, SymplecticSpace) else space
    rational = not isinstance(form, np.ndarray) and all(
        isinstance(x, (int, Fraction)) for row in form for x in row) and all(
        isinstance(x, (int, Fraction)) for x in covector)
    if rational:
        if exact.det(form) == 0:
            raise DegenerateForm("form is degenerate")
        sol = exact.solve(form, [[Fraction(c)] for c in covector])
        return tuple(r[0] for r in sol)
    F = np.asarray(form, dtype=float)
    if abs(np.linalg.det(F)) < 1e-14 * max(1.0, np.abs(F).max()) ** len(F):
        raise DegenerateForm("form is degenerate")
    return np.linalg.solve(F, np.asarray(covector, dtype=float))


def star_matrix(form) -> np.ndarray:
    """Matrix of the duality map on coordinates."""
    return np.linalg.inv(np.asarray(form, dtype=float))


def conjugation_residual(form, B) -> float:
    """max |* B' - B^{-1} *| with B' = B^T the dual action on covectors."""
    S = star_matrix(form)
    B = np.asarray(B, dtype=float)
    return float(np.abs(S @ B.T - np.linalg.solve(B, S)).max())


# -------------------------------------------------------- ribbon structure

def _rotation(t: TrainTrack) -> dict[Slot, Slot]:
    rot = {}
    for s in t.switches:
        rot[s.large] = s.small_right
        rot[s.small_right] = s.small_left
        rot[s.small_left] = s.large
    return rot


def faces(t: TrainTrack) -> list[list[Slot]]:
    """Boundary cycles of the thickened track, as lists of departing slots."""
    rot = _rotation(t)
    unseen = set(rot)
    out = []
    while unseen:
        d = min(unseen)
        cycle = []
        while d in unseen:
            unseen.remove(d)
            cycle.append(d)
            b, e = d
            d = rot[(b, 1 - e)]
        out.append(cycle)
    return out


def face_cusps(t: TrainTrack) -> list[int]:
    rights = {s.small_right for s in t.switches}
    return [sum((b, 1 - e) in rights for b, e in f) for f in faces(t)]


def ribbon_genus(t: TrainTrack) -> Fraction:
    chi = len(t.switches) - t.n_branches + len(faces(t))
    return Fraction(2 - chi, 2)


def is_maximal(t: TrainTrack) -> bool:
    """Every complementary region is a trigon and the ribbon genus matches."""
    return all(c == 3 for c in face_cusps(t)) and ribbon_genus(t) == t.genus


# ------------------------------------------------------------- generator

def _pants_graph(genus: int) -> list[tuple[int, int]]:
    """Trivalent graph with 2g-2 vertices: a cycle plus long chords."""
    n = 2 * genus - 2
    if genus == 2:
        return [(0, 1), (1, 0), (0, 1)]
    edges = [(i, (i + 1) % n) for i in range(n)]
    edges += [(i, i + genus - 1) for i in range(genus - 1)]
    return edges


def maximal_track(genus: int) -> TrainTrack:
    """A maximal recurrent track with 12g-12 switches and 18g-18 branches.

    Each pants curve becomes a loop of four branches.  Each pair of pants
    carries three arcs joining its cuffs in pairs; every arc end merges into a
    cuff loop turning right.
    """
    if genus < 2:
        raise InputError("maximal_track needs genus >= 2")
    edges = _pants_graph(genus)
    cuffs: dict[int, list[tuple[int, int]]] = {}  # pants -> [(curve, side)]
    for c, (p, q) in enumerate(edges):
        cuffs.setdefault(p, []).append((c, 0))  # side 0: left of the curve
        cuffs.setdefault(q, []).append((c, 1))
    ncurves = len(edges)
    loop = lambda c, k: 4 * c + (k % 4)  # loop branch from position k to k+1
    next_id = 4 * ncurves
    # positions 0, 2 for left-side arcs, 1, 3 for right-side arcs
    free = {(c, side): [side, side + 2] for c in range(ncurves) for side in (0, 1)}
    switches = []
    branches = list(range(4 * ncurves))
    for p in sorted(cuffs):
        cs = cuffs[p]
        for i in range(3):
            arc = next_id
            next_id += 1
            branches.append(arc)
            for end, (c, side) in enumerate((cs[i], cs[(i + 1) % 3])):
                k = free[(c, side)].pop(0)
                if side == 0:  # merges travelling backwards along the curve
                    large, right = (loop(c, k - 1), 1), (loop(c, k), 0)
                else:
                    large, right = (loop(c, k), 0), (loop(c, k - 1), 1)
                switches.append(Switch(len(switches), large, (arc, end), right))
    return TrainTrack(genus, tuple(branches), tuple(switches))
