"""Offline generator for the shipped genus-2 pseudo-Anosov example.

Random splittings of large branches are applied to a maximal genus-2 track
until a combinatorial type repeats.  A repeat tau_i ~ tau_j gives a mapping
class whose incidence matrix is C_{i+1}...C_j Pi, where Pi relabels branches
through the ribbon isomorphism.  Candidates are kept when the incidence is
primitive, the induced action is exactly symplectic, the action is
diagonalizable and no eigenvalue is a negative real or on the unit circle.

Not part of the library API; run as ``python3 tools/make_example.py``.
"""
from __future__ import annotations

import argparse
import json
import random
from collections import deque
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from paflow import exact, pa, tracks
from paflow.tracks import Switch, TrainTrack


def large_branches(t: TrainTrack) -> list[int]:
    ends = {}
    for s in t.switches:
        ends.setdefault(s.large[0], []).append(s.large[1])
    return sorted(b for b, e in ends.items() if sorted(e) == [0, 1])


def split(t: TrainTrack, b: int, kind: int) -> tuple[TrainTrack, np.ndarray]:
    """Split large branch b; returns the new track and the carrying matrix (old x new)."""
    by_large = {s.large: s for s in t.switches}
    s1, s2 = by_large[(b, 0)], by_large[(b, 1)]
    L1, R1, L2, R2 = s1.small_left, s1.small_right, s2.small_left, s2.small_right
    if kind == 0:
        p = Switch(s1.id, R1, L2, (b, 0))
        q = Switch(s2.id, R2, L1, (b, 1))
        extra = (L1[0], L2[0])
    else:
        p = Switch(s1.id, L1, (b, 0), R2)
        q = Switch(s2.id, L2, (b, 1), R1)
        extra = (R1[0], R2[0])
    sw = tuple(p if s.id == s1.id else q if s.id == s2.id else s for s in t.switches)
    new = TrainTrack(t.genus, t.branches, sw)
    idx = t.index()
    C = np.eye(t.n_branches, dtype=np.int64)
    for e in extra:
        C[idx[b], idx[e]] += 1
    return new, C


def canonical(t: TrainTrack):
    """Minimal BFS encoding over all starting switches; returns (code, branch -> label)."""
    at = {}
    for s in t.switches:
        for sl in s.slots():
            at[sl] = s
    best = None
    for s0 in t.switches:
        slabel = {s0.id: 0}
        blabel: dict[int, tuple[int, int]] = {}  # branch -> (label, flip)
        queue = deque([s0])
        code = []
        while queue:
            s = queue.popleft()
            rec = []
            for (br, e) in s.slots():
                if br not in blabel:
                    blabel[br] = (len(blabel), e)
                lab, first = blabel[br]
                rec.append((lab, 0 if e == first else 1))
                other = at[(br, 1 - e)]
                if other.id not in slabel:
                    slabel[other.id] = len(slabel)
                    queue.append(other)
            code.append(tuple(rec))
        code = tuple(code)
        if best is None or code < best[0]:
            best = (code, {br: lab for br, (lab, _) in blabel.items()})
    return best


def relabel_matrix(ti: TrainTrack, mi: dict, tj: TrainTrack, mj: dict) -> np.ndarray:
    n = ti.n_branches
    inv_j = {lab: br for br, lab in mj.items()}
    ii, ij = ti.index(), tj.index()
    P = np.zeros((n, n), dtype=np.int64)
    for br, lab in mi.items():
        P[ij[inv_j[lab]], ii[br]] = 1
    return P


def restricted_action(ws: tracks.WeightSpace, M: np.ndarray):
    basis = ws.matrix()
    image = exact.matmul([[int(x) for x in row] for row in M], basis)
    return exact.solve(basis, image)


def good(t: TrainTrack, M: np.ndarray, allow_negative: bool = False) -> tuple[bool, str]:
    try:
        pa.perron_frobenius(M)
    except Exception as exc:  # noqa: BLE001 - any failure rejects the candidate
        return False, type(exc).__name__
    ws = tracks.weight_space(t)
    form = tracks.thurston_form(t, ws).form
    B = restricted_action(ws, M)
    lhs = exact.matmul(exact.matmul(exact.transpose(B), form), B)
    if lhs != form:
        return False, "not symplectic"
    Bf = np.array([[float(x) for x in r] for r in B])
    ev, V = np.linalg.eig(Bf)
    if np.linalg.cond(V) > 1e6:
        return False, "defective"
    if np.any(np.abs(np.abs(ev) - 1) < 1e-6):
        return False, "unit-circle eigenvalue"
    negative = bool(np.any((np.abs(ev.imag) < 1e-9) & (ev.real < 0)))
    if negative != allow_negative:
        return False, "negative eigenvalue" if negative else "no negative eigenvalue"
    return True, "ok"


def positive_weight(t: TrainTrack, rng: np.random.Generator) -> np.ndarray:
    """A random strictly positive weight vector (switch conditions hold)."""
    A = np.array(tracks.switch_matrix(t), dtype=float)
    n = t.n_branches
    res = linprog(rng.uniform(0.5, 1.5, n), A_eq=A, b_eq=np.zeros(len(A)), bounds=[(1, None)] * n)
    if not res.success:
        raise RuntimeError("track is not recurrent")
    basis = tracks.weight_space(t).as_array()
    w = res.x + basis @ rng.normal(scale=0.3, size=basis.shape[1])
    return w if (w > 0).all() else res.x


def search(seed: int, steps: int, negative: bool = False):
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    t = tracks.maximal_track(2)
    w = positive_weight(t, nrng)
    history = [t]
    mats = [None]
    seen = {canonical(t)[0]: 0}
    for step in range(1, steps + 1):
        cur = history[-1]
        idx = cur.index()
        b = rng.choice(large_branches(cur))
        by_large = {s.large: s for s in cur.switches}
        s1, s2 = by_large[(b, 0)], by_large[(b, 1)]
        kind = 0 if w[idx[s1.small_right[0]]] > w[idx[s2.small_left[0]]] else 1
        new, C = split(cur, b, kind)
        w = np.linalg.solve(C.astype(float), w)
        w /= w.sum()
        history.append(new)
        mats.append(C)
        code, mj = canonical(new)
        if code in seen:
            i = seen[code]
            _, mi = canonical(history[i])
            M = np.eye(t.n_branches, dtype=np.int64)
            for C in mats[i + 1:]:
                M = M @ C
            M = M @ relabel_matrix(history[i], mi, new, mj)
            ok, why = good(history[i], M, negative)
            if ok:
                return history[i], M, (i, step)
        seen[code] = step
    return None


def write(out: Path, stem: str, t: TrainTrack, M: np.ndarray) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}_track.json").write_text(json.dumps(t.to_dict(), indent=1) + "\n")
    (out / f"{stem}_pa.json").write_text(json.dumps(
        {"schema": "incidence/1", "source": f"{stem}_track.json", "target": f"{stem}_track.json",
         "matrix": M.tolist()}) + "\n")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tries", type=int, default=40)
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "src/paflow/data")
    ap.add_argument("--negative-out", type=Path,
                    default=Path(__file__).resolve().parents[1] / "src/paflow/data")
    args = ap.parse_args()
    best = None
    negative = None
    for k in range(args.tries):
        found = search(args.seed + k, args.steps)
        if found is not None:
            lam = pa.perron_frobenius(found[1])[0]
            print(f"seed {args.seed + k}: cycle {found[2]}, stretch {lam:.6f}, max entry {found[1].max()}")
            if best is None or lam < best[0]:
                best = (lam, found)
        neg = search(args.seed + k, args.steps, negative=True)
        if neg is not None:
            rho = float(np.abs(np.linalg.eigvals(neg[1].astype(float))).max())
            if negative is None or rho < negative[0]:
                negative = (rho, neg)
    if best is None or negative is None:
        raise SystemExit("no candidate found")
    write(args.out, "genus2", best[1][0], best[1][1])
    write(args.negative_out, "genus2_negative", negative[1][0], negative[1][1])
    print("negative example spectral radius", negative[0])
    print("kept stretch factor", best[0])


if __name__ == "__main__":
    main()
