"""Acceptance batteries, one function per criterion, shared by the CLI and the tests."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from importlib.resources import files

import numpy as np
from scipy.linalg import expm

from . import hamiltonian as ham
from . import hyperbolic as hyp
from . import pa, symplectic as sym, tracks


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    passed: bool
    residual: float
    threshold: float
    seconds: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] criterion {self.criterion:2d} {self.name}: residual {self.residual:.3e} "
                f"(threshold {self.threshold:.1e}, {self.seconds:.2f} s){' ' + self.detail if self.detail else ''}")

    def to_dict(self) -> dict:
        return asdict(self)


_CACHE: dict = {}


def example() -> tuple[pa.PseudoAnosovData, ham.Potential]:
    if "example" not in _CACHE:
        d = pa.shipped_example()
        _CACHE["example"] = (d, ham.build_potential(d))
    return _CACHE["example"]


def cone_points(d: pa.PseudoAnosovData, n: int, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    while len(out) < n:
        s = rng.normal(size=d.B.shape[0])
        if ham.cone_witness(d.mu_plus, s, d.form) > 0:
            out.append(s)
    return out


def _timed(fn):
    t0 = time.perf_counter()
    res = fn()
    return res, time.perf_counter() - t0


# ------------------------------------------------------------ criteria

def time_one_flow(seed: int = 0) -> Check:
    def run():
        d, p = example()
        Binv = np.linalg.inv(d.B)
        pts = cone_points(d, 20, np.random.default_rng(seed))
        return max(float(np.abs(ham.flow(p, s, 1.0).sigma - Binv @ s).max()) for s in pts)
    res, dt = _timed(run)
    return Check(1, "time-one flow equals B^-1", res < 1e-8 and dt < 5, res, 1e-8, dt)


BLOCK_SETTINGS = {
    "RealPair": [{"lam": 1.5}, {"lam": 3.0}, {"lam": 10.0}],
    "UnitCircleSimple": [{"theta": 0.3}, {"theta": 1.2}, {"theta": -2.5}],
    "ComplexQuad": [{"modulus": 1.5, "theta": 0.4}, {"modulus": 2.0, "theta": 1.5},
                    {"modulus": 4.0, "theta": 2.8}],
    "RealJordan": [{"lam": 2.0, "size": 2}, {"lam": 1.3, "size": 3}, {"lam": 5.0, "size": 4}],
    "ComplexJordan": [{"modulus": 1.7, "theta": 0.9, "size": 1}, {"modulus": 2.5, "theta": 2.0, "size": 2},
                      {"modulus": 1.2, "theta": 0.2, "size": 3}],
    "UnipotentLagrangian": [{"size": 2}, {"size": 3}, {"size": 4}],
    "UnipotentNonLagrangian": [{"size": 2}, {"size": 4}, {"size": 6}],
    "UnitCircleLagrangian": [{"theta": 0.5, "size": 1}, {"theta": 1.1, "size": 2},
                             {"theta": -0.7, "size": 3}],
    "UnitCircleOddNoSplit": [{"theta": 0.4, "size": 1}, {"theta": 1.3, "size": 3},
                             {"theta": -0.9, "size": 5}],
    "UnitCircleEvenNoSplit": [{"theta": 0.6, "size": 2}, {"theta": 1.7, "size": 4},
                              {"theta": -0.5, "size": 2}],
}


def expansion_identity(seed: int = 0) -> Check:
    def run():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for kind, settings in BLOCK_SETTINGS.items():
            for params in settings:
                X, _ = sym.block_generator(kind, params)
                h = X.shape[0] // 2
                J = sym.standard_form(h)
                terms = ham.block_polynomial(kind, params)
                for _ in range(100):
                    s = rng.normal(size=2 * h)
                    lhs = ham.evaluate_terms(terms, J @ s)
                    rhs = -0.5 * float((X @ s) @ J @ s)
                    worst = max(worst, abs(lhs - rhs))
        return worst
    res, dt = _timed(run)
    return Check(2, "block polynomials equal -1/2 omega(X s, s)", res < 1e-9 and dt < 10, res, 1e-9, dt)


def conservation(seed: int = 0) -> Check:
    def run():
        d, p = example()
        s0 = cone_points(d, 1, np.random.default_rng(seed))[0]
        F0 = p(s0)
        cons = symp = 0.0
        for t in np.linspace(0.0, 2.0, 21):
            E = ham.flow_matrix(p, t)
            cons = max(cons, abs(p(E @ s0) - F0))
            symp = max(symp, float(np.abs(E.T @ d.form @ E - d.form).max()))
        return cons, symp
    (cons, symp), dt = _timed(run)
    return Check(3, "potential conserved and flow symplectic", cons < 1e-9 and symp < 1e-8,
                 max(cons, symp), 1e-9, dt, f"conservation {cons:.2e}, symplecticity {symp:.2e}")


def stretch_line() -> Check:
    def run():
        d, p = example()
        b1 = p.basis[:, p.basis.shape[1] // 2]
        vanish = max(abs(p(s * b1)) for s in (0.5, 1.0, 2.0))
        col = 0.0
        for t in np.linspace(0.0, 2.0, 11):
            x = ham.flow(p, b1, t).sigma
            perp = x - (x @ b1) / (b1 @ b1) * b1
            col = max(col, float(np.linalg.norm(perp) / np.linalg.norm(x)))
        return vanish, col
    (vanish, col), dt = _timed(run)
    return Check(4, "potential vanishes on the stretch ray", vanish < 1e-10 and col < 1e-9,
                 max(vanish, col), 1e-10, dt, f"F {vanish:.2e}, collinearity {col:.2e}")


def spectrum_pairing() -> Check:
    def run():
        d, _ = example()
        data = files("paflow") / "data"
        dn = pa.analyze_files(data / "genus2_negative_track.json", data / "genus2_negative_pa.json")
        res = [pa.reciprocal_residual(d.spectrum), pa.reciprocal_residual(dn.spectrum)]
        lam, _ = pa.perron_frobenius([[2, 1], [1, 1]])
        return max(res), abs(lam - (3 + np.sqrt(5)) / 2)
    (rec, pf), dt = _timed(run)
    return Check(5, "spectra reciprocal, Perron-Frobenius root", rec < 1e-8 and pf < 1e-10,
                 max(rec, pf), 1e-8, dt, f"reciprocal {rec:.2e}, golden {pf:.2e}")


def cosine_battery() -> list[tuple[hyp.FuchsianRep, str, str, float]]:
    pt1 = hyp.build_punctured_torus(3.0, 3.0)
    pt2 = hyp.build_punctured_torus(3.0, 4.0)
    pt3 = hyp.build_punctured_torus(2.5, 3.5)
    g1 = hyp.build_genus2_fn((1.5, 1.8, 2.2), (0.3, -0.2, 0.4))
    g2 = hyp.build_genus2_fn((2.0, 2.0, 2.0), (0.0, 0.0, 0.0))
    return [
        (pt1, "B", "A", 1.0), (pt1, "AB", "A", 0.5), (pt2, "B", "A", 1.0), (pt2, "BB", "AB", 2.0),
        (pt3, "Ab", "B", 1.0), (pt3, "ABB", "A", 1.0),
        (g1, "B", "A", 1.0), (g1, "BD", "ABab", 1.0), (g1, "BC", "A", 0.7), (g1, "BDc", "C", 1.0),
        (g2, "bD", "ABab", 1.5), (g2, "AC", "B", 1.0),
    ]


def kerckhoff_formula(depth: int = 8) -> Check:
    def run():
        worst, n = 0.0, 0
        for rep, g, dl, w in cosine_battery():
            cs = hyp.cosine_sum(rep, g, dl, w, depth)
            fd = hyp.dlength_dtwist(rep, g, dl, w, depth).value
            worst = max(worst, abs(fd - cs) / max(1.0, abs(cs)))
            n += 1
        return worst, n
    (res, n), dt = _timed(run)
    return Check(6, "twist derivative equals the cosine sum", res < 1e-5 and n >= 10 and dt < 60,
                 res, 1e-5, dt, f"{n} triples")


def trace_derivative() -> Check:
    def run():
        worst = 0.0
        for a in (-2.0, -1.0, -0.5):
            for b in (0.5, 1.0, 3.0):
                for ell in (0.5, 1.0, 2.0):
                    an, num = hyp.dtau_dshear_check(a, b, ell, 0.7)
                    worst = max(worst, abs(an - num))
        return worst
    res, dt = _timed(run)
    return Check(7, "printed trace derivative vs finite differences", res < 1e-7, res, 1e-7, dt)


def bracket_antisymmetry(seed: int = 0) -> Check:
    def run():
        g = hyp.build_genus2_fn((1.5, 1.8, 2.2), (0.3, -0.2, 0.4))
        t = hyp.build_punctured_torus(3.0, 4.0)
        cases = [(g, [("B", 1.0), ("D", 0.5)], [("A", 2.0), ("ABab", 1.0)]),
                 (g, [("BDc", 1.0)], [("C", 1.0), ("A", 0.3)]),
                 (t, [("B", 1.0)], [("A", 1.0), ("AB", 2.0)])]
        anti = max(abs(hyp.multicurve_bracket(r, x, y) + hyp.multicurve_bracket(r, y, x))
                   for r, x, y in cases)
        d, _ = example()
        tr, ws = d.space.track, d.space
        form = tracks.thurston_form(tr, ws).form
        rng = np.random.default_rng(seed)
        exact_ok = True
        for _ in range(10):
            a = [Fraction(int(x), int(y)) for x, y in zip(rng.integers(-9, 10, ws.dimension),
                                                           rng.integers(1, 7, ws.dimension))]
            b = [Fraction(int(x), int(y)) for x, y in zip(rng.integers(-9, 10, ws.dimension),
                                                           rng.integers(1, 7, ws.dimension))]
            lhs = ham.poisson_same_lamination(a, b, form)
            rhs = tracks.thurston_pairing(tr, ws.vector(a), ws.vector(b))
            exact_ok &= isinstance(lhs, Fraction) and lhs == rhs
        return anti, exact_ok
    (anti, ok), dt = _timed(run)
    return Check(8, "bracket antisymmetric, same-lamination bracket exact", anti < 1e-9 and ok,
                 anti, 1e-9, dt, "" if ok else "rational mismatch")


def block_inverse(seed: int = 0) -> Check:
    def run():
        rng = np.random.default_rng(seed)
        J = sym.standard_form(3)
        worst = 0.0
        for _ in range(50):
            S = rng.normal(scale=0.4, size=(6, 6))
            M = expm(J @ (S + S.T))
            _, Minv = ham.jacobian_assembly(M[:3, :3], M[:3, 3:], M[3:, :3], M[3:, 3:])
            worst = max(worst, float(np.abs(Minv - np.linalg.inv(M)).max()))
        return worst
    res, dt = _timed(run)
    return Check(9, "transposed-block inverse of symplectic matrices", res < 1e-10, res, 1e-10, dt)


def stretch_log_derivative(seed: int = 0) -> Check:
    def run():
        d, _ = example()
        form = tracks.thurston_form(d.space.track, d.space).form
        rng = np.random.default_rng(seed)
        n = d.space.dimension
        vals = []
        while len(vals) < 20:
            a = [Fraction(int(x)) for x in rng.integers(-20, 21, n)]
            s = [Fraction(int(x), int(y)) for x, y in zip(rng.integers(-20, 21, n), rng.integers(1, 9, n))]
            if ham.length_of(a, s, form) != 0:
                vals.append(ham.dlog_length_along_stretch_same(a, s, form))
        return max(abs(v - 1.0) for v in vals), all(v == 1.0 for v in vals)
    (res, exact_one), dt = _timed(run)
    return Check(10, "log-length derivative along own stretch is 1", exact_one, res, 0.0, dt)


def duality(seed: int = 0) -> Check:
    def run():
        d, _ = example()
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(20):
            w, v = rng.normal(size=(2, d.form.shape[0]))
            sv = tracks.duality_star(d.form, v)
            worst = max(worst, abs(float(w @ d.form @ sv) - float(w @ v)))
        return worst, tracks.conjugation_residual(d.form, d.B)
    (pair, conj), dt = _timed(run)
    return Check(11, "duality pairing and conjugation identity", pair < 1e-12 and conj < 1e-9,
                 max(pair, conj), 1e-12, dt, f"pairing {pair:.2e}, conjugation {conj:.2e}")


CRITERIA = {
    1: time_one_flow, 2: expansion_identity, 3: conservation, 4: stretch_line,
    5: spectrum_pairing, 6: kerckhoff_formula, 7: trace_derivative, 8: bracket_antisymmetry,
    9: block_inverse, 10: stretch_log_derivative, 11: duality,
}

SUITES = {
    "tracks": (11,),
    "pa": (5,),
    "symplectic": (2, 9),
    "hamiltonian": (1, 3, 4, 10),
    "hyperbolic": (6, 7, 8),
    "all": tuple(CRITERIA),
}


def run_suite(name: str, seed: int = 0) -> list[Check]:
    out = []
    for c in SUITES[name]:
        fn = CRITERIA[c]
        try:
            out.append(fn(seed) if "seed" in fn.__code__.co_varnames else fn())
        except Exception as exc:  # noqa: BLE001 - a crash is a failed check
            out.append(Check(c, fn.__name__, False, float("inf"), 0.0, 0.0, f"{type(exc).__name__}: {exc}"))
    return out
