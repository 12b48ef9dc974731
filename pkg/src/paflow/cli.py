"""Command-line front end.

Every command prints a JSON report.  Exit codes: 0 success, 2 input error,
3 failed mathematical check.  PAFLOW_TOL overrides the default tolerance.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, hamiltonian as ham, hyperbolic as hyp, pa, symplectic as sym, tracks
from .errors import InputError, PaflowError

DEFAULT_TOL = 1e-8


class Report:
    def __init__(self, command: str):
        self.command = command
        self.inputs: dict[str, str] = {}
        self.results: dict = {}
        self.checks: list[dict] = []
        self.error: dict | None = None
        self._t0 = time.perf_counter()

    def add_input(self, path) -> None:
        try:
            self.inputs[str(path)] = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc

    def check(self, name: str, residual: float, threshold: float, passed: bool | None = None) -> bool:
        ok = bool(residual <= threshold) if passed is None else bool(passed)
        self.checks.append({"name": name, "passed": ok, "residual": _jsonable(residual),
                            "threshold": threshold})
        return ok

    @property
    def ok(self) -> bool:
        return self.error is None and all(c["passed"] for c in self.checks)

    def to_dict(self, timing: bool = True) -> dict:
        d = {"schema": "report/1", "command": self.command, "inputs": self.inputs,
             "results": _jsonable(self.results), "checks": self.checks,
             "wall_time": round(time.perf_counter() - self._t0, 6) if timing else None}
        if self.error:
            d["error"] = self.error
        return d


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _tolerance(args) -> float:
    if getattr(args, "tolerance", None) is not None:
        return args.tolerance
    env = os.environ.get("PAFLOW_TOL")
    if env:
        try:
            return float(env)
        except ValueError as exc:
            raise InputError(f"PAFLOW_TOL={env!r} is not a number") from exc
    return DEFAULT_TOL


# ------------------------------------------------------------------ commands

def cmd_track_validate(args, rep: Report) -> None:
    rep.add_input(args.track)
    t = tracks.load_track(args.track)
    v = tracks.validate_track(t)
    rep.results = {"valid": v.ok, "problem": v.problem}
    rep.check("track structure", 0.0 if v.ok else 1.0, 0.0, v.ok)


def cmd_track_info(args, rep: Report) -> None:
    rep.add_input(args.track)
    t = tracks.load_track(args.track)
    ws = tracks.weight_space(t)
    sp = tracks.thurston_form(t, ws)
    rep.results = {"genus": t.genus, "branches": t.n_branches, "switches": len(t.switches),
                   "face_cusps": tracks.face_cusps(t), "ribbon_genus": tracks.ribbon_genus(t),
                   "maximal": tracks.is_maximal(t), "dimension": ws.dimension,
                   "degenerate_form": sp.degenerate}


def _analyze(args, rep: Report, tol: float):
    rep.add_input(args.track)
    rep.add_input(args.incidence)
    d = pa.analyze_files(args.track, args.incidence, tol=1e-9)
    p = ham.build_potential(d)
    return d, p


def _pa_checks(d, p, rep: Report, tol: float, seed: int) -> None:
    rng = np.random.default_rng(seed)
    rep.check("reciprocal spectrum", pa.reciprocal_residual(d.spectrum), tol)
    rep.check("B symplectic", sym.symplectic_residual(d.B, d.form), tol * max(1.0, np.abs(d.B).max() ** 2))
    rep.check("X infinitesimally symplectic", sym.infinitesimal_residual(p.X, d.form),
              tol * max(1.0, np.abs(p.X).max()))
    pts = [rng.normal(size=d.B.shape[0]) for _ in range(100)]
    rep.check("potential expansion", max(abs(p(s) - p.quadratic_form_value(s)) for s in pts), tol)
    rep.check("time-one flow", float(np.abs(ham.flow_matrix(p, 1.0) - np.linalg.inv(d.B)).max()), tol)
    rep.check("duality conjugation", tracks.conjugation_residual(d.form, d.B), tol)


def cmd_pa_analyze(args, rep: Report) -> None:
    tol = _tolerance(args)
    d, p = _analyze(args, rep, tol)
    dec = sym.symplectic_eigenbasis(d.B, d.form, mu_plus=d.mu_plus)
    rep.results = {"stretch": d.stretch, "k": d.k, "spectrum": [complex(z) for z in d.spectrum],
                   "blocks": [{"kind": b.kind, "params": b.params} for b in dec.blocks],
                   "terms": [list(t) for t in p.terms]}
    _pa_checks(d, p, rep, tol, args.seed)


def cmd_potential_build(args, rep: Report) -> None:
    tol = _tolerance(args)
    d, p = _analyze(args, rep, tol)
    rep.results = {"schema": "potential/1", "terms": [list(t) for t in p.terms], "X": p.X,
                   "basis": p.basis, "omega": p.omega, "mu_plus": d.mu_plus, "B": d.B,
                   "stretch": d.stretch, "k": d.k}
    _pa_checks(d, p, rep, tol, args.seed)


def _potential_from_report(path) -> tuple[ham.Potential, np.ndarray]:
    data = _load_json(path)
    res = data.get("results", data)
    try:
        if res.get("schema") != "potential/1":
            raise InputError("expected a potential/1 report")
        p = ham.Potential(tuple((float(c), int(i), int(j)) for c, i, j in res["terms"]),
                              np.array(res["X"], dtype=float), np.array(res["basis"], dtype=float),
                              np.array(res["omega"], dtype=float), np.array(res["mu_plus"], dtype=float))
        return p, np.array(res["B"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed potential report: {exc}") from exc


def _load_point(path) -> np.ndarray:
    data = _load_json(path)
    v = data.get("sigma") if isinstance(data, dict) else data
    try:
        return np.array(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed point: {exc}") from exc


def cmd_flow_run(args, rep: Report) -> None:
    tol = _tolerance(args)
    rep.add_input(args.potential)
    rep.add_input(args.sigma)
    p, B = _potential_from_report(args.potential)
    s0 = _load_point(args.sigma)
    if s0.shape != (B.shape[0],):
        raise InputError("point dimension does not match the potential")
    ts = [0.0] if args.t == 0 else list(np.linspace(0.0, args.t, args.steps + 1))
    pts, left = ham.trajectory(p, s0, ts, inverse=args.inverse)
    F0 = p(s0)
    rep.results = {"F": F0, "t": ts, "trajectory": [q.sigma for q in pts],
                   "witness": [q.witness for q in pts], "left_cone": left}
    rep.check("conservation", max(abs(p(q.sigma) - F0) for q in pts), tol * max(1.0, abs(F0)))
    rep.check("symplecticity", max(float(np.abs(E.T @ p.omega @ E - p.omega).max())
                                   for E in (ham.flow_matrix(p, t, args.inverse) for t in ts)), tol)
    target = B if args.inverse else np.linalg.inv(B)
    rep.check("time-one", float(np.abs(ham.flow(p, s0, 1.0, args.inverse).sigma - target @ s0).max()), tol)


def cmd_bracket_eval(args, rep: Report) -> None:
    rep.add_input(args.input)
    d = _load_json(args.input)
    try:
        val = ham.pa_bracket_evaluate(d["log_lambda"], d["l_alpha"], d["l_beta"], d["l_A"], d["l_B"],
                                      d["cos_beta_B"], d["cos_beta_A"], d["cos_alpha_B"],
                                      d["cos_alpha_A"], d.get("log_lambda_minus"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed bracket input: {exc}") from exc
    rep.results = {"bracket": val}


def cmd_jacobian_assemble(args, rep: Report) -> None:
    rep.add_input(args.input)
    d = _load_json(args.input)
    try:
        J, Ji = ham.jacobian_assembly(d["A"], d["B"], d["C"], d["D"], tol=_tolerance(args))
    except KeyError as exc:
        raise InputError(f"missing block {exc}") from exc
    rep.results = {"J": J, "J_inv": Ji}
    rep.check("J J_inv = I", float(np.abs(J @ Ji - np.eye(len(J))).max()), 1e-9)


def cmd_cosine_check(args, rep: Report) -> None:
    rep.add_input(args.rep)
    r = hyp.load_rep(args.rep)
    cr = hyp.enumerate_crossings(r, args.gamma, args.delta, args.depth, args.weight)
    cs = float(sum(c.weight * c.cosine for c in cr.crossings))
    fd = hyp.dlength_dtwist(r, args.gamma, args.delta, args.weight, args.depth)
    rel = abs(fd.value - cs) / max(1.0, abs(cs))
    rep.results = {"cosine_sum": cs, "dlength_dtwist": fd.value, "fd_error": fd.error,
                   "saturated": cr.saturated, "length": cr.length,
                   "crossings": [{"word": c.word, "position": c.position, "cosine": c.cosine,
                                  "weight": c.weight} for c in cr.crossings]}
    rep.check("relator", r.relator_residual(), 1e-9)
    rep.check("cosine formula", rel, 1e-5)


def cmd_twist_derivative(args, rep: Report) -> None:
    rep.add_input(args.rep)
    r = hyp.load_rep(args.rep)
    fd = hyp.dlength_dtwist(r, args.gamma, args.delta, args.weight, args.depth)
    rep.results = {"dlength_dtwist": fd.value, "error": fd.error}


def cmd_accept(args, rep: Report) -> None:
    checks = acceptance.run_suite(args.suite, args.seed)
    rep.results = {"suite": args.suite, "seed": args.seed}
    for c in checks:
        rep.check(f"criterion {c.criterion}: {c.name}", c.residual, c.threshold, c.passed)
        print(c.line(), file=sys.stderr)


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="paflow")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--depth", type=int, default=8)
    common.add_argument("--json-out", type=Path, default=None)
    common.add_argument("--no-timing", action="store_true", help="omit wall time from the report")
    sub = ap.add_subparsers(dest="group", required=True)

    def leaf(parent, name, fn):
        p = parent.add_parser(name, parents=[common])
        p.set_defaults(fn=fn, command=name)
        return p

    tr = sub.add_parser("track").add_subparsers(dest="action", required=True)
    leaf(tr, "validate", cmd_track_validate).add_argument("track")
    leaf(tr, "info", cmd_track_info).add_argument("track")

    for group, action, fn in (("pa", "analyze", cmd_pa_analyze), ("potential", "build", cmd_potential_build)):
        p = leaf(sub.add_parser(group).add_subparsers(dest="action", required=True), action, fn)
        p.add_argument("--track", required=True)
        p.add_argument("--incidence", required=True)

    p = leaf(sub.add_parser("flow").add_subparsers(dest="action", required=True), "run", cmd_flow_run)
    p.add_argument("--potential", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--inverse", action="store_true")

    p = leaf(sub.add_parser("bracket").add_subparsers(dest="action", required=True), "eval", cmd_bracket_eval)
    p.add_argument("--input", required=True)
    p = leaf(sub.add_parser("jacobian").add_subparsers(dest="action", required=True), "assemble",
             cmd_jacobian_assemble)
    p.add_argument("--input", required=True)

    for group, action, fn in (("cosine", "check", cmd_cosine_check), ("twist", "derivative", cmd_twist_derivative)):
        p = leaf(sub.add_parser(group).add_subparsers(dest="action", required=True), action, fn)
        p.add_argument("--rep", required=True)
        p.add_argument("--gamma", required=True)
        p.add_argument("--delta", required=True)
        p.add_argument("--weight", type=float, default=1.0)

    p = sub.add_parser("accept", parents=[common])
    p.set_defaults(fn=cmd_accept, command="accept", action=None)
    p.add_argument("suite", choices=sorted(acceptance.SUITES))
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = " ".join(x for x in (args.group, args.action) if x)
    rep = Report(name)
    code = 0
    try:
        args.fn(args, rep)
        code = 0 if rep.ok else 3
    except PaflowError as exc:
        rep.error = {"type": type(exc).__name__, "message": str(exc)}
        code = exc.exit_code
    out = json.dumps(rep.to_dict(timing=not args.no_timing), sort_keys=True, indent=1)
    print(out)
    if args.json_out is not None:
        args.json_out.write_text(out + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
