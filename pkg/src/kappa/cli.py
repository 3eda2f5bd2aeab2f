"""Command line front end.

``kappa run <problem.json>`` certifies (and with ``--solve`` solves) one
problem and writes a report; ``kappa gen <path>`` writes a seeded instance
together with a ``.truth.json`` sidecar.

Exit codes: 0 certified or solved, 1 input error, 2 infeasible,
3 search failure or an unresolved numerical certificate.
"""
import argparse
import csv
import hashlib
import io
import json
import math
import sys
import warnings
from importlib import resources

import numpy as np
from jsonschema import Draft202012Validator

from . import __version__
from .circle import CircleGrid, boundary_form_disk, hankel_rank, monomial_basis, windowed_basis
from .errors import InputError, KappaError
from .forms import NudelmanData, cf_matrices, inertia, nudelman_form, pick_matrix
from .instances import KINDS, cplx, generate, uncplx
from .line import IntervalSet, dual_loewner_form, loewner_form, loewner_real_form
from .model_space import model_space_build, sarason_defect
from .rational import BlaschkeProduct, RationalFunction
from .solvers import (SOLVED, SearchConfig, solve_cf_kappa, solve_pick_kappa,
                      solve_sarason)

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3


def load_schema(name):
    text = resources.files("kappa").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate_problem(problem):
    """Return a list of ``"path: message"`` strings, empty when valid."""
    schema = load_schema("problem")
    errors = [f"{_path(e)}: {e.message}" for e in Draft202012Validator(schema).iter_errors(problem)]
    if errors:
        return errors
    sub = dict(schema)
    sub.pop("properties")
    sub["$ref"] = f"#/$defs/{problem['kind']}"
    v = Draft202012Validator(sub)
    return [f"{_path(e)}: {e.message}" for e in sorted(v.iter_errors(problem), key=lambda e: list(e.path))]


def _path(err):
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)


def _clean(x):
    """Recursively convert to JSON-safe plain types; non-finite floats become None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    return x


def _inertia_dict(ine):
    if ine is None:
        return None
    return {"n_neg": ine.n_neg, "n_zero": ine.n_zero, "n_pos": ine.n_pos,
            "tol": ine.tol, "spectrum": np.sort(np.asarray(ine.eigenvalues, dtype=float))}


def _rational(p):
    num = uncplx(p["num"])
    den = uncplx(p["den"]) if "den" in p else np.ones(1)
    r = RationalFunction(num, den)
    if p.get("conj", False):
        return lambda u: np.conj(r(u))
    return r


def _pair_dict(pair):
    return {"f": pair.f.to_dict(), "B": pair.B.to_dict()}


def _search_config(problem, seed):
    s = dict(problem.get("search", {}))
    if seed is not None:
        s["seed"] = seed
    return SearchConfig(tol=problem["tol"], **s)


def _line_setup(problem):
    n = problem.get("basis_size", 7)
    panels = problem.get("panels", (n + 1) * -(-64 // (n + 1)))
    if panels % (n + 1):
        raise InputError(f"panels ({panels}) must be a multiple of basis_size + 1")
    return IntervalSet(problem["intervals"], panels=panels), n


def _solve_block(rep, out):
    out["status"] = rep.status
    out["residuals"] = dict(rep.residuals)
    out["solution"] = {"attempts": [list(a) for a in rep.attempts]}
    if rep.pair is not None:
        out["solution"].update(_pair_dict(rep.pair))
    for k, v in rep.extra.items():
        out["solution"][k] = cplx(v) if np.iscomplexobj(v) else v


def _kappa_max(problem, out):
    km = problem.get("kappa_max")
    if km is not None and out["kappa"] > km:
        out["status"] = "Infeasible"
        out["message"] = f"certificate has {out['kappa']} negative squares, more than kappa_max={km}"
        return True
    return False


def _run_interior(problem, out, seed):
    kind = problem["kind"]
    tol = problem["tol"]
    if kind == "pick":
        z, w = uncplx(problem["z"]), uncplx(problem["w"])
        if z.shape != w.shape:
            raise InputError("z and w must have the same length")
        cert = inertia(pick_matrix(z, w), tol)
    elif kind == "cf":
        w = uncplx(problem["w"])
        cert = cf_matrices(w, tol).inertia
    elif kind == "sarason":
        beta = uncplx(problem["C_zeros"])
        M = model_space_build(BlaschkeProduct(tuple(beta)))
        R = uncplx(problem["R"])
        cert = sarason_defect(R, M, zero_tol=tol)
    else:
        A = uncplx(problem["A"])
        data = NudelmanData(A, uncplx(problem["b"]), uncplx(problem["c"]))
        cert = inertia(nudelman_form(data, tol=tol), tol)
        out["diagnostics"]["spectral_radius"] = data.spectral_radius
    out["kappa"] = cert.n_neg
    out["certificate"] = _inertia_dict(cert)
    out["status"] = "Certified"
    if _kappa_max(problem, out) or not problem.get("solve", False):
        return
    cfg = _search_config(problem, seed)
    if kind == "pick":
        rep = solve_pick_kappa(z, w, cfg)
    elif kind == "cf":
        rep = solve_cf_kappa(w, cfg)
    elif kind == "sarason":
        rep = solve_sarason(M, R, cfg)
    else:
        if np.linalg.norm(A - np.diag(np.diag(A))) > 0 or np.any(data.c == 0):
            raise InputError("solve on nudelman data needs diagonal A and nonzero c")
        rep = solve_pick_kappa(np.diag(A), data.b / data.c, cfg)
    _solve_block(rep, out)


def _run_boundary(problem, out, grid_n, trunc):
    kind = problem["kind"]
    tol = problem["tol"]
    if kind == "boundary-disk":
        res = []
        for N in (grid_n, 2 * grid_n):
            g = CircleGrid(N, problem.get("arcs"))
            m = problem.get("basis_size", 8)
            make = windowed_basis if problem.get("basis") == "windowed" else monomial_basis
            J = min(trunc, N // 4)
            res.append(boundary_form_disk(g, _rational(problem["b"]), _rational(problem["c"]),
                                          basis=make(g, m - 1), J=J, tol=tol))
        cert, fine = res[0].inertia, res[1].inertia
        out["diagnostics"].update({"J": res[0].J, "tail": res[0].tail,
                                   "truncation_error": res[0].truncation_error,
                                   "sup_ratio": res[0].sup_ratio,
                                   "inertia_by_grid": {str(grid_n): cert.as_tuple(),
                                                       str(2 * grid_n): fine.as_tuple()}})
    elif kind == "hankel":
        S = _rational(problem["S"])
        g = CircleGrid(grid_n)
        m = problem.get("m", 8)
        hr = hankel_rank(g.sample(S), m, problem.get("gap_tol", 1e-8))
        out["kappa"] = hr.rank
        out["certificate"] = None
        out["status"] = "Certified"
        out["diagnostics"].update({"rank": hr.rank, "singular_values": hr.singular_values,
                                   "gap_ratio": hr.gap_ratio, "sup_modulus": hr.sup_modulus})
        return
    else:
        iset, n = _line_setup(problem)
        fn = _rational(problem["g0" if kind == "dual-loewner" else "f0"])
        form = {"loewner": loewner_form, "loewner-real": loewner_real_form,
                "dual-loewner": dual_loewner_form}[kind]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = form(fn, iset, basis=n, tol=tol)
        cert, fine = r.inertia, r.inertia_refined
        out["diagnostics"]["inertia_by_panels"] = {str(iset.panels): cert.as_tuple(),
                                                   str(2 * iset.panels): fine.as_tuple()}
    if cert.n_neg != fine.n_neg:
        out["status"] = "TruncationUnstable"
    else:
        out["status"] = "Certified"
    out["kappa"] = cert.n_neg
    out["certificate"] = _inertia_dict(cert)
    out["refined"] = _inertia_dict(fine)


def run_problem(problem, raw, tol=1e-9, grid=4096, trunc=256, seed=None, solve=False):
    """Process one parsed problem; returns ``(report dict, exit code)``."""
    out = {"schema_version": SCHEMA_VERSION,
           "tool": {"name": "kappa", "version": __version__},
           "input_digest": "sha256:" + hashlib.sha256(raw).hexdigest(),
           "kind": problem.get("kind") if isinstance(problem, dict) else None,
           "status": "Certified", "kappa": None, "certificate": None,
           "diagnostics": {}}
    errors = validate_problem(problem) if isinstance(problem, dict) else ["$: problem must be an object"]
    if errors:
        raise InputError("; ".join(errors))
    problem = dict(problem)
    problem.setdefault("tol", tol)
    if solve:
        problem["solve"] = True
    grid_n = problem.get("grid", grid)
    trunc_j = problem.get("trunc", trunc)
    out["settings"] = {"tol": problem["tol"], "grid": grid_n, "trunc": trunc_j,
                       "seed": seed, "solve": bool(problem.get("solve", False))}
    try:
        if problem["kind"] in ("pick", "cf", "sarason", "nudelman"):
            _run_interior(problem, out, seed)
        else:
            _run_boundary(problem, out, grid_n, trunc_j)
    except InputError:
        raise
    except KappaError as exc:
        out["status"] = type(exc).__name__
        out["message"] = str(exc)
    code = {"Certified": EXIT_OK, SOLVED: EXIT_OK, "Infeasible": EXIT_INFEASIBLE}.get(
        out["status"], EXIT_NUMERIC)
    return _clean(out), code


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def to_csv(report):
    """Flat ``field,value`` rows; spectra as ``spectrum,index,value`` rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "index", "value"])
    for key in ("kind", "status", "kappa", "input_digest"):
        w.writerow([key, "", report.get(key)])
    cert = report.get("certificate")
    if cert:
        for key in ("n_neg", "n_zero", "n_pos", "tol"):
            w.writerow([key, "", cert[key]])
        for i, v in enumerate(cert["spectrum"]):
            w.writerow(["spectrum", i, repr(v)])
    for key, v in sorted(report.get("residuals", {}).items()):
        w.writerow(["residual." + key, "", v])
    return buf.getvalue()


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_run(args):
    try:
        with open(args.path, "rb") as fh:
            raw = fh.read()
        problem = json.loads(raw)
    except (OSError, ValueError) as exc:
        print(f"kappa: cannot read problem: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report, code = run_problem(problem, raw, tol=args.tol, grid=args.grid,
                                   trunc=args.trunc, seed=args.seed, solve=args.solve)
    except (InputError, TypeError, ValueError) as exc:
        print(f"kappa: invalid problem: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(to_csv(report) if args.format == "csv" else dumps(report), args.out)
    return code


def cmd_gen(args):
    try:
        problem, truth = generate(args.kind, seed=args.seed or 0, kappa=args.kappa, size=args.size)
    except InputError as exc:
        print(f"kappa: {exc}", file=sys.stderr)
        return EXIT_INPUT
    problem["schema_version"] = SCHEMA_VERSION
    _write(dumps(_clean(problem)), args.path)
    base = args.path[:-5] if args.path.endswith(".json") else args.path
    _write(dumps(_clean(truth)), base + ".truth.json")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="kappa", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"kappa {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="certify or solve one problem file")
    r.add_argument("path")
    r.add_argument("--tol", type=float, default=1e-9, help="relative eigenvalue zero level")
    r.add_argument("--grid", type=int, default=4096, help="circle grid size")
    r.add_argument("--trunc", type=int, default=256, help="coefficient truncation J")
    r.add_argument("--seed", type=int, default=None, help="search seed")
    r.add_argument("--solve", action="store_true", help="also construct a solution")
    r.add_argument("--out", default=None, help="report path (default stdout)")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.set_defaults(func=cmd_run)
    g = sub.add_parser("gen", help="write a seeded instance and its ground truth")
    g.add_argument("path")
    g.add_argument("--kind", choices=KINDS, default="pick")
    g.add_argument("--kappa", type=int, default=1)
    g.add_argument("--size", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
