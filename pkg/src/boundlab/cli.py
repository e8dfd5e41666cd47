"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 numerical-validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import criteria, io, protocols, survey, witnesses, zoo
from .bell import BellBasis, SimplexState
from .errors import InputError, ValidationError
from .linalg import DenseState, HermitianOperator

EXIT_OK, EXIT_INPUT, EXIT_VALIDATION = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("usage", message)
        sys.exit(EXIT_INPUT)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}) + "\n")


def parse_params(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise InputError(f"bad parameter {item!r}; use k=v,k=v")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise InputError(f"parameter {k!r} is not a number") from None
    return out


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("BOUNDLAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError("BOUNDLAB_SEED must be an integer") from None
    return 0


def _load_state(name: str | None, params: str | None, path: str | None):
    if (name is None) == (path is None):
        raise InputError("give exactly one of --state or --input")
    if path is not None:
        return io.read_state(path)
    return zoo.build(name, **parse_params(params))


def _dense(state) -> DenseState:
    return state.to_dense() if isinstance(state, SimplexState) else state


def _range(text: str) -> np.ndarray:
    try:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    except ValueError:
        raise InputError(f"range {text!r} must look like start:stop:count") from None


# ---------------------------------------------------------------- commands

def cmd_classify(args) -> tuple[dict, list[dict]]:
    state = _load_state(args.state, args.param, args.input)
    if isinstance(state, SimplexState):
        v = criteria.classify(state.to_dense(), state, heuristics=args.heuristics)
    else:
        cut = zoo.CONVERSION_CUT if len(state.dims) == 4 else None
        v = criteria.classify(state, heuristics=args.heuristics, cut=cut)
    rows = [{"class": v.label, **o.as_dict()} for o in v.evidence]
    return {"verdict": v.as_dict()}, rows


def _mub_set(args) -> witnesses.MUBSet:
    if args.set:
        return witnesses.bundled_mub_set(args.set, args.m)
    return witnesses.build_mub_set(args.d, args.m if args.m is not None else args.d + 1)


def _eval_target(args):
    if args.eval is None and args.eval_input is None:
        return None
    return _dense(_load_state(args.eval, args.eval_param, args.eval_input))


def cmd_witness(args) -> tuple[dict, list[dict]]:
    kind = args.kind
    target = _eval_target(args)
    res: dict = {}
    rows: list[dict] = []
    if kind == "mub":
        mubs = _mub_set(args)
        W = witnesses.mub_witness(mubs, args.s, args.transposed)
        res["witness"] = io.witness_to_json(W)
        if target is not None:
            terms = witnesses.correlation_terms(target, mubs, args.s, conjugate=args.transposed)
            bound = (mubs.d + mubs.m - 1) / mubs.d
            res["evaluation"] = {"witness_value": W.value(target), "correlations": terms.tolist(),
                                 "correlation_sum": float(terms.sum()), "separable_max": bound,
                                 "detected": bool(W.value(target) < -criteria.FIRE_TOL)}
            rows = [{"term": f"C{k}", "value": float(t)} for k, t in enumerate(terms)]
            rows += [{"term": "sum", "value": float(terms.sum())}, {"term": "witness", "value": W.value(target)}]
    elif kind == "sic":
        sic = witnesses.sic_set(args.d)
        subset = list(range(args.m)) if args.m else None
        K = witnesses.sic_operator(sic, subset)
        res["operator"] = io.dense_to_json(HermitianOperator((args.d, args.d), K), "operator")
        if target is not None:
            val = witnesses.sic_correlation_value(target, sic, subset)
            res["evaluation"] = {"correlation": val}
            rows = [{"term": "sic_correlation", "value": val}]
    elif kind in ("window", "mirror"):
        if args.source == "sic":
            sic = witnesses.sic_set(args.d)
            subset = list(range(args.m)) if args.m else None
            K = witnesses.sic_operator(sic, subset)
            W = None
        else:
            mubs = _mub_set(args)
            K = witnesses.mub_operator(mubs, args.s, args.transposed)
            W = witnesses.mub_witness(mubs, args.s, args.transposed) if kind == "mirror" else None
        d = int(round(np.sqrt(K.shape[0])))
        if kind == "window":
            win = witnesses.separability_window(K, (d, d), args.restarts, args.iterations, seed=_seed(args))
            res["window"] = win.as_dict()
            rows = [win.as_dict()]
            if target is not None:
                val = float(np.real(np.trace(K @ target.entries)))
                res["evaluation"] = {"value": val, "outside_window": bool(val < win.L - 1e-9 or val > win.U + 1e-9)}
        else:
            if W is None:
                raise InputError("mirror needs a MUB witness (use --source mub)")
            win = witnesses.separability_window(W.operator, restarts=args.restarts,
                                                iterations=args.iterations, seed=_seed(args))
            M = witnesses.mirror_witness(W, win)
            res["window"] = win.as_dict()
            res["mirror"] = io.witness_to_json(M)
            rows = [{"mu": M.params["mu"], "lambda_max": M.params["lambda_max"], "is_witness": M.is_witness}]
            if target is not None:
                res["evaluation"] = {"value": M.value(target), "detected": bool(M.value(target) < -criteria.FIRE_TOL)}
    elif kind == "bell":
        W = witnesses.bell_violation_witness()
        res["witness"] = io.witness_to_json(W)
        if target is None:
            target = zoo.rho_bound()
        val = W.value(target)
        res["evaluation"] = {"value": val, "violation": bool(val < 0)}
        rows = [{"term": "bell", "value": val}]
    return res, rows


def cmd_survey(args) -> tuple[dict, list[dict]]:
    basis = BellBasis.random(args.d, args.basis_seed) if args.basis_seed is not None else None
    chain = tuple(args.chain.split(",")) if args.chain else criteria.SIMPLEX_CHAIN
    cfg = survey.SurveyConfig(args.d, args.n, _seed(args), basis, chain, args.threads)
    r = survey.run_survey(cfg)
    return r.as_dict(), r.rows()


def cmd_scan(args) -> tuple[dict, list[dict]]:
    basis = BellBasis.random(3, args.basis_seed) if args.basis_seed is not None else None
    chain = tuple(args.chain.split(",")) if args.chain else criteria.SIMPLEX_CHAIN
    r = survey.slice_scan(args.family, _range(args.x), _range(args.y), basis, chain, args.gamma)
    rows = r.rows()
    counts = {k: r.count(k) for k in (*criteria.CLASSES, survey.OUT_OF_SIMPLEX)}
    return {"family": r.family, "counts": counts, "grid": rows}, rows


def cmd_activate(args) -> tuple[dict, list[dict]]:
    tr = protocols.run_activation(args.f0, args.alpha, args.rounds, args.variant, cross_check=args.check)
    rows = [{"round": 0, "F": tr.F0, "P": 1.0, "cumulative_P": 1.0}]
    rows += [{"round": r.round, "F": r.F, "P": r.P, "cumulative_P": r.cumulative} for r in tr.rounds]
    res = {"F0": tr.F0, "alpha": tr.alpha, "variant": tr.variant, "boosting": tr.boosting, "trace": rows}
    if tr.max_check_error is not None:
        res["max_check_error"] = tr.max_check_error
        if tr.max_check_error > 1e-10:
            raise ValidationError(f"simulator and closed form disagree by {tr.max_check_error:.3g}")
    return res, rows


def cmd_state(args) -> tuple[dict, list[dict]]:
    if args.action == "get":
        params = parse_params(args.param)
        state = zoo.build(args.name, **params)
        res = {"name": args.name, "params": params, "state": io.state_to_json(state)}
        checks = {}
        if args.name == "conversion_assist":
            o = criteria.ppt_check(state, zoo.CONVERSION_CUT)
            checks["ppt_cut_A1A2|B1B2"] = o.as_dict()
            if o.fired:
                raise ValidationError("conversion_assist state is not PPT across the cut")
        res["checks"] = checks
        dense = _dense(state)
        rows = [{"row": i, "col": j, "re": float(dense.entries[i, j].real), "im": float(dense.entries[i, j].imag)}
                for i in range(dense.dim) for j in range(dense.dim)]
        return res, rows
    state = io.read_state(args.path)
    dense = _dense(state)
    res = {"valid": True, "kind": "simplex" if isinstance(state, SimplexState) else "dense",
           "dims": list(dense.dims), "trace": float(np.trace(dense.entries).real),
           "min_eigenvalue": float(np.linalg.eigvalsh(dense.entries)[0])}
    return res, [res]


def cmd_choi(args) -> tuple[dict, list[dict]]:
    if args.channel == "identity":
        E = protocols.identity_channel(args.d)
    elif args.channel == "depolarizing":
        E = protocols.depolarizing_channel(args.d, args.p)
    else:
        E = protocols.transpose_map(args.d)
    J = protocols.choi_matrix(E)
    lam = float(np.linalg.eigvalsh(J)[0])
    res = {"channel": E.name, "d": args.d, "choi": io.dense_to_json(HermitianOperator((args.d, args.d), J), "operator"),
           "min_eigenvalue": lam, "completely_positive": lam >= -1e-10}
    if lam >= -1e-10:
        res["state"] = io.dense_to_json(protocols.choi_state(E))
    return res, [{"channel": E.name, "min_eigenvalue": lam, "completely_positive": lam >= -1e-10}]


def cmd_qfi(args) -> tuple[dict, list[dict]]:
    rho = _dense(_load_state(args.state, args.param, args.input))
    if args.hamiltonian == "local":
        H = protocols.local_generator(rho.dims)
    else:
        H = io.read_state(args.hamiltonian)
        if not isinstance(H, HermitianOperator):
            raise InputError("hamiltonian file must hold an operator")
    f = protocols.qfi(rho, H)
    ub = protocols.qfi_upper_bound(rho, H)
    res = {"qfi": f, "upper_bound": ub}
    if args.threshold is not None:
        res["threshold"] = args.threshold
        res["exceeds_threshold"] = bool(f > args.threshold)
    return res, [res]


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="seed (fallback: $BOUNDLAB_SEED, then 0)")
    common.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")

    p = _Parser(prog="boundlab", description="Qudit entanglement analysis toolkit.")
    p.add_argument("--version", action="version", version=f"boundlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def state_args(sp, prefix=""):
        sp.add_argument(f"--{prefix}state", default=None, help="catalog state name")
        sp.add_argument(f"--{prefix}param", default=None, help="k=v,k=v")
        sp.add_argument(f"--{prefix}input", default=None, help="state JSON file")

    c = sub.add_parser("classify", parents=[common], help="classify a state")
    state_args(c)
    c.add_argument("--heuristics", action="store_true", help="add the see-saw range criterion")
    c.set_defaults(func=cmd_classify)

    w = sub.add_parser("witness", parents=[common], help="build and evaluate witnesses")
    w.add_argument("kind", choices=("mub", "sic", "window", "mirror", "bell"))
    w.add_argument("--d", type=int, default=3)
    w.add_argument("--m", type=int, default=None, help="bases (MUB, default d+1) or SIC members (default all)")
    w.add_argument("--s", type=int, default=0)
    w.add_argument("--transposed", action="store_true")
    w.add_argument("--set", default=None, help=f"bundled MUB set: {', '.join(witnesses.BUNDLED_MUB_SETS)}")
    w.add_argument("--source", choices=("mub", "sic"), default="mub", help="operator for window/mirror")
    w.add_argument("--restarts", type=int, default=200)
    w.add_argument("--iterations", type=int, default=500)
    w.add_argument("--eval", default=None, help="catalog state to evaluate")
    w.add_argument("--eval-param", default=None)
    w.add_argument("--eval-input", default=None)
    w.set_defaults(func=cmd_witness)

    s = sub.add_parser("survey", parents=[common], help="Monte Carlo class frequencies")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--n", type=int, default=10000)
    s.add_argument("--chain", default=None, help="comma list from ppt,realignment,quasi_pure,kernel,reduction,esic")
    s.add_argument("--basis-seed", type=int, default=None, help="random generalized Bell basis")
    s.add_argument("--threads", type=int, default=None)
    s.set_defaults(func=cmd_survey)

    sc = sub.add_parser("scan", parents=[common], help="classify a 2-D slice grid")
    sc.add_argument("--family", default="B1", help="A, B1, B2, or B with --gamma")
    sc.add_argument("--gamma", type=float, default=None)
    sc.add_argument("--x", default="-1:1:21", help="alpha range start:stop:count")
    sc.add_argument("--y", default="-2.5:1:21", help="beta range start:stop:count")
    sc.add_argument("--chain", default=None)
    sc.add_argument("--basis-seed", type=int, default=None)
    sc.set_defaults(func=cmd_scan)

    a = sub.add_parser("activate", parents=[common], help="iterate the activation protocol")
    a.add_argument("--f0", type=float, required=True)
    a.add_argument("--alpha", type=float, required=True)
    a.add_argument("--rounds", type=int, default=10)
    a.add_argument("--variant", choices=("standard", "tilde"), default="standard")
    a.add_argument("--check", action="store_true", help="cross-check each round with the simulator")
    a.set_defaults(func=cmd_activate, default_format="csv")

    st = sub.add_parser("state", parents=[common], help="catalog access and validation")
    st.add_argument("action", choices=("get", "validate"))
    st.add_argument("name", nargs="?", default=None, help="catalog name (get) or file path (validate)")
    st.add_argument("--param", default=None)
    st.set_defaults(func=cmd_state)

    ch = sub.add_parser("choi", parents=[common], help="Choi matrix of a channel")
    ch.add_argument("--channel", choices=("identity", "depolarizing", "transpose"), default="identity")
    ch.add_argument("--d", type=int, default=2)
    ch.add_argument("--p", type=float, default=1.0)
    ch.set_defaults(func=cmd_choi)

    q = sub.add_parser("qfi", parents=[common], help="quantum Fisher information")
    state_args(q)
    q.add_argument("--hamiltonian", default="local", help="'local' or operator JSON file")
    q.add_argument("--threshold", type=float, default=None, help="caller-supplied separable bound")
    q.set_defaults(func=cmd_qfi)
    return p


def _request(args) -> dict:
    skip = {"func", "out", "format", "timing", "default_format", "command", "path"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _render(report: dict, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return io.dumps(report) + "\n"
    buf = _io.StringIO()
    if rows:
        keys = list(rows[0].keys())
        for r in rows[1:]:
            keys += [k for k in r if k not in keys]
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(keys)
        for r in rows:
            wr.writerow([io.fmt_csv(r.get(k, "")) for k in keys])
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "state":
        if args.name is None:
            _emit_error("usage", "state needs a name (get) or path (validate)")
            return EXIT_INPUT
        args.path = args.name
    fmt = args.format or getattr(args, "default_format", "json")
    t0 = time.perf_counter()
    try:
        result, rows = args.func(args)
    except InputError as exc:
        _emit_error("input", str(exc))
        return EXIT_INPUT
    except ValidationError as exc:
        _emit_error("validation", str(exc))
        return EXIT_VALIDATION
    report = {"command": args.command, "request": _request(args), "result": result, "version": __version__}
    if args.timing:
        report["wall_time"] = time.perf_counter() - t0
    text = _render(report, rows, fmt)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
