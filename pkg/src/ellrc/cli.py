"""Command-line entry point (``ellrc``).

Exit codes: 0 ok, 2 usage, 3 curve search failure, 4 construction failure,
5 verification failure.  Errors are printed to stderr as one JSON object.
Set ELLRC_THREADS to cap the BLAS thread pools.
"""

from __future__ import annotations

import os

if os.environ.get("ELLRC_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, os.environ["ELLRC_THREADS"])

import argparse
import csv
import io
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import lrc, workflow
from .curve import search_curve
from .exceptions import EllrcError, InvalidParameters, SearchFailed, VerificationFailed
from .serialize import SCHEMA_VERSION, digest, dumps, load_config, read_json, with_schema, write_json

EXIT_OK, EXIT_USAGE, EXIT_SEARCH, EXIT_CONSTRUCTION, EXIT_VERIFY = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj, out=None):
    if out:
        write_json(out, obj)
    else:
        sys.stdout.write(dumps(with_schema(obj)))


def _load_code(args):
    path = args.code or (Path(args.dir) / "code.json" if args.dir else None)
    if path is None:
        raise UsageError("give --code or --dir")
    return lrc.LinearCode.from_dict(read_json(path))


def _load_structure(args):
    path = args.structure or (Path(args.dir) / "structure.json" if args.dir else None)
    if path is None:
        raise UsageError("give --structure or --dir")
    return lrc.RecoveryStructure.from_dict(read_json(path))


def cmd_search_curve(args):
    if args.m < 3 or args.m % 2 == 0:
        raise InvalidParameters("--m must be an odd integer >= 3")
    res = search_curve(p_range=(args.p_min, args.q_max), m=args.m, seed=args.seed,
                       min_points=args.min_points, q_max=args.q_max)
    _emit(workflow.search_artifact(res), args.out)


def cmd_build(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    res = workflow.build_from_config(cfg)
    out = Path(args.out_dir)
    write_json(out / "config.json", {"config": cfg, "config_digest": digest(cfg)})
    write_json(out / "code.json", res.code.to_dict())
    write_json(out / "structure.json", res.structure.to_dict())
    write_json(out / "certificates.json", res.certificates())
    report = res.report().to_dict()
    write_json(out / "report.json", report)
    sys.stdout.write(dumps({"out_dir": str(out), "n": res.code.n, "k": res.code.k,
                            "d_floor": report["distance"]["claimed_floor"]}))


def cmd_verify(args):
    code, rs = _load_code(args), _load_structure(args)
    report = workflow.verify(code, rs, trials=args.trials, seed=args.seed, exact_limit=args.exact_limit,
                             samples=args.samples, max_coords=args.max_coords)
    _emit(report, args.out)


def _parse_model(text, p):
    m = re.fullmatch(r"random\(([0-9.eE+-]+)\)", text)
    if m:
        return "random", float(m.group(1))
    if text not in workflow.ERASURE_MODELS:
        raise UsageError(f"unknown erasure model {text!r}")
    return text, p


def cmd_repair_sim(args):
    model, p = _parse_model(args.model, args.p)
    code, rs = _load_code(args), _load_structure(args)
    _emit(workflow.repair_sim(code, rs, model, trials=args.trials, seed=args.seed, p=p), args.out)


def cmd_bounds(args):
    vals = {k: getattr(args, k) for k in ("r", "rho", "t", "k1", "d1", "k2", "d2")}
    out = lrc.singleton_bounds(args.n, args.k, **vals)
    _emit({"n": args.n, "k": args.k, **{k: v for k, v in vals.items() if v is not None}, "bounds": out}, args.out)


def cmd_distance(args):
    code = _load_code(args)
    floor = args.floor if args.floor is not None else code.metadata.get("claimed", {}).get("d_floor")
    res = lrc.min_distance(code, args.mode, limit=args.limit, trials=args.trials, seed=args.seed, floor=floor)
    _emit({"n": code.n, "k": code.k, "q": code.field.q, **res}, args.out)


def cmd_export_matrix(args):
    code = _load_code(args)
    if args.format == "json":
        text = dumps({"schema_version": SCHEMA_VERSION, "field": code.field.to_dict(), "k": code.k, "n": code.n,
                      "rows": code.generator.tolist()})
    else:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(code.generator.tolist())
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _artifact_args(p, structure=True):
    p.add_argument("--dir", help="build output directory")
    p.add_argument("--code", help="code.json path")
    if structure:
        p.add_argument("--structure", help="structure.json path")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ellrc", description="Elliptic-curve locally recoverable codes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search-curve", help="find a curve with rational m-torsion")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q-max", type=int, default=workflow.DEFAULT_Q_MAX)
    p.add_argument("--p-min", type=int, default=5)
    p.add_argument("--min-points", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_search_curve)

    p = sub.add_parser("build", help="build a code from a YAML/JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="recovery, distance and bound checks")
    _artifact_args(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-limit", type=int, default=lrc.DEFAULT_EXACT_LIMIT)
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--max-coords", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("repair-sim", help="simulate staged repair under an erasure model")
    _artifact_args(p)
    p.add_argument("--model", default="single", help="single | per-lower-set-burst | per-middle-set-burst | random(p)")
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_repair_sim)

    p = sub.add_parser("bounds", help="Singleton-type upper bounds on d")
    for name in ("n", "k"):
        p.add_argument(f"--{name}", type=int, required=True)
    for name in ("r", "rho", "t", "k1", "d1", "k2", "d2"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("distance", help="exact or sampled minimum distance")
    _artifact_args(p, structure=False)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--limit", type=int, default=lrc.DEFAULT_EXACT_LIMIT)
    p.add_argument("--trials", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--floor", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("export-matrix", help="write the generator matrix")
    _artifact_args(p, structure=False)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_matrix)
    return parser


def _fail(code: int, kind: str, message: str, details=None) -> int:
    payload = {"error": kind, "message": message, "exit_code": code}
    if details:
        payload.update(details)
    sys.stderr.write(json.dumps(payload, sort_keys=True, default=lambda o: np.asarray(o).tolist()) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "UsageError", str(exc))
    except InvalidParameters as exc:
        return _fail(EXIT_USAGE, type(exc).__name__, str(exc), exc.details())
    except SearchFailed as exc:
        return _fail(EXIT_SEARCH, type(exc).__name__, str(exc), exc.details())
    except VerificationFailed as exc:
        return _fail(EXIT_VERIFY, type(exc).__name__, str(exc), exc.details())
    except EllrcError as exc:
        return _fail(EXIT_CONSTRUCTION, type(exc).__name__, str(exc), exc.details())
    except (OSError, ValueError, KeyError) as exc:
        return _fail(EXIT_USAGE, type(exc).__name__, str(exc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
