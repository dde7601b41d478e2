"""Command-line front end.

Matrix arguments accept a JSON file, inline JSON ``{"n": .., "re": .., "im": ..}``
or a shorthand:

    diag:2,0,-2          diagonal (entries may be complex, e.g. 1+2i)
    e:3 | x:3            the standard e_n or x_n
    std:3,1:a,b,c        a E + b Etilde + c X for the partition (3,1)
    jordan:2@1,1@-2      diag(J_2 with eigenvalue 1, J_1 with eigenvalue -2)

Every report is JSON on stdout (or ``--output``) and embeds a run manifest.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .classify import infimum_candidates, classify_orbit
from .errors import OrbitError, TraceFreeError
from .kfun import (
    NESS_TOL,
    W_TOL,
    Z_TOL,
    critical_residual,
    curvature,
    k_functional,
    ness_residual,
)
from .linalg import TRACE_TOL, as_matrix
from .optimize import OptimizerConfig, gradient_norm, minimize_over_orbit
from .partitions import (
    as_partition,
    c_constant,
    dominance_compare,
    lambda_sequence,
    parity_class,
    partitions,
)
from .reproduce import run_reproduction_suite
from .sl2 import build_standard_triple, e_n, x_n
from .spectral import CLUSTER_TOL, RANK_ATOL, UNI_REAL_TOL, degeneration_witness, jordan_matrix, spectral_profile

OUTPUT_ENV = "ORBITNESS_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "orbitness-output"

log = logging.getLogger("orbitness")


class ParseError(OrbitError, ValueError):
    pass


def _complex(token: str) -> complex:
    t = token.strip().replace(" ", "").replace("I", "j").replace("i", "j")
    if not t:
        raise ParseError("empty number")
    try:
        return complex(t)
    except ValueError:
        raise ParseError(f"cannot parse number {token!r}") from None


def _complex_list(text: str) -> list[complex]:
    return [_complex(t) for t in text.split(",")]


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {text!r}") from None


def _from_json(obj) -> np.ndarray:
    try:
        n = int(obj["n"])
        re_ = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float) if "im" in obj else np.zeros_like(re_)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix JSON: {exc}") from None
    if re_.shape != (n, n) or im.shape != (n, n):
        raise ParseError(f"matrix JSON declares n={n} but has shapes {re_.shape}, {im.shape}")
    return re_ + 1j * im


def _shorthand(kind: str, body: str) -> np.ndarray:
    if kind == "diag":
        return np.diag(_complex_list(body))
    if kind == "e":
        return e_n(_int(body, "n"))
    if kind == "x":
        return x_n(_int(body, "n"))
    if kind == "std":
        part_text, _, coeffs = body.partition(":")
        triple = build_standard_triple(as_partition(part_text))
        a, b, c = _complex_list(coeffs) if coeffs else (1.0, 0.0, 0.0)
        return triple.element(a, b, c)
    if kind == "jordan":
        blocks = []
        for token in body.split(","):
            size, _, lam = token.partition("@")
            blocks.append((_int(size, "block size"), _complex(lam) if lam else 0.0))
        return jordan_matrix(blocks)
    raise ParseError(f"unknown shorthand {kind!r}")


def parse_matrix(spec: str, trace_tol: float = TRACE_TOL) -> np.ndarray:
    """Validated trace-free matrix from a shorthand, inline JSON or JSON file."""
    text = spec.strip()
    try:
        if text.startswith("{"):
            m = _from_json(json.loads(text))
        elif ":" in text and text.split(":", 1)[0] in ("diag", "e", "x", "std", "jordan"):
            kind, body = text.split(":", 1)
            m = _shorthand(kind, body)
        elif Path(text).is_file():
            m = _from_json(json.loads(Path(text).read_text()))
        else:
            raise ParseError(f"not a shorthand, JSON object or file: {spec!r}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, OrbitError):
            raise
        raise ParseError(str(exc)) from None
    return as_matrix(m, trace_free=True, trace_tol=trace_tol)


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"n": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def serialize_matrix(a) -> str:
    """Inline JSON accepted by :func:`parse_matrix`; floats round-trip exactly."""
    return json.dumps(matrix_to_json(a))


@dataclass(frozen=True)
class RunManifest:
    command: str
    input: dict | None
    config: dict
    version: str
    timestamp: str
    seed: int | None

    @classmethod
    def build(cls, args: argparse.Namespace, matrix=None) -> "RunManifest":
        cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
        inp = None
        if matrix is not None:
            inp = {"spec": args.matrix, "matrix": matrix_to_json(matrix)}
        return cls(args.command, inp, cfg, __version__,
                   datetime.now(timezone.utc).isoformat(timespec="seconds"),
                   getattr(args, "seed", None))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if np.isfinite(v) else str(v)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Path):
        return str(x)
    return x


def _emit(args, manifest: RunManifest, payload: dict):
    doc = _jsonable({"manifest": asdict(manifest), **payload})
    text = json.dumps(doc, indent=2)
    if getattr(args, "output", None):
        Path(args.output).write_text(text + "\n")
    else:
        print(text)


def _profile(a, args):
    return spectral_profile(a, tol=args.tol_cluster, rank_atol=args.tol_rank,
                            uni_real_tol=args.tol_uni_real)


def cmd_k(args) -> int:
    a = parse_matrix(args.matrix, args.tol_trace)
    rep = k_functional(a, z_tol=args.tol_z, w_tol=args.tol_w)
    out = rep.to_dict()
    if rep.k_value is not None:
        out["curvature"] = {c: curvature(a, c) for c in ("higgs", "sectional")}
    _emit(args, RunManifest.build(args, a), {"k": out})
    return 0


def cmd_classify(args) -> int:
    a = parse_matrix(args.matrix, args.tol_trace)
    prof = _profile(a, args)
    cls = classify_orbit(a, prof)
    cands = infimum_candidates(a, prof)
    _emit(args, RunManifest.build(args, a), {
        "classification": cls.to_dict(),
        "spectral": prof.to_dict(),
        "candidates": {"critical": [float(v) for v in cands["critical"]],
                       "z": None if cands["z"] is None else float(cands["z"]),
                       "infinity": float(cands["infinity"])},
    })
    return 0


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(max_iters=args.max_iters, grad_tol=args.grad_tol, step_init=args.step_init,
                           backtrack_factor=args.backtrack_factor, restarts=args.restarts,
                           seed=args.seed, z_floor=args.z_floor, sample_spread=args.sample_spread)


def cmd_minimize(args) -> int:
    a = parse_matrix(args.matrix, args.tol_trace)
    rep = minimize_over_orbit(a, _optimizer_config(args), workers=args.workers)
    payload = {"minimization": rep.to_dict(thin=args.thin)}
    try:
        cls = classify_orbit(a, _profile(a, args))
        payload["prediction"] = {"case": cls.case_id, "infimum": float(cls.infimum),
                                 "achieved": cls.achieved,
                                 "gap": rep.best_k - float(cls.infimum)}
    except OrbitError as exc:
        payload["prediction"] = {"error": str(exc)}
    _emit(args, RunManifest.build(args, a), payload)
    return 0


def cmd_spectral(args) -> int:
    a = parse_matrix(args.matrix, args.tol_trace)
    prof = _profile(a, args)
    wit = degeneration_witness(a, prof)
    _emit(args, RunManifest.build(args, a), {
        "spectral": prof.to_dict(),
        "witness": {"predicted_type": list(wit.predicted_type.parts),
                    "factor_blocks": [[[k, lam] for k, lam in f] for f in wit.factor_blocks],
                    "limit": matrix_to_json(wit.limit())},
    })
    return 0


def cmd_partition(args) -> int:
    if args.n is not None:
        rows = [{"partition": list(p.parts), "C": None if p.is_trivial() else str(c_constant(p)),
                 "parity": parity_class(p)} for p in partitions(args.n)]
        _emit(args, RunManifest.build(args), {"partitions": rows})
        return 0
    if args.partition is None:
        raise ParseError("give a partition or --n")
    p = as_partition(args.partition)
    out = {"partition": list(p.parts), "n": p.n, "parity": parity_class(p),
           "lambda_sequence": list(lambda_sequence(p).values)}
    if not p.is_trivial():
        c = c_constant(p)
        out.update(C=str(c), C_float=float(c))
    if args.compare:
        q = as_partition(args.compare)
        out["dominance"] = {"other": list(q.parts), "relation": dominance_compare(p, q).value}
    _emit(args, RunManifest.build(args), {"partition": out})
    return 0


def cmd_residual(args) -> int:
    a = parse_matrix(args.matrix, args.tol_trace)
    _emit(args, RunManifest.build(args, a), {"residual": {
        "critical_residual": critical_residual(a, z_tol=args.tol_z),
        "gradient_norm": gradient_norm(a),
        "ness": ness_residual(a, tol=args.tol_ness).to_dict(),
    }})
    return 0


def cmd_verify(args) -> int:
    out_dir = Path(args.out_dir or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT_DIR)
    code, summary = run_reproduction_suite(out_dir, _optimizer_config(args), samples=args.samples,
                                           workers=args.workers)
    _emit(args, RunManifest.build(args), {"verify": summary, "exit_code": code})
    for f in summary["failures"]:
        print(f"FAILED: {f}", file=sys.stderr)
    return code


def _tolerance_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("tolerances")
    g.add_argument("--tol-trace", type=float, default=TRACE_TOL, help="relative trace-free tolerance")
    g.add_argument("--tol-z", type=float, default=Z_TOL, help="denominator ratio defining Z")
    g.add_argument("--tol-w", type=float, default=W_TOL, help="commutator ratio defining W")
    g.add_argument("--tol-cluster", type=float, default=CLUSTER_TOL, help="eigenvalue cluster diameter")
    g.add_argument("--tol-rank", type=float, default=RANK_ATOL, help="rank threshold on normalized powers")
    g.add_argument("--tol-uni-real", type=float, default=UNI_REAL_TOL, help="uni-real phase tolerance")
    g.add_argument("--tol-ness", type=float, default=NESS_TOL, help="Ness equation residual tolerance")
    p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _optimizer_parent() -> argparse.ArgumentParser:
    d = OptimizerConfig()
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("optimizer")
    g.add_argument("--max-iters", type=int, default=d.max_iters)
    g.add_argument("--grad-tol", type=float, default=d.grad_tol)
    g.add_argument("--step-init", type=float, default=d.step_init)
    g.add_argument("--backtrack-factor", type=float, default=d.backtrack_factor)
    g.add_argument("--restarts", type=int, default=d.restarts)
    g.add_argument("--seed", type=int, default=d.seed)
    g.add_argument("--z-floor", type=float, default=d.z_floor)
    g.add_argument("--sample-spread", type=float, default=d.sample_spread)
    g.add_argument("--workers", type=int, default=1, help="processes for parallel restarts")
    return p


def build_parser() -> argparse.ArgumentParser:
    tol, opt = _tolerance_parent(), _optimizer_parent()
    parser = argparse.ArgumentParser(prog="orbitness", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, parents=(tol,), matrix=True):
        sp = sub.add_parser(name, help=help_, parents=list(parents))
        if matrix:
            sp.add_argument("matrix", help="shorthand, inline JSON or JSON file")
        sp.set_defaults(func=func)
        return sp

    add("k", cmd_k, "evaluate K, K0 and Z/W membership")
    add("classify", cmd_classify, "seven-case infimum classification")
    sp = add("minimize", cmd_minimize, "minimize K over the orbit", parents=(tol, opt))
    sp.add_argument("--thin", type=int, default=1, help="keep every k-th trajectory entry")
    add("spectral", cmd_spectral, "eigenvalue clusters, Jordan data and degeneration witness")
    sp = add("partition", cmd_partition, "C_pi, parity and dominance for partitions", matrix=False)
    sp.add_argument("partition", nargs="?", help='e.g. "3,1^2"')
    sp.add_argument("--compare", help="second partition for a dominance comparison")
    sp.add_argument("--n", type=int, help="list all partitions of n instead")
    add("residual", cmd_residual, "first-variation and Ness residuals")
    sp = add("verify", cmd_verify, "run the reproduction suite", parents=(tol, opt), matrix=False)
    sp.add_argument("--out-dir", help=f"CSV directory (default ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT_DIR})")
    sp.add_argument("--samples", type=int, default=200, help="samples per property check")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except TraceFreeError as exc:
        tr = complex(exc.trace)
        shown = f"{tr.real:g}" if tr.imag == 0 else f"{tr:g}"
        print(f"error: matrix is not trace-free (trace = {shown})", file=sys.stderr)
    except OrbitError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
