"""Command-line surface: deterministic JSON reports over the library.

Exit codes: 0 for a completed analysis (inconclusive and failing verdicts
are report content), 1 for invalid input, 2 for an internal numerical
inconsistency.
"""

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .manifolds import (
    augmented_from_json,
    augmented_jet_space,
    builtin_family,
    sample_analysis,
    tangent_space,
)
from .matspace import subspace_from_json, subspace_to_json
from .obstruct import (
    InternalInconsistencyError,
    classify_delta_full,
    find_complex_pair,
    find_rank_one,
)
from .polyspace import reduced_basis, solution_basis, verify_membership
from .prolong import chain
from .symtensor import polymap_from_json


@dataclass
class RunConfig:
    """Effective configuration, embedded verbatim in every report."""

    subcommand: str
    input_path: str | None = None
    k_max: int = 8
    seed: int = 0
    restarts: int = 64
    out: str | None = None
    format: str = "json"
    samples: int = 100
    radius: float = 1.0
    tol: float = 1e-9
    degree: int = 6
    family: str | None = None
    dim: int | None = None

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tolerances must be positive")

    def to_json(self) -> dict:
        out = {
            "subcommand": self.subcommand,
            "k_max": self.k_max,
            "seed": self.seed,
            "restarts": self.restarts,
            "format": self.format,
            "tolerances": DEFAULT_TOLERANCES.to_dict(),
        }
        if self.input_path is not None:
            out["input"] = self.input_path
        for key in ("samples", "radius", "tol", "degree", "family", "dim"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(report: dict, config: RunConfig, bare: bool = False) -> None:
    if bare:
        payload = _jsonable(report)
    else:
        payload = _jsonable({"config": config.to_json(), "result": report})
    if config.format == "table" and not bare:
        text = _render_table(payload)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_table(payload: dict) -> str:
    lines = [f"command: {payload['config']['subcommand']}"]

    def walk(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}{k}.", value[k])
        elif isinstance(value, list) and all(isinstance(v, (int, float)) for v in value):
            lines.append(f"{prefix[:-1]}: {' '.join(str(v) for v in value)}")
        elif isinstance(value, (int, float, str, bool)) or value is None:
            lines.append(f"{prefix[:-1]}: {value}")
        else:
            lines.append(f"{prefix[:-1]}: <{len(value)} entries>")

    walk("", payload["result"])
    return "\n".join(lines) + "\n"


def _alpha_total_field(report) -> dict:
    body = report.to_json(include_bases=True)
    if not report.alpha_total_exact:
        body["alpha_total_note"] = f">= {report.alpha_total}"
    return body


def _cmd_chain(config: RunConfig) -> dict:
    V = subspace_from_json(_load_json(config.input_path))
    return _alpha_total_field(chain(V, config.k_max))


def _cmd_detect(config: RunConfig) -> dict:
    V = subspace_from_json(_load_json(config.input_path))
    result: dict = {"n": V.n, "m": V.m, "dim_v": V.dim}
    rank_one = find_rank_one(V, config.seed, config.restarts) if V.dim >= 1 else None
    complex_pair = None
    if V.dim >= 2 and V.m >= 2 and V.n >= 2:
        complex_pair = find_complex_pair(V, config.seed, config.restarts)
    result["rank_one"] = rank_one.to_json() if rank_one else "inconclusive"
    result["complex_pair"] = complex_pair.to_json() if complex_pair else "inconclusive"
    return result


def _cmd_classify(config: RunConfig) -> dict:
    V = subspace_from_json(_load_json(config.input_path))
    outcome = classify_delta_full(V, config.k_max, config.seed, config.restarts)
    result = {
        "n": V.n,
        "m": V.m,
        "dim_v": V.dim,
        "delta": outcome.delta.to_json(),
        "alpha": list(outcome.chain_report.alpha),
        "searches": outcome.searches_json(),
    }
    if outcome.delta.status == "infinite_certified":
        result["witness"] = outcome.delta.witness.to_json()
    return result


def _cmd_polysolve(config: RunConfig) -> dict:
    V = subspace_from_json(_load_json(config.input_path))
    report = chain(V, config.k_max)
    if report.delta.status != "finite":
        return {
            "delta": report.delta.to_json(),
            "solution_basis": None,
            "note": "chain did not terminate within k_max; no finite basis",
        }
    basis = solution_basis(V, report)
    reduced = reduced_basis(basis)
    return {
        "delta": report.delta.to_json(),
        "alpha": list(report.alpha),
        "alpha_total": report.alpha_total,
        "solution_basis": basis.to_json(),
        "reduced_basis": reduced.to_json(),
    }


def _cmd_manifold(config: RunConfig, emit_tangent: bool) -> dict:
    family = builtin_family(config.family, config.dim)
    if emit_tangent:
        # raw subspace file, replayable through the linear subcommands
        V = tangent_space(family, family.base_point)
        return subspace_to_json(V)
    report = sample_analysis(
        family, sample_count=config.samples, k_max=config.k_max,
        seed=config.seed, restarts=config.restarts,
    )
    return report.to_json()


def _cmd_verify(config: RunConfig, poly_path: str) -> dict:
    V = subspace_from_json(_load_json(config.input_path))
    F = polymap_from_json(_load_json(poly_path))
    if (F.n, F.m) != (V.n, V.m):
        raise ValueError("polynomial and subspace dimensions disagree")
    report = verify_membership(
        F, V, samples=config.samples, radius=config.radius,
        tol=config.tol, seed=config.seed,
    )
    return report.to_json()


def _cmd_jet(config: RunConfig, matrix_path: str) -> dict:
    v_aug = augmented_from_json(_load_json(config.input_path))
    A = np.asarray(_load_json(matrix_path), dtype=float)
    report = augmented_jet_space(v_aug, A, config.degree)
    return report.to_json()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prolongation",
        description="Chain invariants, obstruction witnesses and polynomial "
                    "solution spaces for linear Jacobian constraints.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, *, kmax=False, seed=False, restarts=False):
        p.add_argument("--out", default=None, help="write the report to this path")
        p.add_argument("--format", choices=("json", "table"), default="json")
        if kmax:
            p.add_argument("--kmax", type=int, default=8)
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if restarts:
            p.add_argument("--restarts", type=int, default=64)

    p = sub.add_parser("chain", help="prolongation chain of a subspace file")
    p.add_argument("--input", required=True)
    common(p, kmax=True)

    p = sub.add_parser("detect", help="search for obstruction witnesses")
    p.add_argument("--input", required=True)
    common(p, seed=True, restarts=True)

    p = sub.add_parser("classify", help="chain plus certified classification")
    p.add_argument("--input", required=True)
    common(p, kmax=True, seed=True)

    p = sub.add_parser("polysolve", help="polynomial solution basis")
    p.add_argument("--input", required=True)
    common(p, kmax=True)

    p = sub.add_parser("manifold", help="sampled analysis of a builtin family")
    p.add_argument("--family", required=True,
                   choices=("conformal", "isometry", "quaternion", "holomorphic"))
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--emit-tangent", action="store_true",
                   help="write the base-point tangent space as a subspace file")
    common(p, kmax=True, seed=True)

    p = sub.add_parser("verify", help="sampled Jacobian membership check")
    p.add_argument("--input", required=True, help="subspace file")
    p.add_argument("--poly", required=True, help="polynomial file")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-9)
    common(p, seed=True)

    p = sub.add_parser("jet", help="truncated jet space through a first-order part")
    p.add_argument("--input-augmented", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--degree", type=int, default=6)
    common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        config = RunConfig(
            subcommand=args.subcommand,
            input_path=getattr(args, "input", None) or getattr(args, "input_augmented", None),
            k_max=getattr(args, "kmax", 8),
            seed=getattr(args, "seed", 0),
            restarts=getattr(args, "restarts", 64),
            out=args.out,
            format=args.format,
            samples=getattr(args, "samples", 100),
            radius=getattr(args, "radius", 1.0),
            tol=getattr(args, "tol", 1e-9),
            degree=getattr(args, "degree", 6),
            family=getattr(args, "family", None),
            dim=getattr(args, "dim", None),
        )
        bare = False
        if args.subcommand == "chain":
            report = _cmd_chain(config)
        elif args.subcommand == "detect":
            report = _cmd_detect(config)
        elif args.subcommand == "classify":
            report = _cmd_classify(config)
        elif args.subcommand == "polysolve":
            report = _cmd_polysolve(config)
        elif args.subcommand == "manifold":
            bare = args.emit_tangent
            report = _cmd_manifold(config, args.emit_tangent)
        elif args.subcommand == "verify":
            report = _cmd_verify(config, args.poly)
        elif args.subcommand == "jet":
            report = _cmd_jet(config, args.matrix)
        else:  # pragma: no cover - argparse enforces the choices
            raise ValueError(f"unknown subcommand {args.subcommand!r}")
    except InternalInconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1
    _emit(report, config, bare=bare)
    return 0


if __name__ == "__main__":
    sys.exit(main())
