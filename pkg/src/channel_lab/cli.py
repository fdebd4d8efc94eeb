"""``channel-lab``: analyze, optimize and verify channels described in a spec file.

A spec file is YAML (JSON also parses). Complex numbers are written either as a
plain number or as a ``[re, im]`` pair; vectors are lists of such entries and
matrices are lists of rows::

    named:
      family: pauli
      params: {p: [0.7, 0.1, 0.1, 0.1]}
    subspace:            # optional, rows are basis vectors; default is all of H
      - [1, 0]
    seed: 7              # optional
    samples: 10000       # optional

or, for explicit Kraus operators::

    raw:
      dim: 2
      kraus:
        - [[1, 0], [0, 0]]
        - [[0, 0], [0, 1]]

Exit codes: 0 success, 2 parse error, 3 validation error, 4 numerical failure
(two computation routes disagree), 5 code violates the error-correction condition.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import __version__
from .channel import KrausChannel, build_named_channel, is_unital, validate
from .errors import ChannelValidationError, DimensionError, NotHermitianError, NumericalError, SubspaceError
from .hamiltonian import (
    compress,
    cross_check_routes,
    fidelity_hamiltonian_hermitian,
    full_spectrum,
    invariant_subspace,
    symmetric_sector_spectrum,
)
from .optimizer import (
    OptimizerConfig,
    brute_force_grid,
    maximize_product_expectation,
    minimize_product_expectation,
)
from .purity import (
    average_fidelity,
    average_purity,
    dfs_check,
    monte_carlo_average,
    output_purity,
    purity_bounds,
    qecc_code_matrix,
)
from .tensor import TOL, SubspaceBasis

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4
EXIT_CODE_CONDITION = 5

DEFAULT_SAMPLES = 10_000
ORACLE_RESOLUTION = 200
ORACLE_AGREEMENT = 1e-3
TIMESTAMP_FIELD = "generated_at"


class SpecParseError(ValueError):
    pass


class _SpecLoader(yaml.SafeLoader):
    """SafeLoader that also reads YAML 1.2 floats such as ``1e-3``."""


_SpecLoader.yaml_implicit_resolvers = {k: list(v) for k, v in yaml.SafeLoader.yaml_implicit_resolvers.items()}
_SpecLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"),
    list("-+0123456789"),
)


# --- spec parsing -------------------------------------------------------------


def _entry(x, where: str) -> complex:
    if isinstance(x, bool):
        raise SpecParseError(f"{where}: expected a number or [re, im], got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise SpecParseError(f"{where}: expected a number or [re, im], got {x!r}")


def parse_vector(v, where: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise SpecParseError(f"{where}: expected a non-empty list of entries")
    return np.array([_entry(x, f"{where}[{i}]") for i, x in enumerate(v)], dtype=complex)


def parse_matrix(m, where: str) -> np.ndarray:
    if not isinstance(m, list) or not m:
        raise SpecParseError(f"{where}: expected a non-empty list of rows")
    rows = [parse_vector(r, f"{where}[{i}]") for i, r in enumerate(m)]
    if len({len(r) for r in rows}) != 1:
        raise SpecParseError(f"{where}: rows have different lengths")
    return np.stack(rows)


def _matrix_list(ms, where: str) -> list[np.ndarray]:
    if not isinstance(ms, list) or not ms:
        raise SpecParseError(f"{where}: expected a non-empty list of matrices")
    return [parse_matrix(m, f"{where}[{i}]") for i, m in enumerate(ms)]


@dataclass
class ChannelSpec:
    channel: KrausChannel
    subspace: SubspaceBasis | None
    code: SubspaceBasis | None
    seed: int | None
    samples: int | None
    document: dict


def _build_channel(doc: dict) -> KrausChannel:
    if ("named" in doc) == ("raw" in doc):
        raise SpecParseError("spec must contain exactly one of 'named' or 'raw'")
    if "named" in doc:
        named = doc["named"]
        if not isinstance(named, dict) or "family" not in named:
            raise SpecParseError("named: expected a mapping with a 'family' field")
        params = dict(named.get("params") or {})
        if not isinstance(named.get("params") or {}, dict):
            raise SpecParseError("named.params: expected a mapping")
        for key in ("projectors", "unitaries"):
            if key in params:
                params[key] = _matrix_list(params[key], f"named.params.{key}")
        return build_named_channel({"family": named["family"], "params": params})
    raw = doc["raw"]
    if not isinstance(raw, dict) or "kraus" not in raw:
        raise SpecParseError("raw: expected a mapping with 'dim' and 'kraus'")
    kraus = _matrix_list(raw["kraus"], "raw.kraus")
    dim = raw.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SpecParseError(f"raw.dim: expected a positive integer, got {dim!r}")
    for i, a in enumerate(kraus):
        if a.shape != (dim, dim):
            raise DimensionError(f"raw.kraus[{i}] has shape {a.shape}, expected {(dim, dim)}")
    return KrausChannel(kraus, raw.get("label", f"raw(d={dim}, k={len(kraus)})"))


def _basis(doc: dict, key: str, dim: int) -> SubspaceBasis | None:
    if key not in doc or doc[key] is None:
        return None
    vecs = doc[key]
    if not isinstance(vecs, list) or not vecs:
        raise SpecParseError(f"{key}: expected a non-empty list of vectors")
    parsed = [parse_vector(v, f"{key}[{i}]") for i, v in enumerate(vecs)]
    for i, v in enumerate(parsed):
        if v.shape[0] != dim:
            raise DimensionError(f"{key}[{i}] has length {v.shape[0]}, channel dimension is {dim}")
    return SubspaceBasis.from_vectors(parsed)


def _optional_int(doc: dict, key: str) -> int | None:
    v = doc.get(key)
    if v is None:
        return None
    if not isinstance(v, int) or isinstance(v, bool):
        raise SpecParseError(f"{key}: expected an integer, got {v!r}")
    return v


def load_spec(path: str | Path, tol: float = TOL) -> ChannelSpec:
    """Parse and validate a spec file.

    Raises:
        SpecParseError: unreadable file, malformed YAML or a badly shaped field.
        ChannelValidationError, DimensionError, SubspaceError: well-formed input
            that does not describe a valid channel / subspace.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecParseError(f"cannot read spec {path}: {exc.strerror}") from None
    try:
        doc = yaml.load(text, Loader=_SpecLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise SpecParseError(f"malformed spec{where}: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(doc, dict):
        raise SpecParseError("spec must be a mapping at the top level")
    channel = _build_channel(doc)
    report = validate(channel, tol)
    if not report:
        raise ChannelValidationError(
            f"channel is not trace preserving: max|sum A^dagger A - I| = {report.deviation:.3e} > tol {tol:.1e}",
            report.deviation,
        )
    return ChannelSpec(
        channel=channel,
        subspace=_basis(doc, "subspace", channel.dim),
        code=_basis(doc, "code", channel.dim),
        seed=_optional_int(doc, "seed"),
        samples=_optional_int(doc, "samples"),
        document=doc,
    )


# --- serialization ------------------------------------------------------------


def to_jsonable(x: Any) -> Any:
    """Numbers, arrays and dataclass-free containers as JSON values; complex -> [re, im]."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return x


def dumps_report(report: dict) -> str:
    # json writes floats with repr(), the shortest string that round-trips exactly
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True, allow_nan=True) + "\n"


def comparable(report_text: str) -> dict:
    """Parsed report with the timestamp removed, for determinism comparisons."""
    doc = json.loads(report_text)
    doc.pop(TIMESTAMP_FIELD, None)
    return doc


# --- commands -----------------------------------------------------------------


def _channel_summary(t: KrausChannel, tol: float) -> dict:
    unital, unital_dev = is_unital(t)
    return {
        "label": t.label,
        "dim": t.dim,
        "num_kraus": t.num_kraus,
        "trace_preservation_deviation": validate(t, tol).deviation,
        "unital": unital,
        "unitality_deviation": unital_dev,
    }


def _cfg(args, spec: ChannelSpec) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, seed=_seed(args, spec))


def _seed(args, spec: ChannelSpec) -> int:
    if args.seed is not None:
        return args.seed
    return spec.seed if spec.seed is not None else 0


def cmd_analyze(spec: ChannelSpec, args) -> dict:
    t = spec.channel
    c = spec.subspace or SubspaceBasis.full(t.dim)
    omega = cross_check_routes(t)
    for k in range(c.dim):
        output_purity(t, c.vectors[:, k], omega)
    evals, _ = full_spectrum(omega)
    sym = symmetric_sector_spectrum(omega)
    bounds = purity_bounds(t, c, omega)
    inv = invariant_subspace(omega)
    return {
        "channel": _channel_summary(t, args.tol),
        "omega_spectrum": evals,
        "symmetric_spectrum": sym.eigenvalues,
        "omega0_plus": sym.min_eigenvalue,
        "subspace_dim": c.dim,
        "bounds": {"upper": bounds.upper, "lower_global": bounds.lower_global, "lower_subspace": bounds.lower_subspace},
        "average_purity": average_purity(t, omega),
        "average_fidelity": average_fidelity(t),
        "invariant_subspace": {"dim": inv.dim, "eigenvalues": inv.eigenvalues, "basis": inv.basis.T},
    }


def _hamiltonian(t: KrausChannel, quantity: str):
    if quantity == "purity":
        return cross_check_routes(t)
    return fidelity_hamiltonian_hermitian(t)


def cmd_optimize(spec: ChannelSpec, args) -> dict:
    t = spec.channel
    c = spec.subspace or SubspaceBasis.full(t.dim)
    h = _hamiltonian(t, args.quantity)
    run = minimize_product_expectation if args.direction == "min" else maximize_product_expectation
    res = run(h, c, _cfg(args, spec))
    values = np.array(res.restart_values)
    best_hits = int(np.sum(np.abs(values - res.value) <= 1e-8))
    out = {
        "quantity": args.quantity,
        "direction": args.direction,
        "value": res.value,
        "state": res.state,
        "converged": res.converged,
        "iterations_used": res.iterations_used,
        "restarts": {
            "count": len(values),
            "min": float(values.min()),
            "max": float(values.max()),
            "mean": float(values.mean()),
            "hits_within_1e-8": best_hits,
        },
        "dfs_candidate": res.dfs_candidate,
    }
    if c.dim == 2:
        grid = brute_force_grid(compress(h, c), ORACLE_RESOLUTION)
        oracle_value = grid.min_value if args.direction == "min" else grid.max_value
        out["oracle"] = {
            "run": True,
            "resolution": ORACLE_RESOLUTION,
            "min": grid.min_value,
            "max": grid.max_value,
            "agrees": abs(oracle_value - res.value) <= ORACLE_AGREEMENT,
        }
    else:
        out["oracle"] = {"run": False}
    return out


def cmd_dfs(spec: ChannelSpec, args) -> dict:
    t = spec.channel
    seed = _seed(args, spec)
    if spec.subspace is not None:
        chk = dfs_check(t, spec.subspace, cfg=_cfg(args, spec), seed=seed)
        return {
            "mode": "check",
            "subspace_dim": spec.subspace.dim,
            "is_dfs": chk.is_dfs,
            "unital": chk.unital,
            "criterion": chk.criterion,
            "eigen_residual": chk.residual,
            "sampled_min_purity": chk.sampled_min,
            "optimizer_min_purity": chk.optimizer_min,
            "upper_bound": chk.upper_bound,
        }
    omega = cross_check_routes(t)
    inv = invariant_subspace(omega)
    best = maximize_product_expectation(omega, None, _cfg(args, spec))
    return {
        "mode": "discovery",
        "invariant_subspace": {"dim": inv.dim, "eigenvalues": inv.eigenvalues, "basis": inv.basis.T},
        "max_purity": best.value,
        "max_purity_state": best.state,
        "dfs_candidate": best.dfs_candidate,
    }


def cmd_qecc(spec: ChannelSpec, args) -> dict:
    if spec.code is None:
        raise SpecParseError("qecc needs a 'code' field listing codewords")
    cm = qecc_code_matrix(spec.channel, spec.code)
    return {
        "code_dim": spec.code.dim,
        "c": cm.c,
        "kl_residual": cm.kl_residual,
        "condition_holds": cm.holds,
        "rank": cm.rank,
        "trace_c_squared": cm.purity,
        "codeword_purities": list(cm.codeword_purities),
    }


def cmd_montecarlo(spec: ChannelSpec, args) -> dict:
    t = spec.channel
    n = args.samples or spec.samples or DEFAULT_SAMPLES
    est = monte_carlo_average(t, args.quantity, n, _seed(args, spec))
    analytic = average_purity(t) if args.quantity == "purity" else average_fidelity(t)
    return {
        "quantity": args.quantity,
        "samples": n,
        "estimate": est.estimate,
        "stderr": est.stderr,
        "analytic": analytic,
        "zscore": est.zscore(analytic),
    }


COMMANDS = {
    "analyze": cmd_analyze,
    "optimize": cmd_optimize,
    "dfs": cmd_dfs,
    "qecc": cmd_qecc,
    "montecarlo": cmd_montecarlo,
}


# --- output -------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, list) and v and all(isinstance(x, float) for x in v):
        return "[" + ", ".join(f"{x:.6g}" for x in v) + "]"
    return json.dumps(v)


def render_table(command: str, results: dict) -> str:
    lines = [f"channel-lab {command}"]

    def walk(prefix: str, node):
        if isinstance(node, dict):
            for k, v in node.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        else:
            lines.append(f"  {prefix:<40} {_fmt(node)}")

    walk("", to_jsonable(results))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="channel-lab", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--spec", required=True, help="channel spec file (YAML or JSON)")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--seed", type=int, default=None, help="overrides the spec's seed (default 0)")
    p.add_argument("--samples", type=int, default=None, help=f"Monte-Carlo samples (default {DEFAULT_SAMPLES})")
    p.add_argument("--direction", choices=["min", "max"], default="min")
    p.add_argument("--quantity", choices=["purity", "fidelity"], default="purity")
    p.add_argument("--tol", type=float, default=TOL, help="trace-preservation tolerance for the input channel")
    p.add_argument("--restarts", type=int, default=32, help="optimizer restarts")
    return p


def run(argv: list[str] | None = None) -> tuple[int, dict | None]:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec, args.tol)
        results = COMMANDS[args.command](spec, args)
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE, None
    except (ChannelValidationError, DimensionError, SubspaceError, NotHermitianError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION, None
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL, None
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION, None

    report = {
        "tool": "channel-lab",
        "version": __version__,
        "command": args.command,
        "seed": _seed(args, spec),
        "input": spec.document,
        "options": {
            "direction": args.direction,
            "quantity": args.quantity,
            "tol": args.tol,
            "restarts": args.restarts,
            "samples": args.samples,
        },
        "results": {args.command: results},
        TIMESTAMP_FIELD: datetime.now(timezone.utc).isoformat(),
    }
    print(render_table(args.command, results))
    if args.out:
        Path(args.out).write_text(dumps_report(report))
    code = EXIT_OK
    if args.command == "qecc" and not results["condition_holds"]:
        print(f"error-correction condition violated (residual {results['kl_residual']:.3e})", file=sys.stderr)
        code = EXIT_CODE_CONDITION
    return code, report


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
