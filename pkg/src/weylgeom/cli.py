"""Command-line entry point: run the identity suite, dump fields, list models.

Exit codes: 0 when every applicable identity matches its expectation
(including the negative-control expected failures), 1 on any unexpected
verdict or model evaluation error, 2 on configuration or usage errors.

The structured output format is stable JSON with one record per
(model, identity): identity_id, paper_ref, model, n, points_tested,
max_residual, scale, tolerance, verdict, plus the expectation bookkeeping
(expected, ok) and any measured extras.  Fixed-seed runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import __version__
from .curvature import CurvatureBundle, build_bundle
from .identities import (
    GROUPS,
    NOT_APPLICABLE,
    REGISTRY,
    expected_verdict,
    registry_ids,
    report_ok,
    run_model_suite,
)
from .models import CATALOG_NAMES, MetricModel, builtin_model, default_model_specs, sample_points

__all__ = ["RunConfig", "load_config", "default_config", "run", "main", "entrypoint"]

_CONFIG_KEYS = {"models", "points", "seed", "tolerances", "output_format", "output_path"}
_MODEL_KEYS = {"name", "n", "parameters", "label"}
_FORMATS = ("text", "structured")

# Bundle fields that tensor-dump may print, plus short aliases.
_DUMP_FIELDS = (
    "g",
    "g_inv",
    "christoffel",
    "riemann",
    "ricci",
    "scalar_curvature",
    "weyl",
    "nabla_weyl",
    "div_weyl",
    "u_down",
    "u_up",
    "nabla_u_down",
    "nabla_u_up",
    "hubble_rate",
    "d_hubble_rate",
    "electric",
    "nabla_electric",
    "div_electric",
    "weyl_remainder",
    "raychaudhuri_scalar",
    "hubble_gradient_up",
)
_FIELD_ALIASES = {
    "phi": "hubble_rate",
    "E": "electric",
    "xi": "raychaudhuri_scalar",
    "v": "hubble_gradient_up",
    "C": "weyl",
    "nablaC": "nabla_weyl",
    "divC": "div_weyl",
    "scalarR": "scalar_curvature",
    "gamma": "christoffel",
}


@dataclass
class RunConfig:
    """Validated inputs of one verification run."""

    models: list[dict]
    points: int = 50
    seed: int = 42
    tolerances: dict = dataclass_field(default_factory=dict)
    output_format: str = "text"
    output_path: str | None = None


def default_config() -> RunConfig:
    models = [
        {"name": name, "n": n, "parameters": params}
        for name, n, params in default_model_specs()
    ]
    return RunConfig(models=models)


def _validate_config(config: RunConfig) -> RunConfig:
    if config.points < 1:
        raise ValueError("points must be >= 1")
    if config.output_format not in _FORMATS:
        raise ValueError(f"output_format must be one of {_FORMATS}")
    known = set(registry_ids())
    unknown = set(config.tolerances) - known
    if unknown:
        raise ValueError(f"unknown identity ids in tolerances: {sorted(unknown)}")
    for entry in config.models:
        extra = set(entry) - _MODEL_KEYS
        if extra:
            raise ValueError(f"unknown model-entry fields: {sorted(extra)}")
        if "name" not in entry:
            raise ValueError("every model entry needs a 'name'")
        if entry.get("n") is not None and not 4 <= int(entry["n"]) <= 7:
            raise ValueError("model dimension n must be in 4..7")
        declared = (entry.get("parameters") or {}).get("expected_failures")
        if declared is not None:
            bad = set(map(str, declared)) - known
            if bad:
                raise ValueError(f"unknown identity ids in expected_failures: {sorted(bad)}")
    return config


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON run config; unknown fields are rejected."""
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ValueError("config root must be a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    base = default_config()
    config = RunConfig(
        models=data.get("models", base.models),
        points=int(data.get("points", base.points)),
        seed=int(data.get("seed", base.seed)),
        tolerances={k: float(v) for k, v in data.get("tolerances", {}).items()},
        output_format=data.get("output_format", base.output_format),
        output_path=data.get("output_path"),
    )
    return _validate_config(config)


# ---------------------------------------------------------------------------
# Verification run
# ---------------------------------------------------------------------------


def _build_model(entry: dict) -> MetricModel:
    return builtin_model(entry["name"], entry.get("n"), entry.get("parameters"))


def _collect_bundles(
    model: MetricModel, points: list, warnings: list[str]
) -> list[CurvatureBundle]:
    bundles = []
    skipped = 0
    for point in points:
        try:
            bundles.append(build_bundle(model, point))
        except ValueError as err:
            skipped += 1
            warnings.append(
                f"{model.label}: skipped point {np.asarray(point).tolist()}: {err}"
            )
    if skipped and skipped / len(points) >= 0.05:
        raise RuntimeError(
            f"{model.label}: {skipped}/{len(points)} sampled points failed to evaluate"
        )
    if not bundles:
        raise RuntimeError(f"{model.label}: no usable sampled points")
    return bundles


def run(config: RunConfig) -> dict:
    """Execute a verification run; returns the full result record.

    The record contains one row per (model, identity), sorted by model label
    then identity id, plus run metadata, warnings, errors and the exit code.
    """
    _validate_config(config)
    rows: list[dict] = []
    warnings: list[str] = []
    errors: list[str] = []
    entries = []
    for entry in config.models:
        try:
            entries.append((entry.get("label"), _build_model(entry)))
        except ValueError as err:
            raise ValueError(f"bad model entry {entry.get('name')!r}: {err}") from err

    for label, model in sorted(entries, key=lambda pair: pair[0] or pair[1].label):
        label = label or model.label
        try:
            points = sample_points(model, config.points, config.seed)
            bundles = _collect_bundles(model, points, warnings)
            reports = run_model_suite(model, bundles, config.tolerances)
        except (RuntimeError, ValueError) as err:
            errors.append(str(err))
            continue
        for report in reports:
            expected = expected_verdict(model, report)
            rows.append(
                {
                    "model": label,
                    "n": model.n,
                    "expected": expected,
                    "ok": report_ok(model, report),
                    **report.to_dict(),
                }
            )
    rows.sort(key=lambda row: (row["model"], row["identity_id"]))
    exit_code = 0 if all(row["ok"] for row in rows) and not errors else 1
    return {
        "run": {
            "package": "weylgeom",
            "version": __version__,
            "points": config.points,
            "seed": config.seed,
        },
        "reports": rows,
        "warnings": warnings,
        "errors": errors,
        "exit_code": exit_code,
    }


def serialize_structured(result: dict) -> str:
    return json.dumps(result, indent=2, sort_keys=True) + "\n"


def parse_structured(text: str) -> dict:
    return json.loads(text)


def render_text(result: dict) -> str:
    lines = [
        "weylgeom identity verification "
        f"(points={result['run']['points']}, seed={result['run']['seed']})",
    ]
    by_model: dict[str, list[dict]] = {}
    for row in result["reports"]:
        by_model.setdefault(row["model"], []).append(row)
    group_of = {check.identity_id: check.group for check in REGISTRY}
    for model_label in sorted(by_model):
        model_rows = by_model[model_label]
        lines.append("")
        lines.append(f"model {model_label} (n={model_rows[0]['n']})")
        for group in GROUPS:
            group_rows = [r for r in model_rows if group_of[r["identity_id"]] == group]
            if not group_rows:
                continue
            lines.append(f"  [{group}]")
            for row in group_rows:
                if row["verdict"] == NOT_APPLICABLE:
                    mark = "N/A  "
                elif row["ok"]:
                    mark = "PASS " if row["verdict"] == "pass" else "XFAIL"
                else:
                    mark = "FAIL "
                lines.append(
                    f"    {mark} {row['identity_id']:<32} "
                    f"resid={row['max_residual']:.3e} scale={row['scale']:.3e} "
                    f"tol={row['tolerance']:.1e} pts={row['points_tested']}"
                )
                lines.append(f"           {row['paper_ref']}")
    if result["warnings"]:
        lines.append("")
        lines.extend(f"warning: {w}" for w in result["warnings"])
    if result["errors"]:
        lines.append("")
        lines.extend(f"error: {e}" for e in result["errors"])
    lines.append("")
    lines.append(f"exit code {result['exit_code']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _parse_tolerance_flags(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ValueError(f"--tolerance expects ID=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = float(value)
    return out


def _parse_param_flags(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ValueError(f"--param expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        try:
            out[key.strip()] = float(value)
        except ValueError:
            out[key.strip()] = value
    return out


def cmd_verify(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else default_config()
    if args.points is not None:
        config.points = args.points
    if args.seed is not None:
        config.seed = args.seed
    if args.format is not None:
        config.output_format = args.format
    if args.output is not None:
        config.output_path = args.output
    if args.tolerance:
        config.tolerances.update(_parse_tolerance_flags(args.tolerance))
    if args.model:
        wanted = set(args.model)
        known = {entry["name"] for entry in config.models}
        missing = wanted - known
        if missing:
            raise ValueError(f"--model filter does not match any configured model: {sorted(missing)}")
        config.models = [entry for entry in config.models if entry["name"] in wanted]
    _validate_config(config)

    result = run(config)
    text = (
        serialize_structured(result)
        if config.output_format == "structured"
        else render_text(result)
    )
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return int(result["exit_code"])


def cmd_tensor_dump(args: argparse.Namespace) -> int:
    field_name = _FIELD_ALIASES.get(args.field, args.field)
    if field_name not in _DUMP_FIELDS:
        raise ValueError(
            f"unknown field {args.field!r}; choose from {', '.join(_DUMP_FIELDS)} "
            f"or aliases {', '.join(_FIELD_ALIASES)}"
        )
    model = builtin_model(args.model, args.n, _parse_param_flags(args.param))
    point = np.array([float(x) for x in args.point.split(",")])
    bundle = build_bundle(model, point)
    value = getattr(bundle, field_name)
    record: dict = {
        "model": model.label,
        "n": model.n,
        "point": point.tolist(),
        "field": field_name,
    }
    if isinstance(value, (int, float)):
        record["value"] = float(value)
    elif isinstance(value, np.ndarray):
        record["variance"] = None
        record["components"] = value.tolist()
    else:
        record["variance"] = list(value.variance)
        record["components"] = value.components.tolist()
    sys.stdout.write(json.dumps(record, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_models_list(args: argparse.Namespace) -> int:
    for name in CATALOG_NAMES:
        if name == "custom_diagonal":
            sys.stdout.write(f"{name}  [class declared by config]  n=4..7\n")
            sys.stdout.write(
                "    user-defined diagonal metric from the expression grammar "
                "(config-only; entries over t, x1.., exp/log/sin/cos/pow)\n"
            )
            continue
        model = builtin_model(name)
        dims = (
            "n=5"
            if name == "grw_product_spheres"
            else ("n=4" if name == "twisted_n4" else "n=4..7")
        )
        sys.stdout.write(f"{name}  [{model.expected_class}]  {dims}\n")
        sys.stdout.write(f"    {model.description}\n")
        if model.parameters:
            defaults = ", ".join(f"{k}={v}" for k, v in sorted(model.parameters.items()))
            sys.stdout.write(f"    defaults: {defaults}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylgeom",
        description="verify curvature identities of twisted space-time metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run the identity suite and report residuals")
    verify.add_argument("--config", help="JSON run config path")
    verify.add_argument("--points", type=int, help="sampled chart points per model")
    verify.add_argument("--seed", type=int, help="sampling seed")
    verify.add_argument("--format", choices=_FORMATS, help="output format")
    verify.add_argument("--output", help="write the report to a file instead of stdout")
    verify.add_argument(
        "--model", action="append", help="restrict to this catalog model (repeatable)"
    )
    verify.add_argument(
        "--tolerance",
        action="append",
        default=[],
        metavar="ID=VALUE",
        help="override one identity tolerance (repeatable)",
    )
    verify.set_defaults(func=cmd_verify)

    dump = sub.add_parser("tensor-dump", help="print one bundle field at one chart point")
    dump.add_argument("field", help="bundle field name (aliases: phi, E, xi, v, C, nablaC, divC, scalarR, gamma)")
    dump.add_argument("--model", required=True, help="catalog model name")
    dump.add_argument("--n", type=int, help="dimension (model default when omitted)")
    dump.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    dump.add_argument("--point", required=True, help="comma-separated chart coordinates, t first")
    dump.set_defaults(func=cmd_tensor_dump)

    models = sub.add_parser("models-list", help="print the metric catalog")
    models.set_defaults(func=cmd_models_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 2


def entrypoint() -> None:
    sys.exit(main())
