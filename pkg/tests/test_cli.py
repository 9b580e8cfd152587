"""Command-line behavior: exit codes, determinism, dumps, config handling."""

import json

import numpy as np
import pytest

from weylgeom.cli import default_config, load_config, main, parse_structured, run, serialize_structured
from weylgeom.identities import IdentityReport


def _verify_args(*extra):
    return ["verify", "--points", "4", "--seed", "42", *extra]


def test_models_list_contains_catalog(capsys):
    assert main(["models-list"]) == 0
    out = capsys.readouterr().out
    for name in (
        "minkowski",
        "rw_flat",
        "grw_product_spheres",
        "twisted_generic",
        "twisted_n4",
        "non_twisted_perturbed",
    ):
        assert name in out


def test_verify_small_run_exits_zero(capsys):
    code = main(_verify_args("--model", "twisted_n4", "--model", "minkowski"))
    out = capsys.readouterr().out
    assert code == 0
    assert "twisted_n4" in out and "minkowski_n4" in out
    assert "FAIL " not in out  # expected failures would show as XFAIL


def test_verify_includes_negative_control_expectations(capsys):
    code = main(_verify_args("--model", "non_twisted_perturbed"))
    out = capsys.readouterr().out
    assert code == 0
    assert "XFAIL" in out  # discriminating power reported, not an error


def test_structured_output_roundtrip(tmp_path):
    out_path = tmp_path / "report.json"
    code = main(
        _verify_args("--model", "twisted_n4", "--format", "structured", "--output", str(out_path))
    )
    assert code == 0
    data = parse_structured(out_path.read_text())
    assert data["exit_code"] == 0
    assert data["run"]["seed"] == 42
    row = data["reports"][0]
    for key in (
        "identity_id",
        "paper_ref",
        "model",
        "n",
        "points_tested",
        "max_residual",
        "scale",
        "tolerance",
        "verdict",
    ):
        assert key in row
    # Row order is the deterministic (model, identity_id) merge.
    keys = [(r["model"], r["identity_id"]) for r in data["reports"]]
    assert keys == sorted(keys)
    # Serialization round-trips exactly.
    assert parse_structured(serialize_structured(data)) == data
    report_fields = {
        k: row[k]
        for k in (
            "identity_id",
            "paper_ref",
            "points_tested",
            "max_residual",
            "scale",
            "tolerance",
            "verdict",
            "extras",
        )
    }
    report = IdentityReport.from_dict(report_fields)
    assert report.to_dict() == report_fields


def test_fixed_seed_runs_are_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert (
            main(
                _verify_args(
                    "--model", "twisted_n4", "--format", "structured", "--output", str(p)
                )
            )
            == 0
        )
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_unachievable_tolerance_override_exits_one(capsys):
    # Below machine epsilon: no residual can meet it, so the override must
    # flip the run to exit 1.
    code = main(
        _verify_args(
            "--model", "twisted_n4", "--tolerance", "weyl_divergence_formula=1e-18"
        )
    )
    capsys.readouterr()
    assert code == 1


def test_unknown_tolerance_id_exits_two(capsys):
    code = main(_verify_args("--tolerance", "bogus_identity=1e-3"))
    assert code == 2
    assert "unknown identity ids" in capsys.readouterr().err


def test_unknown_model_filter_exits_two(capsys):
    code = main(_verify_args("--model", "no_such_model"))
    assert code == 2


def test_config_file_run(tmp_path, capsys):
    config = {
        "models": [
            {"name": "twisted_n4", "parameters": {"alpha": 0.2, "beta": 0.1}},
            {
                "name": "custom_diagonal",
                "n": 4,
                "parameters": {"g_diag": ["-1", "exp(0.6*t)", "exp(0.6*t)", "exp(0.6*t)"], "expected_class": "rw"},
            },
        ],
        "points": 4,
        "seed": 7,
        "tolerances": {"weyl_divergence_formula": 1e-7},
        "output_format": "text",
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config))
    code = main(["verify", "--config", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "custom_diagonal_n4" in out


def test_config_unknown_field_rejected(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"models": [], "verbosity": 3}))
    assert main(["verify", "--config", str(path)]) == 2
    assert "unknown config fields" in capsys.readouterr().err


def test_config_unknown_tolerance_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"tolerances": {"nope": 1e-9}}))
    assert main(["verify", "--config", str(path)]) == 2


def test_missing_config_file_exits_two(capsys):
    assert main(["verify", "--config", "/nonexistent/config.json"]) == 2


def test_unknown_subcommand_exits_two(capsys):
    assert main(["frobnicate"]) == 2


def test_tensor_dump_expansion_rate(capsys):
    code = main(
        [
            "tensor-dump",
            "phi",
            "--model",
            "rw_flat",
            "--param",
            "f=exp",
            "--param",
            "H=0.3",
            "--point",
            "1.0,0.2,0.4,0.1",
        ]
    )
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["field"] == "hubble_rate"
    assert abs(record["value"] - 0.3) < 1e-12


def test_tensor_dump_weyl_supports_postprocessing(capsys):
    point = "0.5,0.3,0.7,0.2"
    assert main(["tensor-dump", "weyl", "--model", "twisted_n4", "--point", point]) == 0
    weyl_record = json.loads(capsys.readouterr().out)
    assert main(["tensor-dump", "g", "--model", "twisted_n4", "--point", point]) == 0
    g_record = json.loads(capsys.readouterr().out)

    c = np.array(weyl_record["components"])
    g = np.array(g_record["components"])
    assert weyl_record["variance"] == ["d", "d", "d", "d"]
    u_up = np.array([1.0, 0.0, 0.0, 0.0])
    u_down = g @ u_up
    electric = np.einsum("j,m,jklm->kl", u_up, u_up, c)
    lhs = np.einsum("jklm,m->jkl", c, u_up)
    rhs = np.einsum("k,jl->jkl", u_down, electric) - np.einsum("j,kl->jkl", u_down, electric)
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * max(1.0, np.max(np.abs(lhs)))


def test_tensor_dump_unknown_field_exits_two(capsys):
    code = main(["tensor-dump", "nonsense", "--model", "minkowski", "--point", "0,0,0,0"])
    assert code == 2
    assert "unknown field" in capsys.readouterr().err


def test_exit_code_is_function_of_reports():
    config = default_config()
    config.models = [m for m in config.models if m["name"] == "twisted_n4"]
    config.points = 3
    result = run(config)
    assert result["exit_code"] == 0
    assert all(row["ok"] for row in result["reports"])
    # Flip one expectation artificially: any not-ok row forces exit 1.
    config.tolerances = {"weyl_divergence_formula": 1e-18}
    result_bad = run(config)
    assert result_bad["exit_code"] == 1


def _threshold_custom_config(threshold, points=50):
    # g_11 = t - threshold turns non-Lorentzian for t < threshold, so the
    # deterministic sample decides exactly how many points fail.
    return {
        "models": [
            {
                "name": "custom_diagonal",
                "n": 4,
                "parameters": {
                    "g_diag": ["-1", f"t - {threshold}", "1", "1"],
                    "expected_class": "minkowski",
                },
            }
        ],
        "points": points,
        "seed": 42,
    }


def _sampled_times(points=50):
    from weylgeom import builtin_model, sample_points

    model = builtin_model("minkowski", 4)
    return sorted(p[0] for p in sample_points(model, points, 42))


def test_few_singular_points_are_skipped_with_warning():
    times = _sampled_times()
    threshold = 0.5 * (times[1] + times[2])  # exactly 2 of 50 points below
    config = load_config_from_dict(_threshold_custom_config(threshold))
    result = run(config)
    # Under 5% of points failing: skipped with warnings, no model error.
    assert result["errors"] == []
    assert len(result["warnings"]) == 2
    assert all("skipped point" in w for w in result["warnings"])
    applicable = [r for r in result["reports"] if r["verdict"] != "not-applicable"]
    assert applicable and all(r["points_tested"] == 48 for r in applicable)


def test_many_singular_points_error_out():
    times = _sampled_times()
    threshold = 0.5 * (times[24] + times[25])  # half the sample fails
    config = load_config_from_dict(_threshold_custom_config(threshold))
    result = run(config)
    assert result["exit_code"] == 1
    assert result["errors"]
    assert not result["reports"]


def load_config_from_dict(data):
    from weylgeom.cli import RunConfig, _validate_config

    base = default_config()
    return _validate_config(
        RunConfig(
            models=data.get("models", base.models),
            points=data.get("points", base.points),
            seed=data.get("seed", base.seed),
            tolerances=data.get("tolerances", {}),
            output_format=data.get("output_format", "text"),
            output_path=data.get("output_path"),
        )
    )


def test_custom_non_twisted_control_with_declared_expectations(tmp_path, capsys):
    # A config-declared control: anisotropic expansion makes the comoving
    # velocity shear-ful, so the torse-forming check must fail; this
    # particular metric still has a purely electric Weyl tensor, so only the
    # declared failures are expected and the run exits 0.
    config = {
        "models": [
            {
                "name": "custom_diagonal",
                "n": 4,
                "parameters": {
                    "g_diag": ["-1", "exp(0.6*t)", "exp(0.2*t)", "exp(0.2*t)"],
                    "expected_class": "non_twisted",
                    "expected_failures": ["torse_forming", "weyl_divergence_formula"],
                },
            }
        ],
        "points": 5,
        "seed": 42,
    }
    path = tmp_path / "control.json"
    path.write_text(json.dumps(config))
    assert main(["verify", "--config", str(path)]) == 0
    assert "XFAIL" in capsys.readouterr().out


def test_unknown_expected_failure_id_rejected(tmp_path, capsys):
    config = {
        "models": [
            {
                "name": "custom_diagonal",
                "n": 4,
                "parameters": {
                    "g_diag": ["-1", "1", "1", "1"],
                    "expected_class": "minkowski",
                    "expected_failures": ["not_an_identity"],
                },
            }
        ]
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(config))
    assert main(["verify", "--config", str(path)]) == 2
    assert "expected_failures" in capsys.readouterr().err


def test_load_config_defaults(tmp_path):
    path = tmp_path / "min.json"
    path.write_text("{}")
    config = load_config(str(path))
    assert config.points == 50 and config.seed == 42
    assert [m["name"] for m in config.models] == [
        m["name"] for m in default_config().models
    ]
