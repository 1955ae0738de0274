import csv
import json
import math
import re
from pathlib import Path

import numpy as np
import pytest

from czlab.grid import Box
from czlab.harness import (
    CLAIMS,
    EXPERIMENTS,
    KINDS,
    SCHEMA_VERSION,
    ConfigError,
    ExperimentConfig,
    Report,
    build_operator,
    default_config,
    generate_corpus,
    load_config,
    read_csv_aggregates,
    realize,
    realize_exponent,
    report_emit,
    run,
)
from czlab.harness.cli import main
from czlab.harness.report import clean, to_json_text

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = Path(__file__).parent / "golden"

SMALL = {
    "experiment": "strong-type",
    "levels": [6, 7],
    "family_size": 2,
    "operators": [{"type": "paraproduct", "V": 4}, {"type": "bpdo", "symbol": "smooth"}],
    "weights": [[{"type": "power", "a": -0.4}, {"type": "power", "a": 0.4}]],
}


def small_config(**over):
    data = {**SMALL, **over}
    return ExperimentConfig.from_dict(data, default_config(data["experiment"]))


# ---------------------------------------------------------------------------
# config


def test_every_experiment_has_a_loadable_default():
    for eid in EXPERIMENTS:
        cfg = ExperimentConfig.from_dict(default_config(eid))
        assert cfg.experiment == eid
        assert len(cfg.sha256()) == 64


def test_config_rejects_bad_input():
    with pytest.raises(ConfigError, match="unknown config keys"):
        ExperimentConfig.from_dict({"experiment": "dini", "levles": [1]})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"seed": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "dini", "levels": [-1]})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "dini", "seed": -3})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "dini", "halfwidth": 0})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict([1, 2])


def test_config_merges_params_over_defaults():
    cfg = ExperimentConfig.from_dict(
        {"experiment": "sharp-pointwise", "params": {"delta": 0.2}}, default_config("sharp-pointwise")
    )
    assert cfg.params["delta"] == 0.2 and cfg.params["eps"] == 0.4
    assert cfg.drift == 0.25


def test_config_hash_and_overrides(tmp_path):
    cfg = small_config()
    assert cfg.sha256() == small_config().sha256()
    moved = cfg.with_overrides(seed=5, levels=[6])
    assert moved.seed == 5 and moved.levels == (6,)
    assert moved.sha256() != cfg.sha256()
    path = tmp_path / "c.json"
    path.write_text(json.dumps(SMALL))
    assert load_config(path, default_config("strong-type")).sha256() == cfg.sha256()
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)


# ---------------------------------------------------------------------------
# corpus


def test_corpus_is_reproducible_and_seeded():
    for kind in KINDS:
        assert generate_corpus(kind, 3, 5) == generate_corpus(kind, 3, 5)
        assert generate_corpus(kind, 3, 5) != generate_corpus(kind, 4, 5)
        assert generate_corpus(kind, 3, 5, salt=1) != generate_corpus(kind, 3, 5)
        # a longer family extends a shorter one
        assert generate_corpus(kind, 3, 8)[:5] == generate_corpus(kind, 3, 5)
    with pytest.raises(ValueError):
        generate_corpus("gaussians", 0, 1)
    assert generate_corpus("log-bmo", 0, 0) == []


def test_corpus_canonical_members():
    frozen = json.loads((GOLDEN / "corpus_seed0.json").read_text())
    assert sorted(frozen) == sorted(KINDS)
    for kind in KINDS:
        assert generate_corpus(kind, 0, 1)[0] == frozen[kind]


def test_corpus_ranges():
    for s in generate_corpus("step-functions", 1, 200):
        assert 1 <= len(s["heights"]) <= 16
        assert s["edges"][0] == -1.0 and s["edges"][-1] == 1.0
    for s in generate_corpus("exponents", 1, 200):
        assert 1.9 <= s["p0"] <= 2.0 and 0.1 <= s["amp"] <= 0.2
    for s in generate_corpus("power-weights", 1, 200):
        assert -0.5 <= s["a"] <= 0.5


def test_realize_every_kind():
    box = Box(1, 2.0)
    for kind in KINDS:
        spec = generate_corpus(kind, 0, 1)[0]
        if kind == "exponents":
            p = realize_exponent(spec, box, 6)
            assert p.p_inf == spec["p0"] and p.p_minus > 1
        else:
            f = realize(spec, box, 6)
            assert f.n == 64 and np.all(np.isfinite(f.samples))
    assert realize({"type": "unit"}, box, 4).mean() == 1.0
    assert realize_exponent({"type": "jump", "low": 1.5, "high": 2.5}, box, 4).p_plus == 2.5
    with pytest.raises(ValueError):
        realize({"type": "mystery"}, box, 4)


def test_build_operator():
    box = Box(1, 2.0)
    assert build_operator({"type": "paraproduct", "V": 3}, box)[0] == "paraproduct(V=3)"
    assert build_operator({"type": "bpdo", "symbol": "log-modulus"}, box)[0] == "bpdo(log-modulus)"
    with pytest.raises(ValueError):
        build_operator({"type": "bpdo", "symbol": "nope"}, box)
    with pytest.raises(ValueError):
        build_operator({"type": "hilbert"}, box)


# ---------------------------------------------------------------------------
# reports


def _report(assertions, records=()):
    return Report("x", "y", {}, {}, list(records), [], {}, list(assertions), {})


def test_report_status_and_exit_codes():
    assert _report([{"name": "a", "passed": True}]).exit_code == 0
    assert _report([{"name": "a", "passed": False}]).exit_code == 2
    assert _report([], [{"level": 1}]).exit_code == 3
    assert _report([]).status == "pass"


def test_clean_makes_json_safe():
    out = clean({"a": np.float64(1.5), "b": [np.inf, -np.inf, np.nan], 3: np.int64(2), "c": (True, None)})
    assert out == {"a": 1.5, "b": ["inf", "-inf", "nan"], "3": 2, "c": [True, None]}
    with pytest.raises(TypeError):
        clean({"x": object()})


def test_empty_family_gives_empty_passing_report():
    rep = run(small_config(family_size=0))
    assert rep.records == [] and rep.aggregates == [] and rep.assertions == []
    assert rep.status == "pass" and rep.exit_code == 0


def test_report_schema_and_csv_round_trip(tmp_path):
    rep = run(small_config())
    d = json.loads(to_json_text(rep))
    assert d["schema_version"] == SCHEMA_VERSION
    assert {"experiment", "claim", "config", "provenance", "records", "aggregates", "assertions", "status"} <= set(d)
    assert d["provenance"]["config_sha256"] == small_config().sha256()
    assert d["claim"] == "strong-type" and d["status"] == "pass"
    assert [a["level"] for a in d["aggregates"]] == [6, 7]
    path = report_emit(rep, tmp_path / "r.csv", "csv")
    rows = read_csv_aggregates(path)
    assert rows == d["aggregates"]
    with open(path, newline="") as fh:
        assert next(csv.reader(fh)) == ["experiment", "level", "max_ratio", "count", "skipped"]
    with pytest.raises(ValueError):
        report_emit(rep, tmp_path / "r.xml", "xml")


def test_csv_round_trip_of_infinite_ratio(tmp_path):
    rep = Report("x", "y", {}, {}, [], [{"experiment": "x", "level": 3, "max_ratio": math.inf, "count": 1, "skipped": 0}])
    rows = read_csv_aggregates(report_emit(rep, tmp_path / "r.csv", "csv"))
    assert rows[0]["max_ratio"] == math.inf


def test_rerun_is_byte_identical_and_thread_independent(monkeypatch):
    a = to_json_text(run(small_config(seed=7)))
    b = to_json_text(run(small_config(seed=7)))
    assert a == b
    monkeypatch.setenv("CZLAB_THREADS", "3")
    assert to_json_text(run(small_config(seed=7))) == a
    assert to_json_text(run(small_config(seed=8))) != a


# ---------------------------------------------------------------------------
# claims coverage


def test_claims_table_covers_every_experiment():
    table = (ROOT / "docs" / "claims.md").read_text()
    rows = dict(re.findall(r"^\| `([^`]+)` \| `([^`]+)` \|", table, flags=re.M))
    assert rows == {eid: e.claim for eid, e in EXPERIMENTS.items()}
    assert {e.claim for e in EXPERIMENTS.values()} == set(CLAIMS)
    for eid, e in EXPERIMENTS.items():
        assert e.description in table


# ---------------------------------------------------------------------------
# command line


def test_cli_list_and_corpus(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for eid in EXPERIMENTS:
        assert eid in out
    assert main(["corpus", "power-weights", "--seed", "0", "--count", "2"]) == 0
    assert json.loads(capsys.readouterr().out) == generate_corpus("power-weights", 0, 2)


def test_cli_check_writes_report(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(SMALL))
    out = tmp_path / "r.json"
    assert main(["check", "strong-type", "--config", str(cfg), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["status"] == "pass"
    assert "strong-type: pass" in capsys.readouterr().out
    csv_out = tmp_path / "r.csv"
    assert main(["check", "strong-type", "--config", str(cfg), "--out", str(csv_out), "--format", "csv", "--levels", "6"]) == 0
    assert [r["level"] for r in read_csv_aggregates(csv_out)] == [6]


def test_cli_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({**SMALL, "tolerances": {"drift": 1e-12}}))
    assert main(["check", "strong-type", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 2
    assert "FAILED" in capsys.readouterr().out


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["check", "no-such-experiment", "--out", str(tmp_path / "r.json")]) == 1
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({**SMALL, "experiment": "weak-type"}))
    assert main(["check", "strong-type", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 1
    cfg.write_text(json.dumps({**SMALL, "colour": "red"}))
    assert main(["check", "strong-type", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 1
    assert "unknown config keys" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["frobnicate"])


# ---------------------------------------------------------------------------
# every experiment at reduced family size

# a small calibration set underfits C, so the hold-out experiment keeps its shipped size
REDUCED = {
    "sharp-pointwise": {},
    "paraproduct-kernel": {"family_size": 4, "params": {"tuples": 500}},
}


@pytest.mark.parametrize("eid", list(EXPERIMENTS))
def test_every_experiment_passes_reduced(eid):
    d = default_config(eid)
    over = REDUCED.get(eid, {"family_size": min(4, d.get("family_size") or 4)})
    rep = run(ExperimentConfig.from_dict({"experiment": eid, **over}, d))
    assert rep.assertions
    assert rep.status == "pass", [a["name"] for a in rep.assertions if not a["passed"]]
    assert json.loads(to_json_text(rep))["experiment"] == eid
