import json

import pytest
from hypothesis import given, settings, strategies as st

from decokit.cli import main, trinity_demo
from decokit.config import DEFAULTS, FIELDS, ConfigError, load_config, parse_config
from decokit.report import run_scenario, table1
from decokit.trinity import DensityMatrix, from_json


def write(tmp_path, obj, name="c.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj, indent=2))
    return p


def test_unit_pairs_normalised_to_si():
    cfg = parse_config({"kind": "neuron", "membrane_thickness": {"value": 8, "unit": "nm"}})
    assert cfg.values["membrane_thickness"].value == pytest.approx(8e-9)


def test_wrong_dimension_rejected():
    with pytest.raises(ConfigError) as e:
        parse_config({"kind": "neuron", "diameter": {"value": 1, "unit": "s"}})
    assert e.value.path == "diameter"


def test_unknown_key_and_kind():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config({"kind": "neuron", "colour": 3})
    with pytest.raises(ConfigError):
        parse_config({"kind": "planet"})


def test_string_value_reports_field_and_line(tmp_path):
    p = write(tmp_path, '{\n  "kind": "neuron",\n  "eta": "lots"\n}\n')
    with pytest.raises(ConfigError) as e:
        load_config(p)
    assert e.value.path == "eta" and e.value.line == 3


def test_round_trip_idempotent():
    for kind in FIELDS:
        once = parse_config({"kind": kind}).to_dict()
        twice = parse_config(once).to_dict()
        assert once == twice


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(sorted(FIELDS)), st.data())
def test_round_trip_random_values(kind, data):
    raw = {"kind": kind}
    for k in FIELDS[kind]:
        if data.draw(st.booleans()):
            raw[k] = data.draw(st.floats(1e-30, 1e30))
    once = parse_config(raw).to_dict()
    assert parse_config(once).to_dict() == once


def test_cli_run_default_neuron(tmp_path, capsys):
    p = write(tmp_path, {"kind": "neuron"})
    assert main(["run", str(p), "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    taus = [r["tau_s"] for r in out["results"]]
    assert len(taus) == 3
    for tau, published in zip(taus, (1e-20, 1e-20, 1e-19)):
        assert published / 10 <= tau <= published * 10
    assert out["classification"]["regime"] == "classical"
    assert out["provenance"]["constants"] == "CODATA-2018"


def test_cli_run_microtubule(tmp_path, capsys):
    p = write(tmp_path, {"kind": "microtubule"})
    assert main(["run", str(p), "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert 1e-14 <= out["results"][0]["tau_s"] <= 1e-12


def test_cli_config_error_exit_2(tmp_path, capsys):
    p = write(tmp_path, {"kind": "neuron", "diameter": "wide"})
    assert main(["run", str(p)]) == 2
    assert "diameter" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.json")]) == 2
    p = write(tmp_path, "{not json", "bad.json")
    assert main(["run", str(p)]) == 2


def test_cli_regime_error_exit_3(tmp_path, capsys):
    p = write(tmp_path, {"kind": "custom", "separation": {"value": 0.1, "unit": "nm"}})
    assert main(["run", str(p)]) == 3
    assert "regime" in capsys.readouterr().err


def test_cli_theta_policy_and_out(tmp_path):
    out = tmp_path / "r.json"
    assert main(["table1", "--format", "json", "--theta-policy", "worst", "--out", str(out)]) == 0
    rows = json.loads(out.read_text())["results"]
    drop = table1("drop").rows
    assert rows[2]["tau_s"] == pytest.approx(drop[2].result.tau.value / 2)


def test_table1_deterministic(capsys):
    outs = []
    for fmt in ("json", "text", "json", "text"):
        main(["table1", "--format", fmt])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[2] and outs[1] == outs[3]
    assert len(table1().rows) == 4


def test_trinity_demo(capsys):
    for fig, final in ((4, {"happy,up", "sad,down"}), (5, {"happy,up", "sad,up"})):
        stages = trinity_demo(fig)
        for s in stages:
            assert isinstance(from_json(s["matrix"]), DensityMatrix)
        assert main(["trinity-demo", "--figure", str(fig), "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["figure"] == fig
    with pytest.raises(ValueError):
        trinity_demo(6)
    with pytest.raises(SystemExit):
        main(["trinity-demo", "--figure", "6"])


def test_colloid_and_custom_scenarios():
    r = run_scenario(parse_config({"kind": "colloid", "tau_dyn": 1.0}))
    assert r.classification.regime == "classical"
    r = run_scenario(parse_config({"kind": "custom", "ion_count": 10}))
    assert len(r.rows) == 3
