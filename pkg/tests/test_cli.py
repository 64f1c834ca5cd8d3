import json

import pytest

from indefinite_theta.cli import EXIT_COMPUTE, EXIT_INPUT, EXIT_OK, main, parse_tau, run

CFG_A = {"gram": [[-1, 0, 0], [0, -1, 0], [0, 0, 1]], "vectors": [[1, 0, 0], [0, 1, 0], ["-4/5", "-3/5", 0]]}
CFG_B = {"gram": [[-1, 0, 0], [0, -1, 0], [0, 0, 1]], "vectors": [[1, 0, 0], [0, 1, 0], ["3/5", "4/5", 0]]}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, cfg in (("A", CFG_A), ("B", CFG_B)):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(cfg))
        out[name] = str(p)
    return out


def _json(argv):
    code, text, _ = run(argv)
    assert code == EXIT_OK, text
    return json.loads(text)


def test_check_valid(files):
    rep = _json(["check", files["A"]])
    assert rep["command"] == "check" and rep["result"]["overall"] is True
    assert [r["value"] for r in rep["result"]["I.3"]] == ["-3/5", "-4/5", "-12/25"]
    assert len(rep["input_digest"]) == 64


def test_check_invalid_still_exits_zero(files):
    rep = _json(["check", files["B"]])
    assert rep["result"]["overall"] is False
    assert rep["result"]["violations"] == [["I.3", 1, "4/5"], ["I.3", 2, "3/5"]]


def test_necessity_config_b(files):
    rep = _json(["necessity", files["B"], "--reference", "-1", "--radius", "5"])
    res = rep["result"]
    assert res["I.3"] == "(I.3) fails at j=1,2"
    assert [2, 1, 0] in [w["x"] for w in res["witnesses"]]
    assert res["agreement"] is True


def test_necessity_config_a_has_no_witness(files):
    res = _json(["necessity", files["A"], "--radius", "4", "--samples", "200"])["result"]
    assert res["I.3"] == "(I.3) holds" and res["witness_count"] == 0


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"gram": [[-1, 0, 0],\n [0, -1, 0]\n')
    code, text, _ = run(["check", str(p)])
    assert code == EXIT_INPUT and "line" in text


def test_schema_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"gram": [[-1, 0], [1, -1]], "vectors": [[1, 0], [0, 1]]}))
    assert run(["check", str(p)])[0] == EXIT_INPUT
    assert run(["check", str(tmp_path / "missing.json")])[0] == EXIT_INPUT


def test_theta_refuses_invalid(files):
    code, text, _ = run(["theta", files["B"], "--M", "3"])
    assert code == EXIT_COMPUTE and "InvalidConfigError" in text


def test_theta_config_a(files):
    res = _json(["theta", files["A"], "--M", "4"])["result"]
    assert abs(res["value_at_tau"][0] - 0.0864348) < 1e-6
    assert 0 < res["tail_bound"] < 1e-3
    full = _json(["theta", files["A"]])["result"]
    assert abs(full["value_at_tau"][0] - res["value_at_tau"][0]) <= res["tail_bound"]
    assert full["tail_bound"] < 1e-12


def test_output_is_deterministic(files):
    argv = ["cones", files["A"], "--samples", "300"]
    assert run(argv)[1] == run(argv)[1]


def test_text_format_both_positions(files):
    a = run(["--format", "text", "check", files["A"]])[1]
    b = run(["check", files["A"], "--format", "text"])[1]
    assert a == b and "overall: True" in a


def test_output_file(files, tmp_path):
    target = tmp_path / "out.json"
    assert main(["check", files["A"], "-o", str(target)]) == EXIT_OK
    assert json.loads(target.read_text())["command"] == "check"


def test_config_gen_round_trip(tmp_path):
    code, text, _ = run(["config-gen", "--n", "2", "--N", "5", "--mode", "perturbed", "--seed", "3"])
    assert code == EXIT_OK
    p = tmp_path / "gen.json"
    p.write_text(text)
    assert _json(["check", str(p)])["result"]["overall"] is True


def test_e2_centred(files):
    res = _json(["e2", files["A"], "--pair", "1", "--x", "0,0,0"])["result"]
    assert res["pair"] == [1, 2]
    assert abs(res["value"]) < 1e-12          # perpendicular lines
    assert run(["e2", files["A"], "--pair", "9", "--x", "0,0,0"])[0] == EXIT_INPUT
    assert run(["e2", files["A"], "--pair", "1", "--x", "0,0"])[0] == EXIT_INPUT


def test_verify(files):
    res = _json(["verify", files["A"], "--samples", "300", "--per-wall", "50", "--path", "2,1,0;1,2,0"])["result"]
    assert res["constancy"]["w_values"] == [-1]
    assert res["winding"]["mismatches"] == 0
    assert res["path"]["constant"] is True
    bad = _json(["verify", files["B"], "--samples", "300", "--per-wall", "50"])["result"]
    assert bad["constancy"]["constant"] is False


@pytest.mark.parametrize("text,value", [("i", 1j), ("0.5+2i", 0.5 + 2j), ("3i", 3j)])
def test_parse_tau(text, value):
    assert parse_tau(text) == value


def test_parse_tau_rejects_lower_half_plane(files):
    assert run(["theta", files["A"], "--tau=-i"])[0] == EXIT_INPUT
