import json
import pathlib

import pytest

import locklab

ROOT = pathlib.Path(__file__).resolve().parents[2]
C432 = ROOT / "benchmarks" / "c432.bench"
C17 = ROOT / "benchmarks" / "c17.bench"


@pytest.fixture(scope="module")
def c432():
    return locklab.read_bench(str(C432))


def test_parse_and_round_trip(c432):
    assert len(c432.inputs) == 36
    assert len(c432.outputs) == 7
    assert locklab.parse_bench(c432.to_bench()) == c432


def test_simulate_c17():
    c = locklab.read_bench(str(C17))
    out = c.simulate({pi: False for pi in c.inputs})
    assert set(out) == set(c.outputs)


def test_key_count_law():
    assert locklab.key_count("cac2", 32, 16) == 96
    assert locklab.key_count("antisat", 5) == 10
    assert locklab.key_count("sarlock", 7) == 7


def test_lock_verify_attack(c432):
    d = locklab.lock(c432, "cac", 6, seed=4)
    assert len(d.key_inputs) == 6
    assert locklab.verify(d.circuit, d.key_inputs, d.secret_key, c432)
    wrong = ("1" if d.secret_key[0] == "0" else "0") + d.secret_key[1:]
    assert not locklab.verify(d.circuit, d.key_inputs, wrong, c432)
    r = locklab.sat_attack(d.circuit, d.key_inputs, c432)
    assert r["status"] == "KeyFound"
    assert r["iterations"] == 63
    assert r["verified"] is True


def test_attack_limit_reports_timeout(c432):
    d = locklab.lock(c432, "sarlock", 8, seed=1)
    r = locklab.sat_attack(d.circuit, d.key_inputs, c432, max_iterations=2)
    assert r["status"] == "Timeout"


def test_probes(c432):
    d = locklab.lock(c432, "cac2", 4, 2, seed=2)
    m = locklab.mapping_probe(d.circuit, d.key_inputs)
    assert 4 < m["ambiguity_exponent"] <= 12
    r = locklab.removal_probe(d.circuit, d.key_inputs, c432)
    assert r["critical"] == []


def test_errors():
    c = locklab.read_bench(str(C17))
    with pytest.raises(locklab.InfeasibleError):
        locklab.lock(c, "cac", 9)
    assert locklab.max_feasible_n(c, "cac") == 4
    with pytest.raises(locklab.ParseError):
        locklab.parse_bench("INPUT(a)\nOUTPUT(y)\ny = FROB(a)\n")
    with pytest.raises(locklab.Error):
        locklab.lock(c, "nope", 2)


def test_sweep_is_deterministic():
    plan = json.dumps({"circuits": [str(C432)], "techniques": ["sarlock", "cac"], "n": [3, 4], "seeds": [1, 2]})
    a = locklab.run_sweep(plan)
    b = locklab.run_sweep(plan)
    assert a == b
    assert [r["attacks"][0]["iterations"] for r in a if r["technique"] == "sarlock"] == [7, 7, 15, 15]
