import json

import pytest

from ccsim import cli, serialize


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(cli.OUTPUT_DIR_ENV, raising=False)

    def _run(*argv):
        return cli.main(list(argv))
    return _run


def test_build_or_reduction_writes_circuit_and_manifest(run, tmp_path):
    assert run("build", "or-reduction", "--b", "3", "--variant", "commuting", "-o", "or3.json") == 0
    c = serialize.load(tmp_path / "or3.json")
    assert len(c.gates) == 6 and all(g.kind == "U" for g in c.gates)
    man = json.loads((tmp_path / "or3.manifest.json").read_text())
    assert man["command"] == "build" and man["exit_code"] == 0 and "elapsed_s" in man


def test_pipeline_and_checks(run, tmp_path):
    assert run("build", "example", "-o", "c.json") == 0
    assert run("build", "compress3", "--in", "c.json", "-o", "a.json") == 0
    man = json.loads((tmp_path / "a.manifest.json").read_text())
    assert man["b"] == 6 and len(man["inputs"]) == 1
    assert run("build", "conjugate", "--a", "a.json", "-o", "com.json") == 0
    assert run("check", "commuting", "--in", "com.json") == 0
    assert run("check", "locality", "--in", "com.json", "--c", "5") == 0
    assert run("check", "locality", "--in", "com.json", "--c", "4") == 1
    for what in ("en", "en-prime"):
        assert run("build", what, "--a", "a.json", "-o", f"{what}.json") == 0
    assert run("build", "fanout-or", "--b", "2", "-o", "f.json") == 0


def test_simulate_compare(run, tmp_path, capsys):
    run("build", "or-reduction", "--b", "2", "-o", "or2.json")
    assert run("simulate", "--circuit", "or2.json", "--x", "00", "-o", "d.json") == 0
    assert run("compare", "d.json", "d.json", "--json") == 0
    out = capsys.readouterr().out
    assert json.loads(out[out.index("{"):])["tv"] == 0
    run("simulate", "--circuit", "or2.json", "--x", "10", "-o", "e.json")
    assert run("compare", "d.json", "e.json", "--tol", "1e-9") == 1


def test_strong_and_weak(run, tmp_path, capsys):
    from ccsim import gates as G
    from ccsim.circuit import INPUT, Circuit
    serialize.dump(Circuit(2, [G.h(0), G.cnot(0, 1)], (INPUT, INPUT), (0, 1)), tmp_path / "bell.json")
    assert run("strong-sim", "--circuit", "bell.json", "--x", "00", "--y", "11", "--audit", "--json") == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["probability"] == pytest.approx(0.5) and len(obj["terms"]) == 4
    serialize.dump(Circuit(3, [G.cz(0, 2), G.cr(1, 2, 2)], (INPUT,) * 3), tmp_path / "d.json")
    assert run("weak-sim", "--f", "bell.json", "--d", "d.json", "--l", "1", "--x", "00",
               "--shots", "2000", "--seed", "3", "--exact", "--json") == 0
    obj = json.loads(capsys.readouterr().out)
    assert sum(obj["counts"].values()) == 2000 and obj["tv"] < 0.1


def test_postselect_verb(run, tmp_path, capsys):
    from ccsim import gates as G
    from ccsim.circuit import INPUT, ZERO, Circuit
    a = Circuit(3, [G.h(0), G.cnot(0, 1)], (INPUT, ZERO, ZERO), outputs=(0,), postselect=(1, 2))
    serialize.dump(a, tmp_path / "a.json")
    assert run("postselect", "--circuit", "a.json", "--x", "0", "--exact", "--json") == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["estimate"]["value"] == pytest.approx(0.0)


def test_demo_pipeline(run, capsys):
    assert run("demo", "theorem1", "--seed", "7") == 0
    out = capsys.readouterr().out
    for name in ("commuting", "locality<=5", "distribution-match"):
        assert any(line.startswith(name) and "pass" in line for line in out.splitlines())


def test_usage_errors(run, tmp_path):
    assert run("bogus") == 2
    assert run("build", "or-reduction") == 2
    assert run("simulate", "--circuit", "missing.json") == 2
    (tmp_path / "bad.json").write_text("{oops")
    assert run("check", "commuting", "--in", "bad.json") == 2


def test_output_dir_override(run, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path / "outs"))
    assert run("build", "or-reduction", "--b", "1") == 0
    assert (tmp_path / "outs" / "commuting-or-reduction(b=1).json").exists() or \
        list((tmp_path / "outs").glob("*.json"))
