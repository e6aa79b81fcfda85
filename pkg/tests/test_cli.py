import json

import pytest

from hybridanneal.cli import main
from hybridanneal.experiment import ConfigError, resolve_config, run_experiment
from hybridanneal.mimo import generate_instance, save_instance
from hybridanneal.qubo import QuboInstance, save_qubo

SMALL_RUN = """
name = "tiny"
seed = 4

[instances]
users = 3
modulation = "qpsk"
count = 2

[engine]
mode = "sa"
sweeps_per_microsecond = 20

[pipeline]
experiment = "sweep"

[sweep]
algorithms = ["FA", "RA-greedy"]
sp_grid = [0.41, 0.81]
n_samples = 40
"""


def run(*argv):
    return main([str(a) for a in argv])


def test_generate_and_verify(tmp_path, capsys):
    assert run("generate", "--users", 2, "--mod", "qam16", "--seed", 5, "--count", 3, "--out", tmp_path) == 0
    assert len(list(tmp_path.glob("*.qubo.json"))) == 3
    assert run("verify", tmp_path) == 0
    out = capsys.readouterr().out
    assert out.count("ok") == 3 and "exhaustive" in out


def test_verify_names_corrupted_instance(tmp_path, capsys):
    run("generate", "--users", 2, "--mod", "qpsk", "--seed", 1, "--count", 2, "--out", tmp_path)
    target = sorted(tmp_path.glob("*.qubo.json"))[1]
    data = json.loads(target.read_text())
    data["terms"][0][2] += 0.5
    target.write_text(json.dumps(data))
    capsys.readouterr()
    assert run("verify", tmp_path) == 3
    out = capsys.readouterr().out
    bad = [line for line in out.splitlines() if line.startswith("FAIL")]
    assert len(bad) == 1 and target.name.replace(".qubo", "") in bad[0]
    assert "identity violated at" in bad[0]


def test_verify_large_instance_is_sampled(tmp_path, capsys):
    save_instance(generate_instance(8, "qam64", seed=2), tmp_path / "big.json")
    assert run("verify", tmp_path) == 0
    assert "sampled" in capsys.readouterr().out


def test_solve_and_cap(tmp_path, capsys):
    run("generate", "--users", 2, "--mod", "qpsk", "--seed", 9, "--out", tmp_path)
    inst = next(p for p in tmp_path.glob("*.json") if not p.name.endswith(".qubo.json"))
    capsys.readouterr()
    assert run("solve", "--algo", "oracle", "--in", inst) == 0
    oracle = json.loads(capsys.readouterr().out)
    assert run("solve", "--algo", "greedy", "--in", inst) == 0
    greedy = json.loads(capsys.readouterr().out)
    assert greedy["energy"] >= oracle["energy"] - 1e-12
    tx = "".join(map(str, json.loads(inst.read_text())["tx_bits"]))
    assert tx in oracle["ground_states"]
    big = tmp_path / "big.qubo.json"
    save_qubo(QuboInstance([[0.0] * 30 for _ in range(30)]), big)
    assert run("solve", "--algo", "oracle", "--in", big) == 4


def test_reduce_simplify_report(tmp_path, capsys):
    run("generate", "--users", 1, "--mod", "bpsk", "--seed", 0, "--count", 4, "--out", tmp_path)
    paths = sorted(p for p in tmp_path.glob("*.json") if not p.name.endswith(".qubo.json"))
    assert run("reduce", "--in", paths[0], "--out", tmp_path / "r.qubo") == 0
    capsys.readouterr()
    assert run("simplify", "--in", *paths, "--report") == 0
    lines = capsys.readouterr().out.splitlines()
    # a single BPSK variable always has a dominant linear term
    assert lines == ["n_vars,modulation,ratio_simplified,avg_fixed", "1,bpsk,1.0,1.0"]


def test_anneal_writes_samples(tmp_path, capsys):
    run("generate", "--users", 2, "--mod", "qpsk", "--seed", 3, "--out", tmp_path)
    inst = next(p for p in tmp_path.glob("*.json") if not p.name.endswith(".qubo.json"))
    out = tmp_path / "s.json"
    assert run("anneal", "--in", inst, "--schedule", "ra", "--sp", 0.6, "--ns", 25, "--init", "greedy",
               "--mode", "sa", "--seed", 1, "--out", out, "--schedule-csv", tmp_path / "sched.csv") == 0
    data = json.loads(out.read_text())
    assert data["n_samples"] == 25 and data["initial"] == "greedy"
    assert (tmp_path / "sched.csv").read_text().startswith("time_us,s")
    assert "p_star=" in capsys.readouterr().err
    assert run("anneal", "--in", inst, "--schedule", "fr", "--sp", 0.6, "--cp", 0.5, "--ns", 5) == 2
    assert run("anneal", "--in", inst, "--schedule", "ra", "--sp", 0.6, "--init", "file", "--ns", 5) == 2


def test_sweep_and_initstate_commands(tmp_path):
    run("generate", "--users", 3, "--mod", "qpsk", "--seed", 3, "--out", tmp_path / "inst")
    inst = next(p for p in (tmp_path / "inst").glob("*.json") if not p.name.endswith(".qubo.json"))
    assert run("sweep-sp", "--in", inst, "--algos", "FA,RA-greedy", "--grid", "0.45,0.85", "--ns", 20,
               "--mode", "sa", "--out", tmp_path / "sw") == 0
    assert (tmp_path / "sw" / "sweep.csv").read_text().splitlines()[0].startswith("instance,algo,s_p")
    assert run("initstate-study", "--in", inst, "--sp", 0.85, "--ns", 20, "--pool", 200, "--mode", "sa",
               "--out", tmp_path / "is") == 0
    assert (tmp_path / "is" / "initstate.csv").exists()


def test_output_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HYBRIDANNEAL_OUTPUT_ROOT", str(tmp_path / "root"))
    cfg = tmp_path / "c.toml"
    cfg.write_text(SMALL_RUN)
    assert run("run", "--config", cfg) == 0
    assert (tmp_path / "root" / "tiny" / "manifest.json").exists()


def test_manifest_rerun_is_byte_identical(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(SMALL_RUN)
    first = run_experiment(cfg, tmp_path / "a")
    second = run_experiment(first.out_dir / "manifest.json", tmp_path / "b")
    assert first.files == second.files and "sweep.csv" in first.files
    for rel in first.files:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()
    assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()
    seeds = first.manifest["instances"]["seeds"]
    assert len(seeds) == 2 and all(isinstance(s, int) for s in seeds)


@pytest.mark.parametrize(
    "raw,path",
    [
        ({"instances": {"count": 0}}, "instances.count"),
        ({"instances": {"seeds": []}}, "instances.seeds"),
        ({"engine": {"mode": "qpu"}}, "engine"),
        ({"pipeline": {"experiment": "plot"}}, "pipeline.experiment"),
        ({"sweep": {"n_samples": "many"}}, "sweep.n_samples"),
        ({"instances": {"colour": 1}}, "instances.colour"),
        ({"instances": {"modulation": "8psk"}}, "instances.modulation"),
    ],
)
def test_config_errors_name_the_field(raw, path):
    with pytest.raises(ConfigError, match=path.replace(".", r"\.")):
        resolve_config(raw)


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('[engine]\nmode = "qpu"\n')
    assert run("run", "--config", cfg) == 2
    assert "engine" in capsys.readouterr().err
    cfg.write_text("not = [valid")
    assert run("run", "--config", cfg) == 2
    assert run("run", "--config", tmp_path / "missing.toml") == 2


def test_simplify_and_anneal_pipelines(tmp_path):
    fig3 = {"name": "f3", "pipeline": {"experiment": "simplify"},
            "simplify": {"modulations": ["bpsk"], "max_vars": 4, "n_instances": 5}}
    res = run_experiment(fig3, tmp_path / "f3")
    assert (res.out_dir / "simplification.csv").read_text().startswith("n_vars,modulation,ratio_simplified,avg_fixed")
    ann = {"name": "a", "instances": {"users": 2, "modulation": "qpsk", "count": 2},
           "engine": {"mode": "sa", "sweeps_per_microsecond": 20.0},
           "pipeline": {"experiment": "anneal", "simplify": True},
           "anneal": {"schedule": "ra", "s_p": 0.7, "n_samples": 20}}
    res = run_experiment(ann, tmp_path / "a")
    summary = (res.out_dir / "summary.csv").read_text().splitlines()
    assert summary[0] == "instance,n_vars,n_fixed,p_star,duration_us,tts_us,mean_delta_e"
    assert len(summary) == 3
