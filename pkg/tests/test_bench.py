import json

import numpy as np
import pytest

from hybridanneal.bench import (
    algorithm_comparison,
    harvest_initial_states,
    histogram_report,
    initial_state_study,
    make_problem,
    simplification_study,
    sweep_sp,
)
from hybridanneal.classical import brute_force
from hybridanneal.engine import EngineParams
from hybridanneal.mimo import generate_instance, mimo_to_qubo

FAST = EngineParams(mode="sa", sweeps_per_microsecond=20)


@pytest.fixture(scope="module")
def problems():
    return [make_problem(generate_instance(3, "qpsk", seed=s), f"p{s}") for s in (1, 2)]


def test_noiseless_ground_energy_is_exact():
    inst = generate_instance(4, "qpsk", seed=6)
    prob = make_problem(inst)
    gs = brute_force(mimo_to_qubo(inst))
    assert prob.E_g == pytest.approx(gs.energy, abs=1e-9)
    assert prob.E_g + prob.qubo.offset == pytest.approx(0.0, abs=1e-9)


def test_sweep_rows_and_invariants(problems):
    rep = sweep_sp(problems, ("FA", "RA-greedy", "FR"), [0.41, 0.61, 0.81], n_samples=50, params=FAST, seed=1)
    assert rep.columns[:2] == ("instance", "algo")
    assert len(rep.rows) == 2 * (3 + 3 + 2)  # FR has no c_p above the top grid point
    assert any("FR" in f for f in rep.flags)
    for r in rep.rows:
        assert 0.0 <= r["p_star"] <= 1.0
        if 0 < r["p_star"] < 1:
            assert r["tts_us"] >= r["duration_us"]
        if r["algo"] == "FR":
            assert r["c_p"] > r["s_p"]
        else:
            assert r["c_p"] is None
    ra = [r for r in rep.rows if r["algo"] == "RA-greedy"]
    assert [r["duration_us"] for r in ra[:3]] == pytest.approx([2 * (1 - s) + 1 for s in (0.41, 0.61, 0.81)])


def test_sweep_is_deterministic_and_serialises(problems):
    kw = dict(algorithms=("FA",), sp_grid=[0.45], n_samples=30, params=FAST, seed=3)
    a, b = sweep_sp(problems, **kw), sweep_sp(problems, **kw)
    assert a.to_csv() == b.to_csv()
    assert len(a.rows) == 2  # single-point grid is one run per instance
    data = json.loads(a.to_json())
    assert data["rows"][0]["algo"] == "FA"
    with pytest.raises(ValueError):
        sweep_sp(problems, ("FA",), [], n_samples=10)
    with pytest.raises(ValueError):
        sweep_sp(problems, ("RA",), [0.5], n_samples=10, params=FAST)


def test_harvest_includes_ground_state(problems):
    states, gaps = harvest_initial_states(problems[0], 200, FAST, seed=0)
    assert gaps[0] == 0.0
    assert np.all(np.diff(gaps) >= 0) and np.all(gaps < 10)
    assert len({tuple(s) for s in states}) == len(states)


def test_initial_state_study_rows():
    prob = make_problem(generate_instance(6, "qpsk", seed=3))
    rep = initial_state_study(prob, delta=2.0, s_p=0.85, n_samples=40, params=FAST, seed=0,
                              pool_size=500, states_per_bin=2)
    assert rep.columns == ("bin_lo", "bin_hi", "p_star", "mean_cost", "n_states")
    assert rep.rows[0]["bin_lo"] == 0.0
    assert len(rep.rows) + len(rep.flags) == 5
    for r in rep.rows:
        assert 1 <= r["n_states"] <= 2 and r["bin_hi"] - r["bin_lo"] == pytest.approx(2.0)
    with pytest.raises(ValueError):
        initial_state_study(prob, delta=0.0)


def test_algorithm_comparison_shapes(problems):
    comp = algorithm_comparison(problems, sp_grid=[0.45, 0.85], n_samples=40, calibration_samples=20,
                                params=FAST, seed=2)
    assert set(comp.s_p) == {"FA", "RA-random", "RA-greedy"}
    assert all(v in (0.45, 0.85) for v in comp.s_p.values())
    for algo, hist in comp.histograms.items():
        assert hist.mass.sum() == pytest.approx(1.0, abs=1e-12)
        assert len(comp.p_star[algo]) == 2
    rows = histogram_report(comp.histograms["FA"]).rows
    assert rows[0]["bucket_lo"] == 0.0 and rows[-1]["bucket_hi"] == float("inf")


def test_simplification_study_small():
    rep = simplification_study(("bpsk", "qpsk"), max_vars=6, n_instances=10, seed=0)
    assert rep.columns == ("n_vars", "modulation", "ratio_simplified", "avg_fixed")
    assert [(r["n_vars"], r["modulation"]) for r in rep.rows] == [
        (2, "bpsk"), (3, "bpsk"), (4, "bpsk"), (5, "bpsk"), (6, "bpsk"), (2, "qpsk"), (4, "qpsk"), (6, "qpsk")]
    for r in rep.rows:
        assert 0.0 <= r["ratio_simplified"] <= 1.0
        assert r["avg_fixed"] == 0.0 or r["avg_fixed"] >= 1.0
    assert rep.to_csv() == simplification_study(("bpsk", "qpsk"), max_vars=6, n_instances=10, seed=0).to_csv()
