"""Config-driven experiment runs with a replayable manifest.

A config is a TOML (or JSON) document::

    name = "compare36"
    seed = 7

    [instances]
    users = 9
    modulation = "qam16"
    count = 20

    [engine]
    mode = "sqa"
    sweeps_per_microsecond = 10

    [pipeline]
    experiment = "compare"     # anneal | compare | sweep | initstate | simplify

    [compare]
    n_samples = 10000

Missing values take the defaults below.  The resolved config, with every
instance seed spelled out, is written to ``manifest.json`` in the output
directory; running that manifest again reproduces every output file.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bench import (
    DEFAULT_SP_GRID,
    algorithm_comparison,
    build_schedule,
    histogram_report,
    initial_state_study,
    make_problem,
    mean_delta_e,
    simplification_study,
    sweep_sp,
    Report,
)
from .classical import prefix_simplify
from .engine import EngineParams
from .metrics import success_probability, tts
from .mimo import MODULATIONS, generate_instance, get_modulation, save_instance
from .qubo import energies
from .sampler import SampleSet, run_sampler

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ConfigError", "OUTPUT_ROOT_ENV", "load_config", "resolve_config", "run_experiment"]

OUTPUT_ROOT_ENV = "HYBRIDANNEAL_OUTPUT_ROOT"
EXPERIMENTS = ("anneal", "compare", "sweep", "initstate", "simplify")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the field path."""


DEFAULTS = {
    "name": "experiment",
    "seed": 0,
    "output": None,
    "instances": {"users": 8, "modulation": "qpsk", "count": 10, "receive": None, "seeds": None},
    "engine": EngineParams().to_dict(),
    "pipeline": {"experiment": "anneal", "simplify": False},
    "anneal": {"schedule": "ra", "s_p": 0.41, "c_p": None, "t_a": 1.0, "t_p": 1.0,
               "n_samples": 10_000, "init": "greedy"},
    "compare": {"algorithms": ["FA", "RA-random", "RA-greedy"], "sp_grid": list(DEFAULT_SP_GRID),
                "n_samples": 10_000, "calibration_samples": 1000},
    "sweep": {"algorithms": ["FA", "RA-greedy", "FR"], "sp_grid": list(DEFAULT_SP_GRID), "cp_grid": None,
              "n_samples": 10_000, "C_t": 99.0, "t_a": 1.0, "t_p": 1.0},
    "initstate": {"delta": 2.0, "s_p": 0.41, "n_samples": 10_000, "pool_size": 20_000,
                  "states_per_bin": 5, "max_gap": 10.0},
    "simplify": {"modulations": ["bpsk", "qpsk", "qam16", "qam64"], "min_vars": 2, "max_vars": 48,
                 "n_instances": 50},
}

_NUMBER = (int, float)


def _check_type(path, value, expected):
    if value is None:
        return
    if expected is float:
        ok = isinstance(value, _NUMBER) and not isinstance(value, bool)
    elif expected is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, expected)
    if not ok:
        raise ConfigError(f"{path}: expected {getattr(expected, '__name__', expected)}, got {value!r}")


def _merge(defaults: dict, given: dict, path: str) -> dict:
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        where = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"{where}: unknown field")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where}: expected a table")
            out[key] = _merge(defaults[key], value, where)
            continue
        default = defaults[key]
        if default is not None:
            _check_type(where, value, float if isinstance(default, float) else type(default))
        out[key] = value
    return out


def _positive_int(cfg, section, key):
    v = cfg[section][key]
    _check_type(f"{section}.{key}", v, int)
    if v < 1:
        raise ConfigError(f"{section}.{key}: must be at least 1, got {v}")


def resolve_config(raw: dict) -> dict:
    """Fill defaults, validate, and pin per-instance seeds."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a table at top level")
    raw = {k: v for k, v in raw.items() if k not in ("outputs", "version")}
    cfg = _merge(DEFAULTS, raw, "")
    exp = cfg["pipeline"]["experiment"]
    if exp not in EXPERIMENTS:
        raise ConfigError(f"pipeline.experiment: must be one of {EXPERIMENTS}, got {exp!r}")
    try:
        EngineParams(**cfg["engine"])
    except (TypeError, ValueError) as err:
        raise ConfigError(f"engine: {err}") from None

    inst = cfg["instances"]
    if exp != "simplify":
        try:
            get_modulation(inst["modulation"])
        except (KeyError, ValueError):
            raise ConfigError(f"instances.modulation: unknown modulation {inst['modulation']!r}") from None
        _positive_int(cfg, "instances", "users")
        if inst["seeds"] is None:
            _check_type("instances.count", inst["count"], int)
            if inst["count"] < 1:
                raise ConfigError("instances.count: the instance list is empty")
            ss = np.random.SeedSequence(cfg["seed"])
            inst["seeds"] = [int(c.generate_state(1)[0]) for c in ss.spawn(inst["count"])]
        else:
            seeds = inst["seeds"]
            if not isinstance(seeds, list) or not seeds:
                raise ConfigError("instances.seeds: the instance list is empty")
            for k, s in enumerate(seeds):
                _check_type(f"instances.seeds[{k}]", s, int)
            inst["count"] = len(seeds)
    for grid_key in ("compare", "sweep"):
        grid = cfg[grid_key]["sp_grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError(f"{grid_key}.sp_grid: must be a non-empty list")
    for m in cfg["simplify"]["modulations"]:
        if m not in MODULATIONS:
            raise ConfigError(f"simplify.modulations: unknown modulation {m!r}")
    section = {"anneal": "anneal", "compare": "compare", "sweep": "sweep", "initstate": "initstate"}.get(exp)
    if section:
        _positive_int(cfg, section, "n_samples")
    return cfg


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"{path}: {err.strerror}") from None
    try:
        if path.suffix == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as err:
        raise ConfigError(f"{path}: {err}") from None


def default_output_dir(cfg: dict) -> Path:
    if cfg["output"]:
        return Path(cfg["output"])
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs")) / cfg["name"]


@dataclass
class RunResult:
    out_dir: Path
    files: list
    manifest: dict


def _write(out: Path, rel: str, text: str, files: list) -> None:
    p = out / rel
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    files.append(rel)


def _problems(cfg):
    inst = cfg["instances"]
    mod = get_modulation(inst["modulation"])
    out = []
    for k, s in enumerate(inst["seeds"]):
        mimo = generate_instance(inst["users"], mod, s, inst["receive"])
        out.append(make_problem(mimo, f"inst{k:03d}"))
    return out


def _run_anneal(cfg, problems, params, out, files):
    a = cfg["anneal"]
    sched = build_schedule(a["schedule"].upper(), a["s_p"], a["c_p"], a["t_a"], a["t_p"])
    _write(out, "schedule.csv", sched.to_csv(), files)
    rep = Report(("instance", "n_vars", "n_fixed", "p_star", "duration_us", "tts_us", "mean_delta_e"))
    for k, prob in enumerate(problems):
        seed = int(np.random.SeedSequence(cfg["seed"], spawn_key=(1, k)).generate_state(1)[0])
        qubo, simp = prob.qubo, None
        if cfg["pipeline"]["simplify"]:
            simp = prefix_simplify(prob.qubo)
            qubo = simp.reduced
        init = a["init"] if sched.starts_classical else None
        if qubo is None:
            states = simp.expand()[None, :].repeat(a["n_samples"], axis=0)
            ss = SampleSet(states, energies(prob.qubo, states), sched, seed, "fixed", params.to_dict())
        else:
            # with simplification on, greedy and sampling both see the reduced problem
            ss = run_sampler(qubo, sched, a["n_samples"], init, params, seed)
            if simp is not None:
                states = np.array([simp.expand(s) for s in ss.states])
                ss = SampleSet(states, energies(prob.qubo, states), sched, seed, ss.initial, ss.params)
        _write(out, f"samples/{prob.name}.json", json.dumps(ss.to_dict(), indent=1), files)
        p = success_probability(ss, prob.E_g)
        rep.add(instance=prob.name, n_vars=prob.qubo.n, n_fixed=0 if simp is None else simp.n_fixed,
                p_star=p, duration_us=float(sched.duration), tts_us=tts(p, float(sched.duration)),
                mean_delta_e=mean_delta_e(ss, prob.E_g))
    _write(out, "summary.csv", rep.to_csv(), files)
    _write(out, "summary.json", rep.to_json(), files)


def _run_compare(cfg, problems, params, out, files):
    c = cfg["compare"]
    comp = algorithm_comparison(problems, c["algorithms"], c["sp_grid"], c["n_samples"],
                                c["calibration_samples"], params, cfg["seed"])
    _write(out, "comparison.csv", comp.report.to_csv(), files)
    _write(out, "comparison.json", comp.report.to_json(), files)
    for algo, hist in comp.histograms.items():
        rep = histogram_report(hist)
        _write(out, f"histogram_{algo}.csv", rep.to_csv(), files)
        _write(out, f"histogram_{algo}.json", rep.to_json(), files)


def _run_sweep(cfg, problems, params, out, files):
    s = cfg["sweep"]
    rep = sweep_sp(problems, s["algorithms"], s["sp_grid"], s["C_t"], s["n_samples"], params,
                   cfg["seed"], s["cp_grid"], s["t_a"], s["t_p"])
    _write(out, "sweep.csv", rep.to_csv(), files)
    _write(out, "sweep.json", rep.to_json(), files)


def _run_initstate(cfg, problems, params, out, files):
    s = cfg["initstate"]
    for k, prob in enumerate(problems):
        rep = initial_state_study(prob, s["delta"], s["s_p"], s["n_samples"], params, cfg["seed"] + k,
                                  s["pool_size"], s["states_per_bin"], s["max_gap"])
        _write(out, f"initstate_{prob.name}.csv", rep.to_csv(), files)
        _write(out, f"initstate_{prob.name}.json", rep.to_json(), files)


def _run_simplify(cfg, out, files):
    s = cfg["simplify"]
    rep = simplification_study(s["modulations"], s["max_vars"], s["min_vars"], s["n_instances"], cfg["seed"])
    _write(out, "simplification.csv", rep.to_csv(), files)
    _write(out, "simplification.json", rep.to_json(), files)


def run_experiment(config, out_dir=None) -> RunResult:
    """Run a config (dict, or path to a TOML/JSON file) and write its artifacts.

    ``out_dir`` overrides the config's ``output``; without either the run goes
    to ``$HYBRIDANNEAL_OUTPUT_ROOT/<name>`` (default root ``runs``).
    """
    raw = load_config(config) if isinstance(config, (str, Path)) else config
    cfg = resolve_config(raw)
    out = Path(out_dir) if out_dir is not None else default_output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    params = EngineParams(**cfg["engine"])
    files: list[str] = []
    exp = cfg["pipeline"]["experiment"]
    if exp == "simplify":
        _run_simplify(cfg, out, files)
    else:
        problems = _problems(cfg)
        for prob in problems:
            rel = f"instances/{prob.name}.json"
            (out / "instances").mkdir(exist_ok=True)
            save_instance(prob.source, out / rel)
            files.append(rel)
        {"anneal": _run_anneal, "compare": _run_compare, "sweep": _run_sweep,
         "initstate": _run_initstate}[exp](cfg, problems, params, out, files)

    from . import __version__

    manifest = dict(cfg)
    manifest["output"] = None
    manifest["version"] = __version__
    manifest["outputs"] = {rel: hashlib.sha256((out / rel).read_bytes()).hexdigest() for rel in sorted(files)}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return RunResult(out, sorted(files), manifest)
