"""Command-line entry point (``hybridanneal`` / ``python -m hybridanneal``).

Exit codes: 0 success, 2 configuration or usage error, 3 verification
failure, 4 brute-force size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import build_schedule, initial_state_study, make_problem, sweep_sp
from .classical import BRUTE_FORCE_CAP, BruteForceCapError, brute_force, greedy_search, prefix_simplify
from .engine import EngineParams
from .experiment import OUTPUT_ROOT_ENV, ConfigError, default_output_dir, load_config, resolve_config, run_experiment
from .metrics import success_probability, tts
from .mimo import MODULATIONS, generate_instance, load_instance, mimo_to_qubo, save_instance
from .qubo import QuboInstance, energy, load_qubo, save_qubo
from .sampler import DEFAULT_NUM_SAMPLES, run_sampler
from .verification import verify_directory

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_CAP = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as err:
        raise ConfigError(f"{path}: {err}") from None


def _load_problem(path):
    """Instance or QUBO file -> (QuboInstance, MimoInstance | None)."""
    data = _read_json(path)
    if "H" in data:
        inst = load_instance(path)
        return mimo_to_qubo(inst), inst
    return load_qubo(path), None


def _bits(q) -> str:
    return "".join(str(int(b)) for b in q)


def _engine(args) -> EngineParams:
    kw = {"mode": args.mode}
    for name in ("trotter_slices", "base_temperature", "sweeps_per_microsecond", "gamma0"):
        value = getattr(args, name)
        if value is not None:
            kw[name] = value
    try:
        return EngineParams(**kw)
    except ValueError as err:
        raise ConfigError(f"engine: {err}") from None


def _add_engine_args(p):
    p.add_argument("--mode", choices=("sqa", "sa"), default="sqa")
    p.add_argument("--trotter-slices", dest="trotter_slices", type=int)
    p.add_argument("--base-temperature", dest="base_temperature", type=float)
    p.add_argument("--spu", dest="sweeps_per_microsecond", type=float, help="sweeps per microsecond")
    p.add_argument("--gamma0", type=float)
    p.add_argument("--seed", type=int, default=0)


def cmd_generate(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        inst = generate_instance(args.users, args.mod, args.seed + k, args.receive)
        stem = f"{args.mod}_u{args.users}_s{args.seed + k}"
        save_instance(inst, out / f"{stem}.json")
        save_qubo(mimo_to_qubo(inst), out / f"{stem}.qubo.json")
        print(out / f"{stem}.json")
    return EXIT_OK


def cmd_reduce(args):
    qubo = mimo_to_qubo(load_instance(args.input))
    if args.out:
        save_qubo(qubo, args.out)
    else:
        print(json.dumps(qubo.to_dict()))
    return EXIT_OK


def cmd_simplify(args):
    rows = {}
    for path in args.input:
        qubo, inst = _load_problem(path)
        simp = prefix_simplify(qubo)
        if args.out and simp.reduced is not None and len(args.input) == 1:
            save_qubo(simp.reduced, args.out)
        key = (qubo.n, inst.modulation.key if inst is not None else "qubo")
        rows.setdefault(key, []).append(simp.n_fixed)
        if not args.report:
            print(json.dumps({"file": str(path), "n_vars": qubo.n, "n_fixed": simp.n_fixed,
                              "fixed": {str(i): v for i, v in simp.fixed.items()}}))
    if args.report:
        print("n_vars,modulation,ratio_simplified,avg_fixed")
        for (n, mod), counts in sorted(rows.items()):
            counts = np.array(counts)
            hit = counts > 0
            avg = float(counts[hit].mean()) if hit.any() else 0.0
            print(f"{n},{mod},{float(hit.mean())!r},{avg!r}")
    return EXIT_OK


def cmd_solve(args):
    qubo, inst = _load_problem(args.input)
    if args.algo == "greedy":
        q = greedy_search(qubo, order=args.order)
        out = {"algo": "greedy", "bits": _bits(q), "energy": energy(qubo, q)}
    else:
        gs = brute_force(qubo, max_vars=args.max_vars)
        out = {"algo": "oracle", "energy": gs.energy, "ground_states": [_bits(s) for s in gs.states]}
    out["offset"] = qubo.offset
    print(json.dumps(out))
    return EXIT_OK


def _initial(args, qubo):
    if args.init == "file":
        if not args.init_file:
            raise ConfigError("--init file requires --init-file")
        text = Path(args.init_file).read_text().strip()
        if text.startswith("{"):
            text = json.loads(text)["bits"]
        return np.array([int(ch) for ch in text], dtype=np.uint8)
    return args.init


def cmd_anneal(args):
    qubo, inst = _load_problem(args.input)
    try:
        sched = build_schedule(args.schedule.upper(), args.sp, args.cp, args.ta, args.tp)
    except (ValueError, TypeError) as err:
        raise ConfigError(f"schedule: {err}") from None
    init = _initial(args, qubo) if sched.starts_classical else None
    ss = run_sampler(qubo, sched, args.ns, init, _engine(args), args.seed)
    text = json.dumps(ss.to_dict(), indent=1)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    if args.schedule_csv:
        Path(args.schedule_csv).write_text(sched.to_csv())
    if inst is not None:
        E_g = energy(qubo, inst.tx_bits)
        p = success_probability(ss, E_g)
        print(f"p_star={p!r} tts_us={tts(p, float(sched.duration))!r}", file=sys.stderr)
    return EXIT_OK


def _out_dir(args, name):
    if args.out:
        return Path(args.out)
    return default_output_dir({"output": None, "name": name})


def _mimo_problems(paths):
    problems = []
    for path in paths:
        data = _read_json(path)
        if "H" not in data:
            raise ConfigError(f"{path}: an instance file is required (the ground energy comes from tx_bits)")
        problems.append(make_problem(load_instance(path), Path(path).stem))
    return problems


def _grid(text):
    return [float(v) for v in text.split(",")] if text else None


def cmd_sweep(args):
    problems = _mimo_problems(args.input)
    kw = {}
    if args.grid:
        kw["sp_grid"] = _grid(args.grid)
    rep = sweep_sp(problems, args.algos.split(","), C_t=args.ct, n_samples=args.ns, params=_engine(args),
                   seed=args.seed, cp_grid=_grid(args.cp_grid), t_a=args.ta, t_p=args.tp, **kw)
    out = _out_dir(args, "sweep-sp")
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(rep.to_csv())
    (out / "sweep.json").write_text(rep.to_json())
    print(out / "sweep.csv")
    return EXIT_OK


def cmd_initstate(args):
    (prob,) = _mimo_problems([args.input])
    rep = initial_state_study(prob, args.delta, args.sp, args.ns, _engine(args), args.seed,
                              args.pool, args.per_bin)
    out = _out_dir(args, "initstate-study")
    out.mkdir(parents=True, exist_ok=True)
    (out / "initstate.csv").write_text(rep.to_csv())
    (out / "initstate.json").write_text(rep.to_json())
    for flag in rep.flags:
        print(f"note: {flag}", file=sys.stderr)
    print(out / "initstate.csv")
    return EXIT_OK


def cmd_verify(args):
    results = verify_directory(args.dir)
    if not results:
        print(f"no instances found in {args.dir}", file=sys.stderr)
        return EXIT_VERIFY
    failed = 0
    for r in results:
        status = "ok" if r.ok else "FAIL"
        print(f"{status:4s} {r.mode:10s} N_v={r.n_vars:<3d} {r.name} {r.message}".rstrip())
        failed += not r.ok
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_run(args):
    raw = load_config(args.config)
    if args.seed is not None:
        raw = dict(raw, seed=args.seed)
        raw.get("instances", {}).pop("seeds", None)
    if args.name:
        raw = dict(raw, name=args.name)
    resolve_config(raw)  # validate before touching the disk
    result = run_experiment(raw, args.out)
    for rel in result.files:
        print(result.out_dir / rel)
    print(result.out_dir / "manifest.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hybridanneal", description="MIMO detection via greedy search and simulated annealing schedules.",
                epilog=f"Default output root: ${OUTPUT_ROOT_ENV} (falls back to ./runs).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write random noiseless instances")
    g.add_argument("--users", type=int, required=True)
    g.add_argument("--mod", choices=sorted(MODULATIONS), required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--receive", type=int, help="receive antennas (default: users)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("reduce", help="instance -> QUBO file")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("simplify", help="variable fixing on QUBO or instance files")
    s.add_argument("--in", dest="input", nargs="+", required=True)
    s.add_argument("--report", action="store_true", help="CSV of ratio_simplified and avg_fixed")
    s.add_argument("--out", help="write the reduced QUBO (single input only)")
    s.set_defaults(func=cmd_simplify)

    v = sub.add_parser("solve", help="classical solvers")
    v.add_argument("--algo", choices=("greedy", "oracle"), required=True)
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--order", choices=("descending", "ascending"), default="descending")
    v.add_argument("--max-vars", type=int, default=BRUTE_FORCE_CAP)
    v.set_defaults(func=cmd_solve)

    a = sub.add_parser("anneal", help="sample one schedule")
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--schedule", choices=("fa", "ra", "fr"), required=True)
    a.add_argument("--sp", type=float, required=True)
    a.add_argument("--cp", type=float)
    a.add_argument("--ta", type=float, default=1.0)
    a.add_argument("--tp", type=float, default=1.0)
    a.add_argument("--ns", type=int, default=DEFAULT_NUM_SAMPLES)
    a.add_argument("--init", choices=("greedy", "random", "file"), default="greedy")
    a.add_argument("--init-file")
    a.add_argument("--out")
    a.add_argument("--schedule-csv", help="also write the schedule breakpoints")
    _add_engine_args(a)
    a.set_defaults(func=cmd_anneal)

    w = sub.add_parser("sweep-sp", help="p* and TTS across pause locations")
    w.add_argument("--in", dest="input", nargs="+", required=True)
    w.add_argument("--algos", default="FA,RA-greedy,FR")
    w.add_argument("--grid", help="comma-separated s_p values (default 0.25..0.97 step 0.04)")
    w.add_argument("--cp-grid")
    w.add_argument("--ct", type=float, default=99.0)
    w.add_argument("--ta", type=float, default=1.0)
    w.add_argument("--tp", type=float, default=1.0)
    w.add_argument("--ns", type=int, default=DEFAULT_NUM_SAMPLES)
    w.add_argument("--out")
    _add_engine_args(w)
    w.set_defaults(func=cmd_sweep)

    i = sub.add_parser("initstate-study", help="RA success vs. start-state quality")
    i.add_argument("--in", dest="input", required=True)
    i.add_argument("--delta", type=float, default=2.0)
    i.add_argument("--sp", type=float, default=0.41)
    i.add_argument("--ns", type=int, default=DEFAULT_NUM_SAMPLES)
    i.add_argument("--pool", type=int, default=20_000)
    i.add_argument("--per-bin", type=int, default=5)
    i.add_argument("--out")
    _add_engine_args(i)
    i.set_defaults(func=cmd_initstate)

    c = sub.add_parser("verify", help="reduction and ground-truth checks on an instance directory")
    c.add_argument("dir")
    c.set_defaults(func=cmd_verify)

    x = sub.add_parser("run", help="config-driven experiment (TOML config or manifest.json)")
    x.add_argument("--config", required=True)
    x.add_argument("--out", help="output directory (overrides the config)")
    x.add_argument("--seed", type=int, help="master seed (overrides the config)")
    x.add_argument("--name", help="run name (overrides the config)")
    x.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except BruteForceCapError as err:
        print(f"resource cap: {err}", file=sys.stderr)
        return EXIT_CAP
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
