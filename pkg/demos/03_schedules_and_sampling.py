"""Annealing schedules and the simulated annealer.

Builds forward, reverse and forward-reverse schedules, then samples an
8-user QPSK problem with reverse annealing from the greedy state and with
plain forward annealing.
"""

from hybridanneal import (
    EngineParams,
    energy,
    generate_instance,
    mimo_to_qubo,
    run_sampler,
    schedule_fa,
    schedule_fr,
    schedule_ra,
    success_probability,
    tts,
)

for sched in (schedule_fa(1, 1, 0.41), schedule_ra(1, 0.41), schedule_fr(1, 1, 0.33, 0.49)):
    pts = ", ".join(f"({float(t):g}, {float(s):g})" for t, s in sched.breakpoints)
    print(f"{sched.kind}: {pts}  duration {float(sched.duration):g} us")

# %% sample; fewer sweeps per microsecond keep this quick
inst = generate_instance(8, "qpsk", seed=500)
qubo = mimo_to_qubo(inst)
E_g = energy(qubo, inst.tx_bits)
params = EngineParams(mode="sqa", sweeps_per_microsecond=10)

fa = schedule_fa(1, 1, 0.97)
ra = schedule_ra(1, 0.97)
for label, sched, init in (("FA", fa, None), ("RA from greedy", ra, "greedy")):
    ss = run_sampler(qubo, sched, 2000, init, params, seed=1)
    p = success_probability(ss, E_g)
    print(f"{label:>15}: p* = {p:.3f}, TTS(99%) = {tts(p, float(sched.duration)):.2f} us")
