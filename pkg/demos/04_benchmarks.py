"""Benchmark harnesses: pause-point sweeps and the algorithm comparison.

A reduced version of the pause-point sweep and the three-way comparison of
forward annealing with reverse annealing from random and greedy starts.
Sample counts are small so the script finishes in a minute or two.
"""

from hybridanneal import EngineParams, algorithm_comparison, generate_instance, make_problem, sweep_sp

params = EngineParams(mode="sqa", sweeps_per_microsecond=10)
problems = [make_problem(generate_instance(8, "qpsk", seed=500 + k), f"inst{k}") for k in range(3)]

# %% p* against the pause point
rep = sweep_sp(problems[:1], ("FA", "RA-greedy"), [0.57, 0.77, 0.89, 0.97], n_samples=500, params=params)
for row in rep.rows:
    print(f"{row['algo']:>9} s_p={row['s_p']:.2f}  p*={row['p_star']:.3f}  TTS={row['tts_us']:.1f} us")

# %% mean dE% at each algorithm's calibrated pause point
comp = algorithm_comparison(problems, sp_grid=[0.77, 0.89, 0.97], n_samples=500,
                            calibration_samples=200, params=params, seed=5)
for algo, hist in comp.histograms.items():
    print(f"{algo:>9}: s_p={comp.s_p[algo]:.2f}  mean dE%={hist.mean():.2f}")
