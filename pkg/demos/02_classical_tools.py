"""Greedy search and prefix simplification on MIMO QUBOs.

Greedy search gives a cheap classical answer; the prefix rules fix
variables whose linear term outweighs all their couplings.  Simplification
fires on small problems and dies out as the system grows.
"""

import numpy as np

from hybridanneal import delta_e_percent, energy, generate_instance, greedy_search, mimo_to_qubo, prefix_simplify
from hybridanneal.bench import simplification_study

# %% greedy quality on 9-user 16-QAM (36 variables); E_g is exact because there is no noise
gaps = []
for seed in range(20):
    inst = generate_instance(9, "qam16", seed=seed)
    qubo = mimo_to_qubo(inst)
    E_g = energy(qubo, inst.tx_bits)
    gaps.append(delta_e_percent(energy(qubo, greedy_search(qubo)), E_g))
gaps = np.array(gaps)
print(f"greedy dE%: median {np.median(gaps):.2f}, share <= 10%: {np.mean(gaps <= 10):.2f}")

# %% one simplification, expanded back to the full problem
inst = generate_instance(3, "bpsk", seed=3)
qubo = mimo_to_qubo(inst)
simp = prefix_simplify(qubo)
print(f"fixed {simp.n_fixed} of {inst.num_variables} variables: {simp.fixed}")
q = simp.expand(greedy_search(simp.reduced))
full = energy(qubo, q) + qubo.offset
reduced = energy(simp.reduced, q[list(simp.free)]) + simp.reduced.offset
print("expanded:", q, "same energy:", np.isclose(full, reduced))

# %% how often simplification fires, by size
rep = simplification_study(("bpsk", "qpsk"), max_vars=24, n_instances=50, seed=0)
for row in rep.rows[::4]:
    print(f"{row['modulation']:>5} n={row['n_vars']:2d}  ratio={row['ratio_simplified']:.2f}")
