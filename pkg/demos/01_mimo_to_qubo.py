"""From a MIMO channel to a QUBO, and back.

Generates a small noiseless 16-QAM uplink, turns maximum-likelihood
detection into a QUBO and checks that the QUBO energy plus its offset is the
squared residual ``||y - H x(q)||^2`` for every bitstring.
"""

import numpy as np

from hybridanneal import brute_force, energy, generate_instance, mimo_to_qubo, residual_norm_sq
from hybridanneal.mimo import symbols_of_bits

inst = generate_instance(2, "qam16", seed=11)
qubo = mimo_to_qubo(inst)
print(f"{inst.num_users} users, {inst.num_receive} receive antennas, {qubo.n} binary variables")
print("transmitted symbols:", np.round(symbols_of_bits(inst.tx_bits, inst.modulation), 3))

# %% every bitstring of the 8-variable problem
worst = 0.0
for k in range(2 ** qubo.n):
    q = np.array([(k >> (qubo.n - 1 - i)) & 1 for i in range(qubo.n)], dtype=np.uint8)
    worst = max(worst, abs(energy(qubo, q) + qubo.offset - residual_norm_sq(inst, q)))
print(f"largest |energy + offset - residual| over all {2 ** qubo.n} states: {worst:.2e}")

# %% without noise the transmitted bits are the optimum
gs = brute_force(qubo)
print("ground energy + offset:", round(gs.energy + qubo.offset, 12))
print("tx_bits among the ground states:", any(np.array_equal(s, inst.tx_bits) for s in gs.states))
