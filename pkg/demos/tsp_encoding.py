# %% [markdown]
# Traveling salesman on 4 cities: one-hot QUBO encoding, the feasible
# subspace, and what BENQO converges to.

# %%
import numpy as np

from benqo.blockencoding import BenqoLoss
from benqo.metrics import feasibility_ratio, length_ratio
from benqo.optimizers import initial_parameters, ngd_minimize
from benqo.problems import random_complete_graph, tour_extremes, tsp_encode
from benqo.statevector import most_probable, uniform_state

graph = random_complete_graph(4, 0, 100, seed=8)
print(np.round(graph.matrix(), 1))
enc = tsp_encode(graph)
print("variables:", enc.var_count, "penalty:", enc.penalty)

# %% every feasible state's QUBO cost is its tour length
tours = tour_extremes(enc)
for k, length in zip(enc.feasible_indices, enc.tour_lengths):
    print(k, length)
print("optimal", tours.l_opt, "longest", tours.l_max)

# %%
psi0 = uniform_state(enc.var_count)
print("uniform FR", feasibility_ratio(psi0, enc.feasible_indices), "LR", length_ratio(psi0, enc, tours))

# %% BENQO on the 9-variable Ising model (11 qubits in the circuit)
loss = BenqoLoss(enc.ising)
trace = ngd_minimize(loss, initial_parameters("benqo-normal", enc.var_count, seed=0))
psi = loss.state(trace.final_theta)
bits = most_probable(psi)
print("FR", feasibility_ratio(psi, enc.feasible_indices), "LR", length_ratio(psi, enc, tours))
print("decoded tour:", enc.decode(bits) if enc.is_feasible(bits) else "infeasible")
print(enc.grid(bits))
