# %% [markdown]
# MaxCut with the block-encoding optimizer, compared against QAOA and the
# uniform superposition on one random 5-node graph.

# %%
import numpy as np

from benqo.baselines import QaoaLoss
from benqo.blockencoding import BenqoLoss, block_encode
from benqo.metrics import approximation_ratio
from benqo.optimizers import initial_parameters, ngd_minimize
from benqo.problems import brute_force_extrema, maxcut_ising, random_complete_graph
from benqo.statevector import most_probable, uniform_state

graph = random_complete_graph(5, 0, 10, seed=3)
model = maxcut_ising(graph)
ext = brute_force_extrema(model)
print("C_min", ext.c_min, "C_max", ext.c_max)
print("scale K =", block_encode(model).K)

# %% BENQO starts near theta = 0, which is the loss maximum for positive weights
benqo = BenqoLoss(model)
trace = ngd_minimize(benqo, initial_parameters("benqo-normal", model.n, seed=1), k_max=20)
for step in trace.iterations[::4]:
    ar = approximation_ratio(benqo.state(step.theta), model, ext)
    print(f"k={step.k:2d} loss={step.loss:9.3f} AR={ar:.3f}")
print("most probable cut:", most_probable(benqo.state(trace.final_theta)))
print("optimal cuts:", [b.tolist() for b in ext.argmin_set])

# %% QAOA with p = ceil(n/2) layers, same optimizer and step budget
qaoa = QaoaLoss(model)
qtrace = ngd_minimize(qaoa, initial_parameters("uniform", qaoa.n_params, seed=1), k_max=20)
print("QAOA final AR   ", approximation_ratio(qaoa.state(qtrace.final_theta), model, ext))
print("uniform state AR", approximation_ratio(uniform_state(model.n), model, ext))
