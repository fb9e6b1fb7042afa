# %% [markdown]
# Gate and measurement counts for BENQO, VQE and QAOA, next to the gates
# actually emitted by the circuit builder.

# %%
import numpy as np

from benqo.baselines import default_layers
from benqo.blockencoding import RESOURCE_TABLE_NOTE, block_encode, hadamard_test_circuit, resource_count
from benqo.problems import IsingModel

print(f"{'n':>3} {'alg':>6} {'qubits':>7} {'cnots':>6} {'rot':>5} {'H':>4} {'bases':>6}")
for n in (3, 5, 9, 16):
    for alg in ("BENQO", "VQE", "QAOA"):
        r = resource_count(alg, n, default_layers(n) if alg == "QAOA" else None)
        print(f"{n:3d} {alg:>6} {r.qubits:7d} {r.cnots:6d} {r.rotations:5d} {r.hadamards:4d} {r.bases:6d}")
print(RESOURCE_TABLE_NOTE)

# %% emitted circuit for n = 3 (CRY counts as 2 CNOT + 2 RY once decomposed)
circ = hadamard_test_circuit(block_encode(IsingModel.from_terms(3)), np.zeros(3))
print(circ.counts())
