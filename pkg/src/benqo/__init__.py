"""Block-encoding quantum optimizer with QAOA/VQE baselines on an exact statevector simulator."""
