# %% [markdown]
# Loss landscapes on a random plane through the origin for a 9-node MaxCut
# instance. BENQO shows one broad peak at the center; QAOA's surface is
# flatter and more rugged.

# %%
from pathlib import Path

from benqo.bench import build_instance, sample_landscape

inst = build_instance("maxcut", 9, seed=21)
out = Path("landscapes")
out.mkdir(exist_ok=True)
for alg in ("benqo", "qaoa", "vqe"):
    grid = sample_landscape(alg, inst.model, seed=0, resolution=51)
    (out / f"landscape_{alg}_0.csv").write_text(grid.to_csv())
    print(f"{alg:6s} range={grid.value_range:8.2f} center={grid.values[25, 25]:8.2f} max={grid.values.max():8.2f}")

# %% plot if matplotlib is around
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, alg in zip(axes, ("benqo", "qaoa")):
        g = sample_landscape(alg, inst.model, seed=0, resolution=51)
        ax.imshow(g.values.T, origin="lower", extent=[g.ticks[0], g.ticks[-1]] * 2)
        ax.set_title(alg)
    fig.savefig(out / "landscapes.png", dpi=100)
