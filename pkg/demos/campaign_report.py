# %% [markdown]
# A small seeded campaign over every algorithm/optimizer pair, written to
# disk and summarized. The same thing is available as
# ``benqo-bench run --config cfg.json --out-dir out``.

# %%
from pathlib import Path

from benqo.bench import CampaignConfig, load_records, report, run_campaign, write_records

cfg = CampaignConfig(problem="tsp", sizes=[3, 4], runs=5, base_seed=7, budget=300, benqo_backend="analytic")
records = run_campaign(cfg)
out = Path("campaign_out")
write_records(records, out)
for path in report(load_records(out), out):
    print(path)

# %%
print((out / "summary.csv").read_text())
print((out / "lr_table.csv").read_text())
