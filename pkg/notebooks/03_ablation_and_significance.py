"""
Which stage earns its keep
==========================

Switch pre-filtering and the shared boundary off one at a time, then ask
whether Prefap's advantage over FTJ survives a one-sided Welch t-test.
"""

# %%
from prefap import Config, ThetaOp
from prefap.bench import run_ablation, run_join, significance, synthetic_source

source = synthetic_source(["zipf:1.2", "zipf:1.3"], 1000)
cfg = Config(theta=(ThetaOp.GT,))

# %%
report = run_ablation(source, cfg, repeat=30)
for variant, deltas in report.extra["deltas"].items():
    print(f"{variant:<26} pairs {deltas['cartesian_count']:+.1%}  lb_in {deltas['lb_in']:+.1%}")

# %%
both, _ = run_join(source, cfg, repeat=30)
ftj, _ = run_join(source, Config(theta=(ThetaOp.GT,), algorithm="ftj"), repeat=30)
both.runs += ftj.runs
for metric, row in significance(both, "prefap", "ftj").items():
    nlp = row["neg_log_p"]
    print(f"{metric:<16} -log(p) = {'inf' if nlp is None else f'{nlp:.2f}'}")
