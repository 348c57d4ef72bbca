"""Seed-to-seed spread of a single configuration.

Runs a small ensemble and reports the median and interquartile range of
each summary metric, plus the detection probability implied by the risk.
"""
from swarmcomm import SimParams, aggregate, detection_probability, ensemble, flat_env

p = SimParams.from_gamma_bar(0.3, n=20, k_period=200, phi_min=0.1, tactic="timer",
                             ticks_burnin=5_000, ticks_measure=10_000)
results = ensemble(p, flat_env(20, 0.95), seeds=range(6))
summaries = [s for s, _ in results]

for s in summaries:
    print(f"seed {s['seed']}: phi_hat={s['phi_hat']:.3f} risk={s['risk_norm']:.3f}")

agg = aggregate(summaries)
print()
for key, v in agg.items():
    print(f"{key:13s} median {v['median']:.3f}  IQR {v['iqr']:.3f}")

# normalised risk 1 means (N-1)/K messages per tick per agent; give every
# message a small hazard xi to turn the send rate into a detection chance
xi = 0.01
rate = xi * agg["risk_norm"]["median"] * p.reference_rate / p.tau
for cycles in (1, 10):
    t = cycles * p.k_period * p.tau
    print(f"\nxi={xi}: chance one agent is detected within {cycles} K-tick cycle(s): "
          f"{detection_probability(rate, t):.3f}", end="")
print()
