"""Loss sweep in a flat environment (all links L = 0.95).

Runs Timer and Random across normalised loss values and prints swarm
accuracy, thresholded accuracy, risk and how often the swarm is completely
connected. Takes about a minute.
"""
from swarmcomm import SimParams, flat_env, sweep

env = flat_env(20, 0.95)
grid = [0.02, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0]

for tactic in ("timer", "random"):
    base = SimParams(n=20, k_period=200, phi_min=0.1, tactic=tactic, seed=0,
                     ticks_burnin=5_000, ticks_measure=10_000)
    print(f"\n{tactic}")
    print(" gamma_bar  phi_hat  phi_hat_T  risk   ccs")
    for res in sweep(base, env, grid):
        s = res.summary
        print(f"  {s['gamma_bar']:6.2f}   {s['phi_hat']:.3f}    {s['phi_hat_T']:.3f}   "
              f"{s['risk_norm']:.3f}  {s['ccs_fraction']:.2f}")

# the thresholded measure collapses with the swarm: once few beliefs exceed
# 0.75 each agent is normalised by ln N instead of its tiny neighbour count
