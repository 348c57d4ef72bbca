"""Filtered tactics lose links over time.

A link whose round-trip echo goes stale is dropped for good, so the
fraction of efficient links an agent still knows (U_r) keeps falling.
The top-up variants slow this down at the price of extra messages.
"""
from swarmcomm import SimParams, er_env, init_world, run, u_r

env = er_env(20, 0.284, seed=2)
marks = list(range(10_000, 60_001, 10_000))

print("tactic      " + "  ".join(f"{m // 1000:>4d}k" for m in marks) + "   links left")
for tactic in ("timer", "filtered", "filtered+", "filtered++"):
    p = SimParams.from_gamma_bar(0.2, n=20, k_period=200, phi_min=0.0, tactic=tactic, seed=3)
    w = init_world(p, env)
    row = []
    for m in marks:
        run(w, m - w.tick)
        row.append(u_r(w.beliefs, env, 0.75))
    left = w.log.link_enabled.sum() / (20 * 19)
    print(f"{tactic:10s}  " + "  ".join(f"{v:5.3f}" for v in row) + f"   {left:.2f}")
