"""Steady-state belief accuracy of the continuum model.

Prints a coarse (r, phi_min) table of the symmetric steady state and one
asymmetric pair, then checks the closed form against direct integration.
"""
import numpy as np

from swarmcomm import (BeliefMatrix, ContinuumSystem, Environment, RatePair, integrate_rate_equations,
                       steady_state_pair, steady_state_symmetric)

r_grid = np.linspace(0, 2, 9)
pm_grid = [0.0, 0.1, 0.2, 0.3, 0.5]

print("phi at steady state (rows r, columns phi_min)")
print("  r    " + "  ".join(f"{pm:5.2f}" for pm in pm_grid))
for r in r_grid:
    print(f"{r:5.2f}  " + "  ".join(f"{steady_state_symmetric(r, pm):5.3f}" for pm in pm_grid))

# with no floor, knowledge collapses once loss outpaces messaging (r >= 1)
print("\nphi_min = 0:", [round(steady_state_symmetric(r, 0.0), 3) for r in (0.5, 1.0, 1.5)])

# a lopsided pair: a hears from b often (r = 0.5), b rarely hears from a (r' = 2)
ab, ba = steady_state_pair(RatePair(0.5, 2.0, 0.1))
print(f"\nasymmetric pair r=0.5, r'=2, phi_min=0.1: phi_ab={ab:.4f} phi_ba={ba:.4f}")

alpha = np.array([[0.0, 0.5], [2.0, 0.0]])
sys_ = ContinuumSystem(alpha, Environment(np.ones((2, 2))), 1.0, 0.1)
out = integrate_rate_equations(sys_, BeliefMatrix.floor(2, 0.1), 0.01, 500.0)
print(f"integrated from the floor:               phi_ab={out.phi[0, 1]:.4f} phi_ba={out.phi[1, 0]:.4f}")
