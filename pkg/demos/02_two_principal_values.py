#!/usr/bin/env python3
"""Guarantee and punishment values for two competing principals.

With two principals the best payoff P1 can lock in unilaterally (maxmin)
coincides with the worst payoff P2 can force on him (minmax).  The demo
computes both routes on the matching-pennies game, recovers the punishment
profile with its best response, and runs the payoff-floor membership test
on two candidate profiles.
"""

import numpy as np

import mechpoly as mp

g = mp.matching_pennies_game()
print("matching pennies:", g.principal_ids, "actions", g.action_spaces)

for j, pid in enumerate(g.principal_ids):
    lo = mp.maxmin(g, j, mode="exact")
    hi = mp.minmax(g, j, mode="exact2")
    print(f"{pid}: maxmin {lo.value:.6f} ({lo.kind})  "
          f"minmax {hi.value:.6f} ({hi.kind})  diff {abs(lo.value - hi.value):.2e}")

# The witness of the minmax certificate is the opponent profile that
# holds P1 down to his floor; his best response against it attains it.
punishers, floor = mp.punishment_profile(g, 0, mode="exact2")
print("\npunishment against P1:")
for k, dm in sorted(punishers.items()):
    print(f"  {g.principal_ids[k]} plays {np.round(dm.p, 4).tolist()}")
val, br = mp.best_response(g, 0, punishers)
print(f"best response value {val:.6f} (floor {floor:.6f}), "
      f"table {np.round(br.p, 4).tolist()}")

certs = [mp.minmax(g, j, mode="exact2") for j in range(2)]

uniform = [mp.DirectMechanism(owner=j, p=[[0.5, 0.5]]) for j in range(2)]
v = mp.robust_pbe_membership(g, uniform, certs)
print(f"\nuniform profile: {v.verdict}")
for row in v.per_principal:
    print(f"  {row['principal']}: payoff {row['payoff']:.4f} "
          f"vs bound {row['bound']:.4f} (slack {row['slack']:+.4f})")

# Pure (H, T) hands P2 the whole surplus, so P1 sits below his floor.
lopsided = [mp.DirectMechanism(owner=0, p=[[1.0, 0.0]]),
            mp.DirectMechanism(owner=1, p=[[0.0, 1.0]])]
v = mp.robust_pbe_membership(g, lopsided, certs)
print(f"\npure (H, T) profile: {v.verdict}")
for row in v.per_principal:
    print(f"  {row['principal']}: payoff {row['payoff']:.4f} "
          f"vs bound {row['bound']:.4f} (slack {row['slack']:+.4f})")
