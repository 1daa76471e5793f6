#!/usr/bin/env python3
"""Support a payoff-floor profile with deviator-reporting mechanisms.

Three agents each tell every principal which principal deviated (plus their
own type).  On path nobody deviates and the default tables are played; if a
strict majority names principal j, the others switch to their punishment
tables against j.  The demo checks that this construction survives the
robust equilibrium test on matching pennies, then shows the same machinery
rejecting a profile that underpays P2.
"""

import numpy as np

import mechpoly as mp

g = mp.matching_pennies_game()
certs = [mp.minmax(g, j, mode="exact2") for j in range(2)]
floors = [c.value for c in certs]
print("floors:", [round(f, 6) for f in floors])

# Candidate on-path play: both principals randomize evenly.  It pays each
# principal exactly his floor, so it is a floor member.
member = [mp.DirectMechanism(owner=j, p=[[0.5, 0.5]]) for j in range(2)]
pays = [mp.expected_principal_payoff(g, j, member) for j in range(2)]
print("candidate payoffs:", [round(p, 6) for p in pays])

drms = []
for k in range(2):
    other = 1 - k
    drms.append(mp.build_deviator_reporting(
        g, k, member[k], {other: certs[other].witness[k]}))
print(f"\nreporting mechanism for P1: {len(drms[0].principal_messages)} "
      f"principal message(s), agent messages {drms[0].agent_messages[0]}")

strat = mp.deviator_truthful_strategies(g, drms)

# P2 may walk away to any finite mechanism.  Offer him the full menu of
# his polytope vertices plus an arbitrary message game.
rng = np.random.default_rng(3)
menu = mp.build_type_and_dm_mechanism(g, 1, mp.enumerate_vertices(g, 1))
wild = mp.GeneralMechanism(
    owner=1,
    principal_messages=("d0", "d1"),
    agent_messages=(("s0", "s1"),) * 3,
    outcome=rng.dirichlet(np.ones(2), size=16).reshape(2, 2, 2, 2, 2))
verdict = mp.check_equilibrium_notion(
    g, drms, strat, {1: [menu, wild]}, notion="robust", tol=1e-6)
print(f"\nrobust check for the floor member: ok={verdict.ok}")
for c in verdict.checks:
    print(f"  {c['principal']} deviation {c['deviation']}: value {c['value']:.4f} "
          f"vs equilibrium {c['equilibrium_payoff']:.4f} "
          f"({c['n_continuation_equilibria']} continuation equilibria)")

# Now a profile that underpays P2: pure (H, H) gives him zero.  Backing it
# with plain standard mechanisms, the best-response menu deviation beats it.
bad = [mp.DirectMechanism(owner=0, p=[[1.0, 0.0]]),
       mp.DirectMechanism(owner=1, p=[[1.0, 0.0]])]
print("\nunderpaying profile pays P2", mp.expected_principal_payoff(g, 1, bad))
mechs = [mp.standard_from_direct(g, dm) for dm in bad]
_, br = mp.best_response(g, 1, bad)
dev = mp.build_type_and_dm_mechanism(g, 1, [br])
verdict = mp.check_equilibrium_notion(
    g, mechs, mp.truthful_strategies(g, mechs), {1: [dev]},
    notion="robust", tol=1e-6)
print(f"robust check: ok={verdict.ok}")
for c in verdict.checks:
    print(f"  P2 gains {c['value'] - c['equilibrium_payoff']:+.4f} "
          f"by deviating to the best-response menu")
