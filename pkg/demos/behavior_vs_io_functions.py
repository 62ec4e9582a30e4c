#!/usr/bin/env python3
"""Behavior equality is weaker than i/o-function equality without regularity.

Two bundled systems produce exactly the constant outputs: a 2-state system
whose first state absorbs p(0) times the second, and a 1-state system that
simply holds its value.  Their manifest behaviors coincide, yet no fixed
pairing of initial states reproduces the same input-output map for every
scheduling signal.  The regularity certificate separates the two cases:
the 2-state system has a singular state matrix everywhere, so the
equivalence of the two formulations does not apply to it.
"""

from pathlib import Path

import numpy as np

from lpvssa import (
    Signal,
    behavior_equivalence_empirical,
    check_rc,
    match_initial_state,
    simulate_dt,
)
from lpvssa.io import parse_system

DATA = Path(__file__).parent / "data"

two_state = parse_system((DATA / "constant_2state.json").read_text())
one_state = parse_system((DATA / "constant_1state.json").read_text())

u = Signal.dt(np.zeros((11, 1)))
p_one = Signal.dt(np.vstack([[1.0], np.zeros((10, 1))]))
p_zero = Signal.dt(np.zeros((11, 1)))

print("=== simulate the 2-state system from x0 = [1, 1], zero input ===")
y1 = simulate_dt(two_state, [1.0, 1.0], u, p_one, 10).y.values
y0 = simulate_dt(two_state, [1.0, 1.0], u, p_zero, 10).y.values
print(f"p(0) = 1: output is constant {y1[0, 0]:g}")
print(f"p(0) = 0: output is constant {y0[0, 0]:g}")

print("\n=== regularity status ===")
for name, s in (("2-state", two_state), ("1-state", one_state)):
    cert = check_rc(s)
    print(f"{name}: {cert.dt_invertibility}")

print("\n=== behaviors agree: every output is matched by the other system ===")
report = behavior_equivalence_empirical(two_state, one_state, trials=100, seed=0)
print(f"pass: {report.passed} (max residual {report.max_residual:.2e} over "
      f"{report.trials} trials)")
print(f"note: {report.note}")

print("\n=== but the i/o functions differ across schedulings ===")
x0_to, residual = match_initial_state(two_state, [1.0, 1.0], one_state, u, p_one, 10)
print(f"under p(0) = 1 the best 1-state match is z0 = {x0_to[0]:g} "
      f"(residual {residual:.1e})")
y_two = simulate_dt(two_state, [1.0, 1.0], u, p_zero, 10).y.values
y_prime = simulate_dt(one_state, x0_to, u, p_zero, 10).y.values
print(f"replaying the matched pair under p(0) = 0: "
      f"{y_two[0, 0]:g} vs {y_prime[0, 0]:g} — the pairing breaks")
