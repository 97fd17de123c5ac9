"""
What the system-level test sees that the equation-level test cannot
===================================================================

For undamped second-order equations there is a classical sufficient test:
find window pairs on which an energy functional of a half-sine bump stays
nonnegative.  The first-order pair below defeats that test but still
oscillates, and the interval-pair certificate proves it, provided the shift
parameter lam is allowed to leave zero.

The construction concentrates the coupling q into narrow strong bursts at
the centers of the forcing half-waves.  Oscillation happens inside the
bursts; between them the coupling is so weak that the energy functional
over any full half-wave window goes negative.  A decaying term in f pushes
the quadrature of f upward for all time, which rules out lam = 0, while a
moderate negative lam restores both window families.
"""

import math

import numpy as np

from oscillint import (SecondOrderSpec, SystemSpec, check_oscillation,
                       check_undamped_equation, default_ensemble,
                       empirical_classification, parse_text, simulate_ensemble)

bursty_q = "0.05 + 150 * ((1 - cos(2 * t)) / 2)^20"
system = SystemSpec(parse_text("0"), parse_text(bursty_q), parse_text("-1"),
                    parse_text("0"),
                    parse_text("0.5 * cos(t) + 0.6 * exp(-t)"),
                    parse_text("sin(t)"))
horizon = (0.0, 8.0 * math.pi)

# The closest second-order equation drops f (no equation reduces to a
# system with f != 0) and keeps the same homogeneous part and forcing:
# (phi'/q)' + phi = sin(t).
shadow = SecondOrderSpec(parse_text(f"1 / ({bursty_q})"), parse_text("0"),
                         parse_text("1"), parse_text("sin(t)"))
print(f"equation-level test:        {check_undamped_equation(shadow, horizon).outcome}")

# The system test with the shift pinned to zero fails for the same reason.
pinned = check_oscillation(system, horizon, lambda_grid=[0.0])
print(f"system test with lam = 0:   {pinned.outcome}")

# Free the shift and the certificate appears.
grid = [round(x, 6) for x in np.linspace(-1.5, 1.5, 13)]
freed = check_oscillation(system, horizon, lambda_grid=grid)
print(f"system test over a grid:    {freed.outcome}")
lams = sorted({w.lam for _, w in freed.evidence["witnesses"]})
print(f"shifts used by witnesses:   {lams}")

# Referee: simulate sixteen members and classify what they actually did.
empirical = empirical_classification(
    simulate_ensemble(system, default_ensemble(horizon)))
print(f"empirical outcome:          {empirical.outcome}")
print(f"zeros per member:           {empirical.zero_counts}")
