"""
Certifying non-oscillation
==========================

phi'' - phi = -exp(-t) never oscillates: the homogeneous part is hyperbolic
and the forcing dies out.  The certificate has three independent legs, shown
here one at a time.
"""

import numpy as np

from oscillint import (Grid, SecondOrderSpec, Tolerances, angle_line_crossings,
                       check_nonoscillation, default_ensemble, lambda_feasibility,
                       parse_text, reduce_equation, simulate_ensemble)

equation = SecondOrderSpec(parse_text("1"), parse_text("0"),
                           parse_text("-1"), parse_text("-exp(-t)"))
system = reduce_equation(equation)
horizon = (0.0, 30.0)

# Leg one: a nonnegative shift parameter lam such that both sign conditions
# hold for all time.  Feasibility is an interval in lam; here everything
# from 1 upward works, and nothing below does.
interval = lambda_feasibility(system, Grid.uniform(0.0, 30.0, 2048))
print(f"feasible shift interval: [{interval[0]:.9f}, {interval[1]}]")

# Leg two: the homogeneous companion never oscillates.  The phase angle of
# the unforced pair stays put, so the crossing list is empty.
crossings = angle_line_crossings(system.homogeneous(), horizon)
print(f"homogeneous crossings on [0, 30]: {crossings}")

# Both legs together give the analytic verdict.
verdict = check_nonoscillation(system, horizon)
print(f"analytic verdict: {verdict.outcome}")
print(f"witness shift: lam = {verdict.evidence['lambda_witness']:.6f}")

# Leg three, the referee: simulate an ensemble and look for a member whose
# first component keeps one sign on the tail of the horizon.  Solutions here
# grow like exp(t), so raise the escape ceiling before integrating to 30.
tol = Tolerances(escape_magnitude=1e15)
trajectories = simulate_ensemble(system, default_ensemble(horizon), tol)

probe = np.linspace(15.0, 30.0, 601)
definite = 0
for traj in trajectories:
    values = np.atleast_1d(traj.component(0)(probe))
    if np.all(values > 0.0) or np.all(values < 0.0):
        definite += 1
print(f"sign-definite members over [15, 30]: {definite} of {len(trajectories)}")
