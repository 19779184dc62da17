"""Spatially constant data turn the PDE system into two scalar ODEs.

With u and v constant in space every flux vanishes, and the nonlocal
integral becomes |Omega| u^gamma. The simulation must then follow

    u' = a u^alpha - b |Omega| u^(beta + gamma),    v' = -u v.

This script compares the finite-volume run with scipy's DOP853 and shows
the temporal order of the two time-stepping variants.
"""

import numpy as np
from scipy.integrate import solve_ivp

from nlchemo import Grid, Params, State, StepperConfig, run

params = Params(chi=1.0, a=2.0, b=1.0, alpha=1.0, beta=1.0, gamma=1.0)
grid = Grid.interval(1.0, 16)
u0, v0, horizon = 0.5, 1.0, 2.0


def reference(t_end):
    rhs = lambda t, y: [2 * y[0] - y[0] ** 2, -y[0] * y[1]]  # noqa: E731
    return solve_ivp(rhs, (0, t_end), [u0, v0], method="DOP853", rtol=1e-12, atol=1e-14).y[:, -1]


ref = reference(horizon)
print(f"reference at t = {horizon}: u = {ref[0]:.10f}, v = {ref[1]:.10f}\n")
print("   dt        theta=1 error   theta=1/2 error")
previous = None
for dt in (0.04, 0.02, 0.01, 0.005):
    errors = []
    for theta in (1.0, 0.5):
        cfg = StepperConfig(dt_init=dt, dt_min=dt, dt_max=dt, cfl_safety=1.0, theta=theta)
        rep = run(State(grid.constant(u0), grid.constant(v0)), params, cfg, horizon)
        errors.append(max(abs(rep.state.u.values[0] - ref[0]), abs(rep.state.v.values[0] - ref[1])))
    line = f"  {dt:<8g}  {errors[0]:.3e}       {errors[1]:.3e}"
    if previous is not None:
        rates = np.log2(np.array(previous) / np.array(errors))
        line += f"   observed orders {rates[0]:.2f}, {rates[1]:.2f}"
    print(line)
    previous = errors
