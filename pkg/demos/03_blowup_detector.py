"""The blow-up detector on a problem whose blow-up time is known.

DECAY_GROWTH with alpha = 2, beta = gamma = 1, a = 1, b = 2 on a unit
interval reduces, for constant data, to u' = -u^2 + 2 u^2 = u^2. Starting
from u0 = 2 the exact solution 1/(1/2 - t) blows up at t = 1/2 and passes
10^6 at t = 1/2 - 10^-6.

The detector reports the first step whose result exceeds the threshold.
Explicit first-order stepping lags the true solution, so detection comes
late; the second-order variant with a small safety factor lands inside
the window.
"""

from nlchemo import Grid, Params, SourceMode, State, StepperConfig, run

params = Params(1.0, 1.0, 2.0, 2.0, 1.0, 1.0, SourceMode.DECAY_GROWTH)
grid = Grid.interval(1.0, 8)
start = State(grid.constant(2.0), grid.constant(0.0))

settings = {
    "theta=1, defaults": StepperConfig(),
    "theta=1/2, dt_max=1e-4, cfl 0.02": StepperConfig(dt_init=1e-4, dt_max=1e-4, dt_min=1e-12,
                                                      cfl_safety=0.02, theta=0.5),
}
print(f"exact crossing of 1e6: t = {0.5 - 1e-6:.9f}\n")
for label, cfg in settings.items():
    rep = run(start, params, cfg, horizon=1.0)
    b = rep.blowup
    print(f"{label:36s} {b.reason} at t = {b.t_detected:.9f} after {rep.steps} steps "
          f"(sup u = {b.u_sup:.3g})")
