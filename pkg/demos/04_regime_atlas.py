"""Which parameter sets fall under the boundedness theorem, and what the
simulation does there.

For each parameter set we print the regime, the reason string and, for the
growth-dampening cases, the mass ceiling m0. A short run then checks the
trajectory against those bounds.
"""

import numpy as np

from nlchemo import Grid, Params, Recorder, SourceMode, State, StepperConfig, report_for_state, run, verdict

GD, DG = SourceMode.GROWTH_DAMPENING, SourceMode.DECAY_GROWTH
grid = Grid.interval(1.0, 128)
u0 = grid.sample(lambda x: 0.5 + 0.3 * np.cos(np.pi * x))
v0 = grid.sample(lambda x: 1.0 + 0.5 * np.cos(np.pi * x))

cases = {
    "logistic, alpha=1 beta=2 gamma=2": Params(1, 1, 1, 1, 2, 2, GD),
    "strong damping, alpha=2 beta=gamma=2": Params(1, 1, 1, 2, 2, 2, GD),
    "beta < alpha": Params(1, 1, 1, 3, 2, 2, GD),
    "decay-growth, beta+gamma = alpha, a=2": Params(1, 2, 1, 3, 1, 2, DG),
    "decay-growth, beta+gamma = alpha, a=0.2": Params(1, 0.2, 1, 3, 1, 2, DG),
}

for label, params in cases.items():
    report = report_for_state(params, u0, v0)
    rec = Recorder([1, 2, 4])
    rep = run(State(u0, v0), params, StepperConfig(), 5.0, rec, record_every=10)
    judged = verdict(rec.records, report)
    print(label)
    print(f"  regime   {report.case.tag.value}: {report.case.details}")
    if report.mass_bound_m0 is not None:
        print(f"  m0       {report.mass_bound_m0:.6g}, observed max mass {max(r.mass for r in rec.records):.6g}")
    outcome = f"{rep.blowup.reason} at t = {rep.blowup.t_detected:.4g}" if rep.blew_up else "reached t = 5"
    note = "" if report.case.tag.bounded else "  (outside the theorem: observation only)"
    print(f"  run      {outcome}, verdict {'pass' if judged.overall else 'fail'}{note}\n")
