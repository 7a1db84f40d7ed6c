"""Estimating the driver type from observed accelerations.

Each step compares the driver's acceleration with the first step of a
defensive and a confident plan. Samples without interaction count as 0.5.
"""

# %%
import numpy as np

from riskmaps.scenarios import DRIVER_TYPES, make_scenario
from riskmaps.simulator import run

for driver in DRIVER_TYPES:
    trace = run(make_scenario("following-high", driver))
    s = trace.estimation_summary()
    alpha = np.array([x.alpha_hat for x in trace.samples])
    print(f"{driver:10s} truth {trace.spec.driver_alpha:4.2f}  mean {s.mean:.2f}  std {s.std:.2f}")
    print("   alpha_hat every 1 s:", " ".join(f"{a:.2f}" for a in alpha[::10]))

# %% the first second of the defensive run, step by step
trace = run(make_scenario("following-high", "defensive"))
print("\n   t   a_def  a_conf  a_drv  alpha")
for x in trace.samples[:11]:
    print(f"{x.timestamp:4.1f}  {x.a_def:+5.1f}  {x.a_conf:+5.1f}  {x.a_driver:+5.1f}  {x.alpha_hat:.2f}")

# %% at the crossing the estimate goes back to 0.5 once both cars are through
trace = run(make_scenario("intersection-high", "confident"))
end = trace.interaction_end()
after = [x.alpha_hat for x in trace.samples if x.timestamp >= end - 1e-9]
print(f"\ninteraction over at t={end:.1f} s; {len(after)} later samples, all 0.5: {set(after) == {0.5}}")
