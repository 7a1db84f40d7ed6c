"""A tour of the risk model and the velocity-time risk map.

Run with ``python demos/01_risk_maps.py``. Prints numbers and a text
rendering only, so it works in a plain terminal.
"""

# %% two Gaussian footprints
import numpy as np

from riskmaps.planner import PlannerConfig, plan, render_risk_map
from riskmaps.risk import GaussianFootprint, UncertaintyParams, instantaneous_risk, uncertainty_at
from riskmaps.scene import Scene, VehicleState, straight_path

I2 = np.eye(2)
for d in (0.0, 1.0, 2.0, 4.0):
    r = instantaneous_risk(GaussianFootprint(np.zeros(2), I2), GaussianFootprint(np.array([d, 0.0]), I2))
    print(f"distance {d:3.0f} m -> overlap {r:.4f}")

# %% uncertainty grows with distance travelled, capped by alpha
for alpha in (0.04, 0.5, 1.0):
    sig = [np.sqrt(uncertainty_at(alpha, 12.0, s, UncertaintyParams())[0, 0]) for s in (0, 2, 5, 10)]
    print(f"alpha {alpha:4.2f}: longitudinal sigma " + " ".join(f"{x:5.2f}" for x in sig))

# %% a crossing: the ego 45 m out, a car 60 m out, both at 12 m/s
east = straight_path((-300, 0), (600, 0))
north = straight_path((0, -300), (0, 600))
scene = Scene(VehicleState(east, 255.0, 12.0), (VehicleState(north, 240.0, 12.0),), None, 15.0)
cfg = PlannerConfig()

for alpha in (0.04, 1.0):
    grid = render_risk_map(scene, alpha, cfg, v_max=24.0)
    best = plan(scene, alpha, cfg)
    print(f"alpha {alpha:4.2f}: {grid.spot_area():4d} risky cells, plan starts at "
          f"{best.first_step_acceleration:+.1f} m/s^2")

# %% coarse text rendering of the defensive map (rows: velocity, cols: time)
grid = render_risk_map(scene, 1.0, cfg, v_max=24.0)
shades = " .:-=+*#"
levels = np.log10(np.maximum(grid.risk_values, 1e-12))
idx = np.clip(((levels + 12) / 12 * (len(shades) - 1)).astype(int), 0, len(shades) - 1)
for v, row in list(zip(grid.velocity_axis, idx))[::-4]:
    print(f"{v:5.1f} |" + "".join(shades[i] for i in row[::2]))
print("      +" + "-" * len(idx[0][::2]) + "> t")
