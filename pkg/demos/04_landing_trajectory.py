"""Minimum-energy descent onto the destination pad.

Solves the 22 s landing from the end of the cruise corridor with the landing
incentive (gravity fades out near the pad) and summarises the trajectory.
Takes about ten seconds on one core.

    python demos/04_landing_trajectory.py [nodes]
"""

import sys

import numpy as np

from flightenergy import default_drone
from flightenergy.trajopt import landing, solve, touchdown
from flightenergy.trajopt.scenarios import LANDING_TARGET

p = default_drone()
nodes = int(sys.argv[1]) if len(sys.argv) > 1 else 500

res = solve(landing(22.0).problem(p, nodes))
print(f"status {res.status.value} after {res.iterations} iterations in {res.solve_time:.1f} s")
if not res.ok:
    sys.exit(res.message)

tr = res.trajectory
td, drift = touchdown(tr, LANDING_TARGET)
print(f"energy {res.energy / 1e3:.2f} kJ, touchdown at {td:.2f} s, {drift:.2f} m from the pad centre")

# Sample the profile every two seconds.
print(f"\n{'t':>5} {'x to go':>8} {'z':>7} {'|v|':>6} {'mean omega':>11}")
for k in np.searchsorted(tr.t, np.arange(0.0, tr.t[-1] + 1e-9, 2.0)):
    k = min(k, len(tr.t) - 1)
    print(f"{tr.t[k]:5.1f} {LANDING_TARGET[0] - tr.position[k, 0]:8.1f} {tr.position[k, 2]:7.1f} "
          f"{np.linalg.norm(tr.velocity[k]):6.2f} {tr.omega[k].mean():11.0f}")

# The optimiser spins the motors right down for part of the descent and lets
# the vehicle fall, then brakes hard near the ground.
low = np.all(tr.omega < 0.1 * p.omega_max, axis=1)
print(f"\nmotors below 10% of top speed for {low.sum() * (tr.t[1] - tr.t[0]):.2f} s")
