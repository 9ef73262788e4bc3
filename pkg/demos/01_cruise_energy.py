"""Energy per metre in level cruise, and the airspeed that minimises it.

Walks the EPM curve of the reference quadrotor, shows which loss dominates at
each speed, and converts EPM into range for a given amount of stored energy.

    python demos/01_cruise_energy.py
"""

from flightenergy import default_drone, epm_curve, optimal_airspeed
from flightenergy.epm import airspeed_grid

p = default_drone()

v_star, e_star = optimal_airspeed(p)
print(f"best cruise speed {v_star:.2f} m/s at {e_star:.2f} J/m")

# Coarse table of the loss breakdown. Induced loss falls with speed while
# parasitic drag grows, which is what produces the interior optimum.
curve = epm_curve(airspeed_grid(2.0, 24.0, 2.0), p)
print(f"\n{'v [m/s]':>8} {'total':>8} {'induced':>8} {'parasite':>8} {'profile':>8} {'rotor':>8}")
for row in zip(curve.v_a, curve.total, curve.induced, curve.parasitic, curve.profile, curve.rotor):
    print("".join(f"{x:9.2f}" for x in row))

# A 10% speed error around the optimum costs very little energy.
fine = epm_curve(airspeed_grid(0.9 * v_star, 1.1 * v_star, 0.01), p)
print(f"\nwithin +/-10% of v*, EPM rises by at most {100 * (fine.total.max() / e_star - 1):.2f}%")

# Range for an illustrative 100 Wh of usable energy.
from flightenergy.epm import range_curve
from flightenergy import DownwashMethod

rng = range_curve(p, DownwashMethod.ROOT, 100 * 3600.0, airspeed_grid(4.0, 20.0, 4.0))
for v, r in rng:
    print(f"  {v:4.0f} m/s -> {r / 1e3:5.1f} km")
