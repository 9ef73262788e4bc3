"""Finding the best cruise speed online.

The regulator perturbs the commanded airspeed, measures the resulting change in
energy per metre, and drives that slope to zero with a PID loop. Starting from
several initial speeds it settles on the same point the offline grid search
finds.

    python demos/03_airspeed_regulator.py
"""

from flightenergy import AirspeedPlant, RegulatorConfig, default_drone, optimal_airspeed, simulate

p = default_drone()
v_star, e_star = optimal_airspeed(p)
cfg = RegulatorConfig()
plant = AirspeedPlant()

print(f"offline optimum: {v_star:.2f} m/s, {e_star:.2f} J/m\n")
for v0 in (3.0, 8.0, 16.0, 22.0):
    tr = simulate(cfg, plant, v0, 60.0, p)
    v_ss, e_ss = tr.steady_state()
    # first time the airspeed stays within 0.5 m/s of its final value
    far = abs(tr.v_a - v_ss) > 0.5
    t_settle = tr.t[far.nonzero()[0][-1] + 1] if far.any() else tr.t[0]
    print(f"start {v0:5.1f} m/s -> {v_ss:6.3f} m/s ({e_ss:.2f} J/m), settled by t = {t_settle:.1f} s")

# Airspeed sensor noise makes the speed wander but keeps it near v*.
noisy = simulate(cfg, plant, 4.0, 60.0, p, noise_std=0.05, seed=1)
print(f"\nwith airspeed noise: steady {noisy.steady_state()[0]:.2f} m/s")
