"""Energy budget of a delivery route: cruise along the corridor, then land.

The takeoff leg is left out because climbing 200 m to the corridor in the
reference 22 s is beyond the vehicle's thrust (see the README); pass a longer
takeoff horizon through ``plan mission`` to include one.

    python demos/05_delivery_mission.py
"""

from flightenergy import default_drone
from flightenergy.mission import CruisePhase, LandingPhase, MissionSpec, run_mission
from flightenergy.trajopt import corridor_distance, landing

spec = MissionSpec([
    CruisePhase(corridor_distance(), entry_speed=11.0),
    LandingPhase(landing(22.0), nodes=500),
], drone=default_drone())

report = run_mission(spec)
for ph in report.phases:
    print(f"{ph.name:8s} {ph.distance:8.1f} m {ph.duration:7.1f} s {ph.energy / 1e3:8.1f} kJ  [{ph.status}]")
print(f"{'total':8s} {report.total_distance:8.1f} m {report.total_duration:7.1f} s "
      f"{report.total_energy / 1e3:8.1f} kJ  ({report.energy_per_meter:.2f} J/m)")

cruise = report.phases[0]
print(f"\ncruise settles at {cruise.details['airspeed_m_s']:.2f} m/s; the landing costs as much as "
      f"{report.phases[1].energy / cruise.details['epm_J_m']:.0f} m of cruise")
