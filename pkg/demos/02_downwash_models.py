"""How much the choice of downwash approximation matters.

The exact rotor downwash in forward flight solves a quartic. Two cheaper
stand-ins are common: the hover value (ignores airspeed) and Glauert's
high-speed form (ignores the induced term in the inflow). This prints both
against the exact root and shows where each one can be trusted.

    python demos/02_downwash_models.py
"""

import numpy as np

from flightenergy import default_drone
from flightenergy.mission import DOWNWASH_COLUMNS, compare_downwash

p = default_drone()
rows = compare_downwash(np.arange(1.0, 25.01, 2.0), p)
col = {name: i for i, name in enumerate(DOWNWASH_COLUMNS)}

print(f"{'v':>5} {'w root':>8} {'w hover':>8} {'w glauert':>9} {'EPM err hover':>14} {'EPM err glauert':>16}")
for r in rows:
    e_h = 100 * (r[col["EPM_H"]] / r[col["EPM_R"]] - 1)
    e_g = 100 * (r[col["EPM_G"]] / r[col["EPM_R"]] - 1)
    print(f"{r[0]:5.1f} {r[col['w_R']]:8.3f} {r[col['w_H']]:8.3f} {r[col['w_G']]:9.3f} {e_h:13.2f}% {e_g:15.2f}%")

# The hover value is only adequate very close to hover; Glauert's form
# overestimates downwash at low speed and converges to the root from above.
