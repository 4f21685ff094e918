"""Physical constants and unit conversions.

Internal canonical units are km, s, rad everywhere.  Ingest code converts
AU, degrees, days, years and Julian dates at the boundary.
"""

MU_EARTH = 398600.4418        # km^3/s^2
MU_SUN = 1.32712440018e11     # km^3/s^2
R_EARTH = 6378.137            # km
AU = 1.495978707e8            # km
DAY = 86400.0                 # s
YEAR = 365.25 * DAY           # s (Julian year)

FRAME_MU = {
    "geocentric": MU_EARTH,
    "heliocentric": MU_SUN,
}
