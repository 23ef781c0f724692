"""Physical constants shared across the simulator."""

SPEED_OF_LIGHT_KM_S = 299792.458      # km/s
SPEED_OF_LIGHT_M_S = 299792458.0      # m/s
EARTH_RADIUS_KM = 6371.0              # mean Earth radius, km
EARTH_MU_KM3_S2 = 398600.4418         # gravitational parameter, km^3/s^2
BOLTZMANN_J_K = 1.380649e-23          # J/K
