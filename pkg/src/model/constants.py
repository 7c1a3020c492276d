"""Physical constants (CODATA 2018), pinned so golden numbers do not drift with library versions."""

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact
HBAR = 1.054571817e-34  # J s, exact
EPSILON_0 = 8.8541878128e-12  # F/m
