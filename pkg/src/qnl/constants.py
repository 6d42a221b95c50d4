"""Physical constants, rounded to three significant figures.

The rounded values are kept on purpose so that derived numbers (well
energies, pendulum figures) come out at the familiar round values.
"""

HBAR = 1.05e-34  # J s
K_B = 1.38e-23  # J / K
E_CHARGE = 1.60e-19  # C
M_ELECTRON = 9.10e-31  # kg
G_EARTH = 9.81  # m / s^2
