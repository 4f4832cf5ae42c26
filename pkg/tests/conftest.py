import numpy as np

from ucamimo import ArrayConfig, Misalignment


def random_config(rng, n_antennas=None, far_field=True):
    """Random array geometry; far_field keeps D >= 10x the radii."""
    n = int(n_antennas or rng.choice([4, 6, 8, 12, 16]))
    wavelength = float(rng.uniform(0.002, 0.01))
    distance = float(rng.uniform(50.0, 500.0))
    cap = distance / 12.0 if far_field else distance / 4.0
    return ArrayConfig(
        n_antennas=n,
        wavelength=wavelength,
        radius_tx=float(rng.uniform(0.05, cap)),
        radius_rx=float(rng.uniform(0.05, cap)),
        distance=distance,
    )


def random_misalignment(rng, n_antennas, small=np.radians(10.0)):
    """Random draw over the production angle ranges."""
    bound = min(small, np.pi / n_antennas)
    return Misalignment(
        theta_o=float(rng.uniform(-bound, bound)),
        theta_cs=float(rng.uniform(-np.pi, np.pi)),
        phi_cs=float(rng.uniform(0.0, small)),
        phi_x=float(rng.uniform(-small, small)),
        phi_y=float(rng.uniform(-small, small)),
    )
