"""Capacity evaluation and optimal sizing of the UCA pair.

Link capacity under water-filling depends on the geometry only through the
size parameter beta and the rotation angle, so the optimal antenna radii
follow from a one-dimensional search over beta: scan a grid, refine the
winning cell by golden section, then convert the optimal beta into radii
for a given wavelength and distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import singular_values, singular_values_many

TWO_PI = 2.0 * math.pi

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# Capacity differences below this are treated as ties; the smallest beta
# among tied grid points wins, which keeps the arrays as small as possible.
TIE_TOLERANCE_BITS = 1e-6


@dataclass(frozen=True)
class PowerAllocation:
    """Per-stream transmit powers summing to the total budget."""

    powers: np.ndarray
    total: float
    noise: float

    def __post_init__(self):
        powers = np.array(self.powers, dtype=float)
        powers.setflags(write=False)
        object.__setattr__(self, "powers", powers)
        if self.total <= 0.0 or self.noise <= 0.0:
            raise ValueError("total power and noise must be positive")
        if np.any(powers < 0.0):
            raise ValueError("stream powers must be nonnegative")
        if abs(float(np.sum(powers)) - self.total) > 1e-9 * self.total:
            raise ValueError("stream powers must sum to the total budget")


def water_fill(sigmas, p_total: float, noise: float) -> PowerAllocation:
    """Water-filling power allocation over parallel streams.

    Solves max sum log2(1 + p_k sigma_k^2 / noise) subject to sum p_k =
    p_total, p_k >= 0, by scanning active-set sizes over the inverse gains
    sorted ascending.  Streams with sigma_k = 0 get exactly zero power.

    Parameters
    ----------
    sigmas : array_like
        Nonnegative stream gains (at least one must be positive).
    p_total : float
        Total power budget.
    noise : float
        Noise power.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    if p_total <= 0.0 or noise <= 0.0:
        raise ValueError("p_total and noise must be positive")
    if np.any(sigmas < 0.0):
        raise ValueError("sigmas must be nonnegative")
    active = sigmas > 0.0
    if not np.any(active):
        raise ValueError("at least one stream gain must be positive")

    inv_gain = np.full(sigmas.shape, np.inf)
    inv_gain[active] = noise / sigmas[active] ** 2
    order = np.argsort(inv_gain, kind="stable")
    sorted_inv = inv_gain[order]

    n_active = int(np.count_nonzero(active))
    powers = np.zeros_like(sigmas)
    for size in range(n_active, 0, -1):
        level = (p_total + float(np.sum(sorted_inv[:size]))) / size
        if level > sorted_inv[size - 1]:
            chosen = order[:size]
            powers[chosen] = level - inv_gain[chosen]
            break
    return PowerAllocation(powers=powers, total=p_total, noise=noise)


def allocated_capacity(sigmas, alloc: PowerAllocation) -> float:
    """Rate sum log2(1 + p_k sigma_k^2 / noise) for a given allocation."""
    sigmas = np.asarray(sigmas, dtype=float)
    return float(np.sum(np.log2(1.0 + alloc.powers * sigmas**2 / alloc.noise)))


def capacity(sigmas, p_total: float, noise: float) -> float:
    """Water-filled capacity in bit/s/Hz of the given stream gains."""
    return allocated_capacity(sigmas, water_fill(sigmas, p_total, noise))


@dataclass(frozen=True)
class DesignResult:
    """Outcome of the one-dimensional beta search."""

    beta_opt: float
    capacity: float
    condition_number: float
    radii_product: float | None = None
    radius_equal: float | None = None


def _golden_max(fun, lo: float, hi: float, xtol: float) -> float:
    """Golden-section maximiser on [lo, hi]; returns the abscissa."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def condition_number(n_s: int, beta: float, theta_o: float) -> float:
    """Ratio of the largest to smallest singular value (inf if one is ~0)."""
    sig = singular_values(n_s, beta, theta_o)
    smallest = float(np.min(sig))
    if smallest < 1e-10:
        return math.inf
    return float(np.max(sig)) / smallest


def search_beta_opt(
    n_s: int,
    theta_o: float,
    snr_db: float,
    beta_max: float = 14.0,
    resolution: float = 0.01,
    *,
    wavelength: float | None = None,
    distance: float | None = None,
) -> DesignResult:
    """Find the capacity-maximising beta for the given rotation and SNR.

    Scans capacity over (0, beta_max] at `resolution`, breaks ties toward
    the smallest beta (within TIE_TOLERANCE_BITS), then refines the winning
    cell by golden section to 1e-4.  If `wavelength` and `distance` are
    supplied, the equal-radius solution realising the optimum is filled in.
    """
    if beta_max <= 0.0 or resolution <= 0.0:
        raise ValueError("beta_max and resolution must be positive")
    p_total = 10.0 ** (snr_db / 10.0)
    noise = 1.0

    grid = np.arange(resolution, beta_max + resolution / 2.0, resolution)
    spectra = singular_values_many(n_s, grid, theta_o)
    caps = np.array([capacity(spectra[g], p_total, noise) for g in range(grid.size)])

    best = float(np.max(caps))
    winner = int(np.flatnonzero(caps >= best - TIE_TOLERANCE_BITS)[0])

    lo = max(grid[winner] - resolution, resolution * 1e-3)
    hi = min(grid[winner] + resolution, beta_max)
    beta_opt = _golden_max(
        lambda b: capacity(singular_values(n_s, b, theta_o), p_total, noise), lo, hi, 1e-4
    )
    cap_opt = capacity(singular_values(n_s, beta_opt, theta_o), p_total, noise)

    radii_product = None
    radius_equal = None
    if wavelength is not None and distance is not None:
        radius_tx, radius_rx = radii_from_beta(beta_opt, wavelength, distance)
        radii_product = radius_tx * radius_rx
        radius_equal = radius_tx
    return DesignResult(
        beta_opt=float(beta_opt),
        capacity=cap_opt,
        condition_number=condition_number(n_s, beta_opt, theta_o),
        radii_product=radii_product,
        radius_equal=radius_equal,
    )


def radii_from_beta(
    beta: float,
    wavelength: float,
    distance: float,
    equal_radii: bool = True,
) -> tuple[float, float]:
    """Radii realising a target beta at the given wavelength and distance.

    The product is fixed at R_t * R_r = beta * wavelength * distance /
    (2*pi).  With ``equal_radii`` both radii are its square root; otherwise
    the split is unconstrained and the pair (product, 1.0) is returned so
    callers can rescale to any factorisation they like.
    """
    if beta <= 0.0 or wavelength <= 0.0 or distance <= 0.0:
        raise ValueError("beta, wavelength and distance must be positive")
    product = beta * wavelength * distance / TWO_PI
    if equal_radii:
        r = math.sqrt(product)
        return r, r
    return product, 1.0
