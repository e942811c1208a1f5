"""Lateral trajectory-following controller application.

The plant is a double integrator in the lateral offset d and track-angle
error theta, driven at speed v and disturbed by a bounded curvature term z
(crosswind, road grade).  Feeding back u = w - [K_d K_theta] x gives the
closed loop

    x' = [[0, v], [-v K_d, -v K_theta]] x + [0, v]^T z.

Its eigenvalues are lam_12 = -(v/2)(K_theta +- sqrt(K_theta^2 - 4 K_d)),
so the discriminant K_theta^2 - 4 K_d selects the eigenvalue regime, and
the worst-case lateral offset has a closed form in the gains alone (the
speed cancels):

    x1_max = z_max / K_d                                    (real regime)
    x1_max = (z_max / K_d) (2 / (1 - e^{-pi K_theta / s}) - 1),
             s = sqrt(4 K_d - K_theta^2)                    (complex regime)

Sweeping the gain plane against an allowed offset d_max yields the safe
region used for controller tuning.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputFormatError
from .systems import ClosedLoopSystem

__all__ = [
    "TfcParams",
    "Regime",
    "SafeRegionMap",
    "build_tfc",
    "tfc_eigenvalues",
    "tfc_regime",
    "tfc_bound_closed_form",
    "overshoot_constant_disturbance",
    "sweep",
]


class Regime(enum.Enum):
    REAL_DISTINCT = "real_distinct"
    DOUBLE_REAL = "double_real"
    COMPLEX = "complex"


@dataclass(frozen=True)
class TfcParams:
    """Controller and plant parameters of the lateral loop.

    v        vehicle speed (m/s), > 0
    k_d      position gain (1/m^2), > 0
    k_theta  angle gain (1/m), > 0
    z_max    curvature disturbance bound (1/m), >= 0
    d_max    allowed lateral offset (m), > 0
    """

    v: float
    k_d: float
    k_theta: float
    z_max: float = 0.0
    d_max: float = math.inf

    def __post_init__(self):
        if self.v <= 0.0:
            raise InputFormatError(f"speed v must be positive, got {self.v}")
        if self.k_d <= 0.0:
            raise InputFormatError(f"gain k_d must be positive, got {self.k_d}")
        if self.k_theta <= 0.0:
            raise InputFormatError(f"gain k_theta must be positive, got {self.k_theta}")
        if self.z_max < 0.0:
            raise InputFormatError(f"z_max must be nonnegative, got {self.z_max}")
        # d_max = 0 is allowed as a degenerate limit (empty safe set)
        if self.d_max < 0.0:
            raise InputFormatError(f"d_max must be nonnegative, got {self.d_max}")


def build_tfc(p: TfcParams) -> ClosedLoopSystem:
    """Closed loop of the lateral double integrator under gain feedback."""
    a_cl = np.array([[0.0, p.v], [-p.v * p.k_d, -p.v * p.k_theta]])
    e = np.array([[0.0], [p.v]])
    return ClosedLoopSystem(a_cl=a_cl, e_mat=e)


def _discriminant(p: TfcParams) -> float:
    return p.k_theta * p.k_theta - 4.0 * p.k_d


def tfc_eigenvalues(p: TfcParams) -> tuple[complex, complex]:
    """lam_12 = -(v/2)(K_theta +- sqrt(K_theta^2 - 4 K_d))."""
    disc = _discriminant(p)
    half_v = p.v / 2.0
    if disc >= 0.0:
        r = math.sqrt(disc)
        return (
            complex(-half_v * (p.k_theta - r)),
            complex(-half_v * (p.k_theta + r)),
        )
    w = half_v * math.sqrt(-disc)
    s = -half_v * p.k_theta
    return complex(s, w), complex(s, -w)


def tfc_regime(p: TfcParams) -> Regime:
    disc = _discriminant(p)
    if disc > 0.0:
        return Regime.REAL_DISTINCT
    if disc == 0.0:
        return Regime.DOUBLE_REAL
    return Regime.COMPLEX


def tfc_bound_closed_form(p: TfcParams) -> float:
    """Worst-case lateral offset (m) as a function of the gains only."""
    disc = _discriminant(p)
    base = p.z_max / p.k_d
    if disc >= 0.0:
        return base
    ratio = p.k_theta / math.sqrt(-disc)
    return base * (2.0 / (1.0 - math.exp(-ratio * math.pi)) - 1.0)


def overshoot_constant_disturbance(p: TfcParams) -> float:
    """Peak lateral offset under the constant disturbance z = z_max.

    Complex regime: (z_max / K_d)(e^{-xi pi / sqrt(1 - xi^2)} + 1) with
    damping ratio xi = -Re(lam)/|lam|.  Monotone (non-complex) regimes have
    no overshoot, so the steady state z_max / K_d is returned.
    """
    base = p.z_max / p.k_d
    if tfc_regime(p) is not Regime.COMPLEX:
        return base
    lam1, _ = tfc_eigenvalues(p)
    xi = -lam1.real / abs(lam1)
    return base * (math.exp(-xi * math.pi / math.sqrt(1.0 - xi * xi)) + 1.0)


@dataclass(frozen=True)
class SafeRegionMap:
    """Gain-plane sweep of the worst-case offset.

    bound[i, j] is the offset at (kd_grid[i], ktheta_grid[j]); safe marks
    bound <= d_max, and regime holds the eigenvalue regime of each cell.
    """

    kd_grid: np.ndarray
    ktheta_grid: np.ndarray
    bound: np.ndarray
    safe: np.ndarray
    regime: np.ndarray  # array of Regime values, dtype=object
    z_max: float
    v: float
    d_max: float


def sweep(
    p_base: TfcParams,
    kd_range: tuple[float, float] = (0.01, 1.5),
    ktheta_range: tuple[float, float] = (0.01, 2.5),
    resolution: int = 200,
) -> SafeRegionMap:
    """Evaluate the closed-form bound over a gain grid and mark safe cells.

    The grid is vectorized; every cell costs one exp at most.  Regime
    labels follow the sign of K_theta^2 - 4 K_d.
    """
    if kd_range[0] <= 0.0 or ktheta_range[0] <= 0.0:
        raise InputFormatError("gain ranges must be positive")
    if kd_range[1] <= kd_range[0] or ktheta_range[1] <= ktheta_range[0]:
        raise InputFormatError("gain ranges must be increasing")
    if resolution < 2:
        raise InputFormatError("resolution must be at least 2")
    kd = np.linspace(kd_range[0], kd_range[1], resolution)
    kt = np.linspace(ktheta_range[0], ktheta_range[1], resolution)
    kdg, ktg = np.meshgrid(kd, kt, indexing="ij")
    disc = ktg * ktg - 4.0 * kdg
    bound = p_base.z_max / kdg
    osc = disc < 0.0
    ratio = ktg[osc] / np.sqrt(-disc[osc])
    bound[osc] *= 2.0 / (1.0 - np.exp(-ratio * np.pi)) - 1.0
    safe = bound <= p_base.d_max
    regime = np.empty(disc.shape, dtype=object)
    regime[disc > 0.0] = Regime.REAL_DISTINCT
    regime[disc == 0.0] = Regime.DOUBLE_REAL
    regime[disc < 0.0] = Regime.COMPLEX
    return SafeRegionMap(
        kd_grid=kd,
        ktheta_grid=kt,
        bound=bound,
        safe=safe,
        regime=regime,
        z_max=p_base.z_max,
        v=p_base.v,
        d_max=p_base.d_max,
    )
