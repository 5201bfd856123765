"""Road and driver closures plus linear stability of uniform flow.

The continuum model couples mass conservation with a momentum balance

    u_t + u u_x + p_x / rho = (u_eq(rho) - u) / tau

in which drivers relax toward a density-dependent desired speed

    u_eq(rho) = u0 * (1 - rho / rho_max)

and anticipate downstream conditions through a traffic pressure with

    dp/drho = beta * rho / (rho_max - rho).

Everything here is a pure function of (params, rho); all other modules build
on these closures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoUnstableBand

__all__ = [
    "ModelParams",
    "EquilibriumState",
    "desired_speed",
    "pressure",
    "sound_speed",
    "is_unstable",
    "critical_densities",
    "equilibrium",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the model, SI units throughout.

    beta     pressure stiffness, m^2/s^2
    rho_max  jam (bumper-to-bumper) density, vehicles/m
    u0       free-flow desired speed, m/s
    tau      relaxation time toward the desired speed, s
    """

    beta: float
    rho_max: float
    u0: float
    tau: float

    def __post_init__(self):
        for name in ("beta", "rho_max", "u0", "tau"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be strictly positive and finite, got {value!r}")

    @classmethod
    def canonical(cls) -> "ModelParams":
        """Reference constants used by the bundled presets."""
        return cls(beta=10.0, rho_max=0.2, u0=20.0, tau=5.0)


@dataclass(frozen=True)
class EquilibriumState:
    """A uniform flow state with u exactly at the desired speed.

    Construct through :func:`equilibrium` so the speed consistency holds.
    """

    rho: float
    u: float


def _as_density(params: ModelParams, rho, upper_inclusive: bool):
    """Validate a density argument and return it as a float array."""
    r = np.asarray(rho, dtype=float)
    bad_high = r > params.rho_max if upper_inclusive else r >= params.rho_max
    if np.any(r < 0.0) or np.any(bad_high) or not np.all(np.isfinite(r)):
        bound = "rho_max" if upper_inclusive else "rho_max (exclusive)"
        raise DomainError(f"density must lie in [0, {bound}], got {rho!r}")
    return r


def _match_shape(rho, out):
    return float(out) if np.ndim(rho) == 0 else out


def desired_speed(params: ModelParams, rho):
    """Desired (equilibrium) speed u0 * (1 - rho/rho_max), m/s.

    Affine and monotonically decreasing; vanishes at the jam density.
    Domain: 0 <= rho <= rho_max.
    """
    r = _as_density(params, rho, upper_inclusive=True)
    return _match_shape(rho, params.u0 * (1.0 - r / params.rho_max))


def pressure(params: ModelParams, rho):
    """Traffic pressure, the antiderivative of beta*rho/(rho_max - rho).

    Normalized so p(0) = 0:

        p(rho) = beta * (rho_max * ln(rho_max / (rho_max - rho)) - rho)

    Strictly increasing and convex; diverges logarithmically at rho_max.
    Domain: 0 <= rho < rho_max.
    """
    r = _as_density(params, rho, upper_inclusive=False)
    log_term = -np.log1p(-r / params.rho_max)  # ln(rho_max / (rho_max - rho))
    return _match_shape(rho, params.beta * (params.rho_max * log_term - r))


def sound_speed(params: ModelParams, rho):
    """Speed of small disturbances c = sqrt(dp/drho) = sqrt(beta*rho/(rho_max - rho)).

    c(0) = 0, strictly increasing, diverges at the jam density.
    Domain: 0 <= rho < rho_max.
    """
    r = _as_density(params, rho, upper_inclusive=False)
    return _match_shape(rho, np.sqrt(params.beta * r / (params.rho_max - r)))


def is_unstable(params: ModelParams, rho):
    """Whether uniform flow at this density is linearly unstable.

    Uses the sub-characteristic criterion for relaxation systems: unstable
    exactly when rho * |u_eq'(rho)| > c(rho), i.e.

        (u0 * rho / rho_max)^2 > beta * rho / (rho_max - rho).

    Domain: 0 < rho < rho_max.
    """
    r = np.asarray(rho, dtype=float)
    if np.any(r <= 0.0) or np.any(r >= params.rho_max) or not np.all(np.isfinite(r)):
        raise DomainError(f"density must lie strictly inside (0, rho_max), got {rho!r}")
    kinematic_sq = (params.u0 * r / params.rho_max) ** 2
    sound_sq = params.beta * r / (params.rho_max - r)
    out = kinematic_sq > sound_sq
    return bool(out) if np.ndim(rho) == 0 else out


def critical_densities(params: ModelParams) -> tuple[float, float]:
    """Endpoints (rho_lo, rho_hi) of the unstable density band.

    Roots of rho * (rho_max - rho) * (u0/rho_max)^2 = beta, a quadratic in
    rho; uniform flow is unstable strictly between them and stable outside.

    Raises NoUnstableBand when the discriminant 1 - 4*beta/u0^2 is not
    positive (stiff enough pressure suppresses the instability entirely).
    """
    disc = 1.0 - 4.0 * params.beta / params.u0 ** 2
    if disc <= 0.0:
        raise NoUnstableBand(
            f"no unstable band: 4*beta = {4.0 * params.beta} >= u0^2 = {params.u0 ** 2}"
        )
    half_width = 0.5 * params.rho_max * math.sqrt(disc)
    center = 0.5 * params.rho_max
    return center - half_width, center + half_width


def equilibrium(params: ModelParams, rho: float) -> EquilibriumState:
    """Uniform equilibrium state at the given density.

    Domain: 0 < rho < rho_max (strict, so that the state carries a finite
    sound speed and the relaxation term vanishes exactly).
    """
    r = float(rho)
    if not (0.0 < r < params.rho_max) or not math.isfinite(r):
        raise DomainError(f"equilibrium density must lie strictly inside (0, rho_max), got {rho!r}")
    return EquilibriumState(rho=r, u=desired_speed(params, r))
