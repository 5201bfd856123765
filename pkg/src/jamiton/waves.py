"""Exact self-sustained traveling waves: a shock matched to a transonic relaxation zone.

In a frame moving at speed s, with the similarity variable eta = (x - s*t)/tau,
mass conservation integrates to a constant wave-frame flux m = rho*(u - s) > 0,
and the momentum balance collapses to a single ODE for the speed profile,

    du/deta = (u - s) * (u_eq(rho) - u) / ((u - s)^2 - c(rho)^2),
    rho = m / (u - s).

A self-sustained wave passes smoothly through the sonic point u - s = c, which
requires numerator and denominator to vanish together there; that regularity
condition pins (s, m) for a given far state, exactly as the sonic condition
selects the speed of a self-sustained detonation. A shock computed from the
wave-frame conservation of m*u + p(rho) closes the wave back to the far state
(solitary wave) or to the next period (wave train).

Note on units: eta = (x - s*t)/tau carries velocity units (m/s). Profiles
record eta in m/s; road coordinates follow as x = tau*eta + s*t.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.optimize import brentq

from .errors import (
    ConvergenceFailure,
    DegenerateSonic,
    DomainError,
    IntegrationOutOfRange,
    NoJamiton,
    NoJumpRoot,
    NoUnstableBand,
    SonicEscapeFailure,
    SonicSingularity,
    WavelengthInfeasible,
    ZeroStrengthShock,
)
from .model import (
    EquilibriumState,
    ModelParams,
    critical_densities,
    desired_speed,
    equilibrium,
    is_unstable,
    pressure,
    sound_speed,
)

__all__ = [
    "WaveFrame",
    "SonicState",
    "ShockState",
    "JamitonSolution",
    "SweepRow",
    "SweepResult",
    "wave_numerator",
    "wave_denominator",
    "ode_rhs",
    "cj_construct",
    "sonic_slope",
    "rh_jump",
    "integrate_profile",
    "ProfileBranches",
    "solitary_jamiton",
    "periodic_train",
    "mean_train_density",
    "match_ring_density",
    "sweep_existence",
    "eta_span_by_quadrature",
]

# Scan step for the wave-speed bracket, as a fraction of u0.
_SCAN_STEP_FRAC = 1e-2
# Wave-speed refinement tolerance, as a fraction of u0.
_S_TOL_FRAC = 1e-12
# Default sonic escape offset for profile integration, as a fraction of u0.
_EPS_FRAC = 1e-6
# Downstream equilibrium truncation |u - u_minus|, as a fraction of u0.
_TAIL_TOL_FRAC = 1e-6
# Denominator magnitude (relative to u0^2) treated as "at the sonic point".
_SONIC_DENOM_TOL = 1e-14


@dataclass(frozen=True)
class WaveFrame:
    """A traveling-wave frame: speed s and wave-frame mass flux m = rho*(u - s).

    s may be negative (the wave may move against traffic); m is strictly
    positive because vehicles always overtake the wave.
    """

    s: float
    m: float

    def __post_init__(self):
        if not (math.isfinite(self.s) and math.isfinite(self.m) and self.m > 0.0):
            raise DomainError(f"wave frame requires finite s and m > 0, got s={self.s!r}, m={self.m!r}")

    def density_of(self, u):
        """First integral rho = m/(u - s); valid for u > s."""
        return self.m / (np.asarray(u, dtype=float) - self.s)


@dataclass(frozen=True)
class SonicState:
    """State at the sonic point u - s = c, with the regular profile slope there."""

    u_s: float
    rho_s: float
    slope: float


@dataclass(frozen=True)
class ShockState:
    """Post-shock state (rho_plus, u_plus) attached at eta = 0."""

    rho: float
    u: float


@dataclass(frozen=True)
class JamitonSolution:
    """An assembled solitary or periodic traveling wave.

    eta/u/rho hold the presentation profile in wave coordinates (shock at
    eta = 0; for solitary waves a flat far-state segment precedes it, for
    periodic waves one period [0, wavelength] is stored). smooth_eta/smooth_u
    hold just the strictly monotone smooth branch for interpolation.
    """

    params: ModelParams
    frame: WaveFrame
    far: EquilibriumState
    post_shock: ShockState
    sonic: SonicState
    eta: np.ndarray
    u: np.ndarray
    rho: np.ndarray
    sonic_flag: np.ndarray
    shock_flag: np.ndarray
    smooth_eta: np.ndarray
    smooth_u: np.ndarray
    kind: str  # "solitary" | "periodic"
    wavelength_eta: float | None
    eta_sonic: float
    tail_rate: float

    def x_of_eta(self, eta, t: float = 0.0):
        """Road coordinate of a wave-frame sample at snapshot time t."""
        return self.params.tau * np.asarray(eta, dtype=float) + self.frame.s * t

    def u_of_eta(self, eta):
        """Speed profile as a single-valued function of eta.

        Solitary: far-state speed for eta < 0 and beyond the smooth branch.
        Periodic: eta is reduced modulo the wavelength first.
        """
        e = np.asarray(eta, dtype=float)
        if self.kind == "periodic":
            e = np.mod(e, self.wavelength_eta)
            return np.interp(e, self.smooth_eta, self.smooth_u)
        out = np.where(
            e < 0.0,
            self.far.u,
            np.interp(e, self.smooth_eta, self.smooth_u, right=self.far.u),
        )
        return float(out) if np.ndim(eta) == 0 else out

    def rho_of_eta(self, eta):
        """Density profile via the first integral rho = m/(u - s)."""
        return self.frame.density_of(self.u_of_eta(eta))


def wave_numerator(params: ModelParams, frame: WaveFrame, u):
    """Numerator (u - s)*(u_eq(rho) - u) of the wave ODE, rho eliminated via m."""
    w = np.asarray(u, dtype=float) - frame.s
    rho = frame.m / w
    return w * (params.u0 * (1.0 - rho / params.rho_max) - np.asarray(u, dtype=float))


def wave_denominator(params: ModelParams, frame: WaveFrame, u):
    """Denominator (u - s)^2 - c(rho)^2 of the wave ODE, rho eliminated via m."""
    w = np.asarray(u, dtype=float) - frame.s
    rho = frame.m / w
    return w * w - params.beta * rho / (params.rho_max - rho)


def _numerator_derivative(params: ModelParams, frame: WaveFrame, u: float) -> float:
    """d/du of the wave numerator: (u_eq - u) + u0*rho/rho_max - w."""
    w = u - frame.s
    rho = frame.m / w
    u_eq = params.u0 * (1.0 - rho / params.rho_max)
    return (u_eq - u) + params.u0 * rho / params.rho_max - w


def _denominator_derivative(params: ModelParams, frame: WaveFrame, u: float) -> float:
    """d/du of the wave denominator: 2w + beta*rho_max*rho / ((rho_max - rho)^2 * w)."""
    w = u - frame.s
    rho = frame.m / w
    return 2.0 * w + params.beta * params.rho_max * rho / ((params.rho_max - rho) ** 2 * w)


def ode_rhs(params: ModelParams, frame: WaveFrame, u: float) -> float:
    """du/deta of the wave ODE at speed u.

    Requires u > s and rho = m/(u - s) < rho_max. At a regular sonic point
    (numerator and denominator vanishing together) returns the finite limit
    by l'Hopital; raises SonicSingularity if only the denominator vanishes.
    """
    u = float(u)
    w = u - frame.s
    if w <= 0.0:
        raise DomainError(f"wave ODE requires u > s, got u={u}, s={frame.s}")
    if frame.m / w >= params.rho_max:
        raise DomainError(f"density m/(u-s) = {frame.m / w} reached rho_max at u={u}")
    scale = params.u0 ** 2
    num = float(wave_numerator(params, frame, u))
    den = float(wave_denominator(params, frame, u))
    if abs(den) < _SONIC_DENOM_TOL * scale:
        if abs(num) < _SONIC_DENOM_TOL * scale:
            return _numerator_derivative(params, frame, u) / _denominator_derivative(params, frame, u)
        raise SonicSingularity(
            f"denominator vanished at u={u} with numerator {num} (a non-sonic singular point)"
        )
    return num / den


def _sonic_w(params: ModelParams, m: float) -> float:
    """Sonic wave-frame speed offset w = u - s for flux m.

    Unique positive root of rho_max*w^3 - m*w^2 = beta*m on (m/rho_max, inf),
    i.e. the w at which w = c(m/w); the corresponding density automatically
    satisfies rho < rho_max.
    """
    lo = m / params.rho_max
    hi = lo + (params.beta * m / params.rho_max) ** (1.0 / 3.0)

    def g(w):
        return params.rho_max * w ** 3 - m * w ** 2 - params.beta * m

    w = brentq(g, lo * (1.0 + 1e-15), hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps)
    # One Newton polish; the bracketed root is already near machine precision.
    dg = 3.0 * params.rho_max * w ** 2 - 2.0 * m * w
    if dg != 0.0:
        w -= g(w) / dg
    return w


def _equilibrium_roots(params: ModelParams, frame: WaveFrame) -> tuple[float, float]:
    """Roots (u_small, u_large) of u^2 - (s + u0)*u + u0*(s + m/rho_max) = 0.

    These are the two speeds at which the wave ODE numerator vanishes: the
    sonic-side equilibrium and the far state.
    """
    b = frame.s + params.u0
    c = params.u0 * (frame.s + frame.m / params.rho_max)
    disc = b * b - 4.0 * c
    if disc < 0.0:
        raise ConvergenceFailure(f"no equilibrium pair for frame s={frame.s}, m={frame.m}")
    u_large = 0.5 * (b + math.sqrt(disc))
    u_small = c / u_large if u_large != 0.0 else 0.5 * (b - math.sqrt(disc))
    return u_small, u_large


def sonic_slope(params: ModelParams, frame: WaveFrame, sonic) -> float:
    """Regular profile slope du/deta at the sonic point, by l'Hopital.

    Accepts a SonicState or the sonic speed directly. Both the numerator and
    denominator must already vanish there (checked to 1e-10 relative);
    raises DegenerateSonic if the denominator derivative also vanishes.
    """
    u_s = sonic.u_s if isinstance(sonic, SonicState) else float(sonic)
    scale = params.u0 ** 2
    num = float(wave_numerator(params, frame, u_s))
    den = float(wave_denominator(params, frame, u_s))
    if abs(num) > 1e-10 * scale or abs(den) > 1e-10 * scale:
        raise DomainError(
            f"not a sonic point: |N|={abs(num)}, |D|={abs(den)} exceed 1e-10*u0^2 at u={u_s}"
        )
    d_den = _denominator_derivative(params, frame, u_s)
    if abs(d_den) < 1e-14 * params.u0:
        raise DegenerateSonic(f"denominator derivative {d_den} vanishes at u={u_s}")
    return _numerator_derivative(params, frame, u_s) / d_den


def cj_construct(params: ModelParams, rho_minus: float) -> tuple[WaveFrame, SonicState]:
    """Wave frame and sonic state for a self-sustained wave over far density rho_minus.

    The far state fixes u_minus = u_eq(rho_minus) and, for a candidate speed
    s, the flux m = rho_minus*(u_minus - s). The sonic offset w then follows
    from the cubic rho_max*w^3 - m*w^2 = beta*m, and the regularity condition
    requires the sonic speed s + w to also be an equilibrium: the residual
    u_eq(m/w) - (s + w) must vanish. That residual has exactly one zero below
    the Lax bound s = u_minus - c(rho_minus); it is bracketed by scanning
    downward and refined by Brent's method.

    Raises NoJamiton when rho_minus lies outside the unstable band (no
    self-sustained wave exists there) and ConvergenceFailure if bracketing
    fails inside the band.
    """
    rho_minus = float(rho_minus)
    if not (0.0 < rho_minus < params.rho_max):
        raise DomainError(f"rho_minus must lie strictly inside (0, rho_max), got {rho_minus!r}")
    if not is_unstable(params, rho_minus):
        raise NoJamiton(
            f"uniform flow at rho={rho_minus} is linearly stable; no self-sustained wave exists"
        )
    u_minus = desired_speed(params, rho_minus)
    c_minus = sound_speed(params, rho_minus)
    s_lax = u_minus - c_minus

    def residual(s: float) -> float:
        m = rho_minus * (u_minus - s)
        w = _sonic_w(params, m)
        return desired_speed(params, m / w) - (s + w)

    # The residual vanishes trivially at s_lax (the sonic state collapses onto
    # the far state) and is negative between the nontrivial root and s_lax.
    step = _SCAN_STEP_FRAC * params.u0
    for _ in range(40):
        s_hi = s_lax - step
        if residual(s_hi) < 0.0:
            break
        step *= 0.1
    else:
        raise ConvergenceFailure(
            f"could not establish the scan side below the Lax bound at rho_minus={rho_minus}"
        )

    s_lo = s_hi
    f_lo = residual(s_lo)
    scan = _SCAN_STEP_FRAC * params.u0
    bracket = None
    for k in range(1, 500):
        s_next = s_lo - scan
        f_next = residual(s_next)
        if f_next == 0.0:
            bracket = (s_next, s_next)
            break
        if f_next > 0.0:
            bracket = (s_next, s_lo)
            break
        s_lo, f_lo = s_next, f_next
        if k % 10 == 0:
            scan *= 2.0  # residual has a single sign change; accelerating cannot skip it
    if bracket is None:
        raise ConvergenceFailure(
            f"no sign change found scanning s below the Lax bound at rho_minus={rho_minus}"
        )

    if bracket[0] == bracket[1]:
        s_star = bracket[0]
    else:
        s_star = brentq(
            residual,
            bracket[0],
            bracket[1],
            xtol=_S_TOL_FRAC * params.u0,
            rtol=4.0 * np.finfo(float).eps,
        )

    m = rho_minus * (u_minus - s_star)
    w = _sonic_w(params, m)
    frame = WaveFrame(s=s_star, m=m)
    u_s = s_star + w
    rho_s = m / w
    scale = params.u0 ** 2
    if abs(wave_numerator(params, frame, u_s)) > 1e-10 * scale or abs(
        wave_denominator(params, frame, u_s)
    ) > 1e-10 * scale:
        raise ConvergenceFailure(f"sonic residuals exceed tolerance at rho_minus={rho_minus}")
    if not (u_minus - s_star) > c_minus:
        raise ConvergenceFailure(f"far state not supersonic at rho_minus={rho_minus}")
    slope = sonic_slope(params, frame, u_s)
    return frame, SonicState(u_s=u_s, rho_s=rho_s, slope=slope)


def _momentum_flux(params: ModelParams, frame: WaveFrame, u: float) -> float:
    """Wave-frame momentum invariant m*u + p(m/(u - s))."""
    return frame.m * u + pressure(params, frame.m / (u - frame.s))


def rh_jump(params: ModelParams, frame: WaveFrame, u_pre: float) -> float:
    """Conjugate speed across a shock in this frame.

    Solves m*u_post + p(m/(u_post - s)) = m*u_pre + p(m/(u_pre - s)) for the
    root on the other side of the sonic speed (mass flux is continuous by
    construction, so this is the full jump condition set). Supersonic input
    yields the subsonic conjugate and vice versa; a sonic input supports only
    a zero-strength shock, flagged with ZeroStrengthShock and returned as is.
    """
    u_pre = float(u_pre)
    w_pre = u_pre - frame.s
    if w_pre <= 0.0:
        raise DomainError(f"u_pre must exceed the wave speed, got u_pre={u_pre}, s={frame.s}")
    if frame.m / w_pre >= params.rho_max:
        raise DomainError(f"pre-shock density {frame.m / w_pre} is not below rho_max")

    u_sonic = frame.s + _sonic_w(params, frame.m)
    if abs(u_pre - u_sonic) <= 1e-12 * params.u0:
        warnings.warn("conjugate shock states merge at the sonic speed", ZeroStrengthShock)
        return u_pre

    phi_pre = _momentum_flux(params, frame, u_pre)

    def gap(u: float) -> float:
        return _momentum_flux(params, frame, u) - phi_pre

    # The invariant has its minimum at the sonic speed; if the pre-state sits
    # so close that the gap there is lost to roundoff, only the zero-strength
    # shock is resolvable.
    if gap(u_sonic) >= 0.0:
        warnings.warn("conjugate shock states merge at the sonic speed", ZeroStrengthShock)
        return u_pre

    u_floor = frame.s + frame.m / params.rho_max  # density reaches rho_max here
    if u_pre > u_sonic:
        # Supersonic side: the conjugate is subsonic, between u_floor and u_sonic.
        lo = None
        d = u_sonic - u_floor
        for k in range(1, 200):
            trial = u_floor + d * 0.5 ** k
            if gap(trial) > 0.0:
                lo = trial
                break
        if lo is None:
            raise NoJumpRoot(f"no subsonic conjugate with rho < rho_max for u_pre={u_pre}")
        u_post = brentq(gap, lo, u_sonic, xtol=1e-13 * params.u0, rtol=4.0 * np.finfo(float).eps)
    else:
        # Subsonic side: the conjugate is supersonic; the invariant grows ~ m*u.
        hi = None
        d = max(u_sonic - u_pre, 1e-3 * params.u0)
        for k in range(1, 200):
            trial = u_sonic + d * 2.0 ** k
            if gap(trial) > 0.0:
                hi = trial
                break
        if hi is None:
            raise NoJumpRoot(f"no supersonic conjugate for u_pre={u_pre}")
        u_post = brentq(gap, u_sonic, hi, xtol=1e-13 * params.u0, rtol=4.0 * np.finfo(float).eps)

    # Guarded Newton polish: dPhi/du = m * D / w^2.
    for _ in range(2):
        w = u_post - frame.s
        dphi = frame.m * float(wave_denominator(params, frame, u_post)) / (w * w)
        if dphi == 0.0:
            break
        u_next = u_post - gap(u_post) / dphi
        same_side = (u_floor < u_next < u_sonic) if u_pre > u_sonic else (u_next > u_sonic)
        if same_side:
            u_post = u_next
    return u_post


@dataclass(frozen=True)
class ProfileBranches:
    """Smooth transonic branch of a wave profile, shock-anchored.

    eta increases from 0 (the shock attachment point, u = u_plus) through the
    sonic point at eta_sonic up to the downstream stop; rho = m/(u - s).
    """

    eta: np.ndarray
    u: np.ndarray
    rho: np.ndarray
    eta_sonic: float
    i_sonic: int


def _quiet_quad(integrand, a: float, b: float, points) -> float:
    """quad with roundoff chatter silenced; the integrand's near-jam spike is
    steep enough to trip the conservative internal error heuristics while the
    returned value is already converged (cross-checked against the eta-form
    ODE integration in the test suite)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(integrand, a, b, points=points, limit=400, epsabs=1e-12, epsrel=1e-11)
    return val


def eta_span_by_quadrature(params: ModelParams, frame: WaveFrame, u_a: float, u_b: float) -> float:
    """Wave-frame span integral(u_a, u_b) of deta/du = D/N.

    Cross-check formulation with u as the independent variable; valid on the
    monotone branch. The integrand has a removable singularity at the sonic
    point, handled by its l'Hopital limit.
    """
    u_sonic = frame.s + _sonic_w(params, frame.m)

    def integrand(u: float) -> float:
        num = float(wave_numerator(params, frame, u))
        if abs(u - u_sonic) < 1e-12 * params.u0 or num == 0.0:
            return _denominator_derivative(params, frame, u_sonic) / _numerator_derivative(
                params, frame, u_sonic
            )
        return float(wave_denominator(params, frame, u)) / num

    points = [u_sonic] if min(u_a, u_b) < u_sonic < max(u_a, u_b) else None
    val = _quiet_quad(integrand, u_a, u_b, points)
    return val


def integrate_profile(
    params: ModelParams,
    frame: WaveFrame,
    sonic: SonicState,
    *,
    u_plus: float,
    u_target: float | None = None,
    eta_span: float | None = None,
    eps: float | None = None,
    rtol: float = 1e-10,
) -> ProfileBranches:
    """Integrate the wave ODE through the sonic point, in both eta directions.

    Starts at u_s -/+ eps with the regular sonic slope (the point itself is a
    0/0 singularity, so integration begins a small offset away): the
    decreasing-eta branch runs until u reaches u_plus (the shock attachment
    point, defining eta = 0), the increasing-eta branch until u_target is hit
    if given, otherwise until |u - u_minus| < 1e-6*u0, or until eta_span is
    exhausted when provided.
    """
    u0 = params.u0
    if eps is None:
        eps = _EPS_FRAC * u0
    u_small, u_minus = _equilibrium_roots(params, frame)
    u_upper = u_target if u_target is not None else u_minus
    if not (0.0 < eps < 0.25 * min(u_upper - sonic.u_s, sonic.u_s - u_plus)):
        raise SonicEscapeFailure(
            f"sonic offset eps={eps} is not small relative to the branch extents"
        )
    sigma = sonic.slope
    if sigma <= 0.0:
        raise DegenerateSonic(f"sonic slope {sigma} is not positive")
    eta0 = eps / sigma

    def rhs(_eta, y):
        return (ode_rhs(params, frame, y[0]),)

    def run_branch(u_start, eta_start, eta_stop, u_stop, direction):
        def hit(_eta, y):
            return y[0] - u_stop

        hit.terminal = True
        hit.direction = direction
        span_limit = abs(eta_stop - eta_start)
        sol = solve_ivp(
            rhs,
            (eta_start, eta_stop),
            (u_start,),
            method="RK45",
            events=hit,
            rtol=rtol,
            atol=1e-13 * u0,
            max_step=max(span_limit / 256.0, 4.0 * eta0),
        )
        if sol.status == -1:
            raise SonicEscapeFailure(f"integrator failed leaving the sonic point: {sol.message}")
        return sol

    # Decreasing-eta branch, sonic point at relative eta = 0.
    down_est = abs(eta_span_by_quadrature(params, frame, u_plus, sonic.u_s - eps))
    down_limit = -eta0 - (8.0 * down_est + 16.0 * eta0 + 1.0)
    sol_dn = run_branch(sonic.u_s - eps, -eta0, down_limit, u_plus, direction=-1)
    if sol_dn.status != 1:
        raise IntegrationOutOfRange(
            f"decreasing branch never reached u_plus={u_plus} within eta span {abs(down_limit)}"
        )

    # Increasing-eta branch.
    tail_tol = _TAIL_TOL_FRAC * u0
    if u_target is not None:
        u_stop_up = u_target
        up_est = abs(eta_span_by_quadrature(params, frame, sonic.u_s + eps, u_target))
        up_limit = eta0 + 8.0 * up_est + 16.0 * eta0 + 1.0
    else:
        u_stop_up = u_minus - tail_tol
        rate = abs(_tail_rate(params, frame, u_minus))
        up_est = abs(eta_span_by_quadrature(params, frame, sonic.u_s + eps, u_stop_up))
        up_limit = eta0 + 4.0 * up_est + 8.0 / max(rate, 1e-12) + 1.0
    if eta_span is not None:
        up_limit = min(up_limit, eta_span)
    sol_up = run_branch(sonic.u_s + eps, eta0, up_limit, u_stop_up, direction=1)
    if sol_up.status != 1 and eta_span is None:
        raise IntegrationOutOfRange(
            f"increasing branch never reached u={u_stop_up} within eta span {up_limit}"
        )

    eta_dn = sol_dn.t[::-1]
    u_dn = sol_dn.y[0][::-1]
    eta_up = sol_up.t
    u_up = sol_up.y[0]
    eta_rel = np.concatenate((eta_dn, (0.0,), eta_up))
    u_all = np.concatenate((u_dn, (sonic.u_s,), u_up))
    i_sonic = len(eta_dn)

    # Anchor the shock at eta = 0.
    eta_all = eta_rel - eta_rel[0]
    rho_all = frame.m / (u_all - frame.s)
    return ProfileBranches(
        eta=eta_all, u=u_all, rho=rho_all, eta_sonic=float(eta_all[i_sonic]), i_sonic=i_sonic
    )


def _tail_rate(params: ModelParams, frame: WaveFrame, u_minus: float) -> float:
    """Linearized decay exponent of u - u_minus in eta near the far state (negative)."""
    return _numerator_derivative(params, frame, u_minus) / float(
        wave_denominator(params, frame, u_minus)
    )


def _assemble(
    params,
    frame,
    far,
    post_shock,
    sonic,
    prof: ProfileBranches,
    kind: str,
    wavelength_eta,
    *,
    flat_head: np.ndarray,
    flat_tail: np.ndarray,
) -> JamitonSolution:
    """Join flat segments, the shock pair, and the smooth branch into one profile.

    Solitary: flat far-state rows for eta < 0, a pre-shock row (eta = 0,
    u_minus), then the smooth branch starting at (eta = 0, u_plus).
    Periodic: the smooth branch over [0, span], then flat rows completing the
    period; the first row and the final row (at eta = wavelength) carry the
    shock flag because the period closes onto the next shock.
    """
    if kind == "solitary":
        n_head = len(flat_head) + 1
        eta = np.concatenate((flat_head, (0.0,), prof.eta))
        u = np.concatenate((np.full(n_head, far.u), prof.u))
        i_sonic = n_head + prof.i_sonic
        shock_rows = (n_head - 1, n_head)
    else:
        n_head = 0
        eta = np.concatenate((prof.eta, flat_tail))
        u = np.concatenate((prof.u, np.full(len(flat_tail), prof.u[-1])))
        i_sonic = prof.i_sonic
        shock_rows = (0, len(eta) - 1)
    rho = frame.m / (u - frame.s)
    sonic_flag = np.zeros(len(eta), dtype=np.uint8)
    sonic_flag[i_sonic] = 1
    shock_flag = np.zeros(len(eta), dtype=np.uint8)
    shock_flag[list(shock_rows)] = 1
    return JamitonSolution(
        params=params,
        frame=frame,
        far=far,
        post_shock=post_shock,
        sonic=sonic,
        eta=eta,
        u=u,
        rho=rho,
        sonic_flag=sonic_flag,
        shock_flag=shock_flag,
        smooth_eta=prof.eta.copy(),
        smooth_u=prof.u.copy(),
        kind=kind,
        wavelength_eta=wavelength_eta,
        eta_sonic=prof.eta_sonic,
        tail_rate=_tail_rate(params, frame, _equilibrium_roots(params, frame)[1]),
    )


def solitary_jamiton(
    params: ModelParams,
    rho_minus: float,
    *,
    eps: float | None = None,
    rtol: float = 1e-10,
    flat_fraction: float = 0.25,
) -> JamitonSolution:
    """Full solitary wave over a uniform far state at rho_minus.

    The region eta < 0 is the uniform far state; the shock at eta = 0 drops
    the speed from u_minus to u_plus; the smooth branch then rises through
    the sonic point and relaxes back to the far state downstream. A short
    flat far-state segment (flat_fraction of the smooth extent) is included
    for presentation.
    """
    frame, sonic = cj_construct(params, rho_minus)
    far = equilibrium(params, rho_minus)
    u_plus = rh_jump(params, frame, far.u)
    post = ShockState(rho=frame.m / (u_plus - frame.s), u=u_plus)
    prof = integrate_profile(params, frame, sonic, u_plus=u_plus, eps=eps, rtol=rtol)
    flat_len = flat_fraction * prof.eta[-1]
    flat_head = -np.linspace(flat_len, 0.0, 9)[:-1] if flat_len > 0 else np.empty(0)
    return _assemble(
        params,
        frame,
        far,
        post,
        sonic,
        prof,
        "solitary",
        None,
        flat_head=flat_head,
        flat_tail=np.empty(0),
    )


def mean_train_density(
    params: ModelParams, frame: WaveFrame, u_plus: float, u_one: float, wavelength_eta: float
) -> float:
    """Mean density over one period of a wave train, by quadrature.

    Integrates rho(u) * deta/du over the smooth branch [u_plus, u_one]; any
    wavelength left over beyond the branch span is flat at u_one. Used to
    match a train to the mean density of a closed ring.
    """
    u_sonic = frame.s + _sonic_w(params, frame.m)

    def integrand(u: float) -> float:
        rho = frame.m / (u - frame.s)
        num = float(wave_numerator(params, frame, u))
        if abs(u - u_sonic) < 1e-12 * params.u0 or num == 0.0:
            deta_du = _denominator_derivative(params, frame, u_sonic) / _numerator_derivative(
                params, frame, u_sonic
            )
        else:
            deta_du = float(wave_denominator(params, frame, u)) / num
        return rho * deta_du

    points = [u_sonic] if u_plus < u_sonic < u_one else None
    mass = _quiet_quad(integrand, u_plus, u_one, points)
    span = eta_span_by_quadrature(params, frame, u_plus, u_one)
    pad = wavelength_eta - span
    if pad < -1e-9 * max(wavelength_eta, 1.0):
        raise WavelengthInfeasible(
            f"branch span {span} exceeds the requested wavelength {wavelength_eta}"
        )
    mass += max(pad, 0.0) * frame.m / (u_one - frame.s)
    return mass / wavelength_eta


def _solve_u_one(params: ModelParams, frame: WaveFrame, wavelength_eta: float) -> tuple[float, float]:
    """Pre-shock speed u_one of a periodic train with the given wavelength.

    Returns (u_one, pad) where pad >= 0 is the flat length appended when the
    branch has already relaxed onto the far state to numerical resolution.
    """
    u_small, u_minus = _equilibrium_roots(params, frame)
    u_sonic = frame.s + _sonic_w(params, frame.m)
    if wavelength_eta <= 0.0:
        raise WavelengthInfeasible(f"wavelength must be positive, got {wavelength_eta}")

    def span_of(delta: float) -> float:
        u_one = u_minus - delta
        with warnings.catch_warnings():
            # Probing near the band edge legitimately grazes zero strength.
            warnings.simplefilter("ignore", ZeroStrengthShock)
            u_plus = rh_jump(params, frame, u_one)
        return eta_span_by_quadrature(params, frame, u_plus, u_one)

    delta_min = 1e-9 * params.u0
    delta_max = (u_minus - u_sonic) * (1.0 - 1e-9)
    span_max = span_of(delta_min)
    if wavelength_eta >= span_max:
        return u_minus - delta_min, wavelength_eta - span_max

    def gap(log_delta: float) -> float:
        return span_of(math.exp(log_delta)) - wavelength_eta

    lo, hi = math.log(delta_min), math.log(delta_max)
    if gap(hi) > 0.0:
        raise WavelengthInfeasible(
            f"wavelength {wavelength_eta} is shorter than any admissible period for this frame"
        )
    log_delta = brentq(gap, lo, hi, xtol=1e-13, rtol=4.0 * np.finfo(float).eps)
    return u_minus - math.exp(log_delta), 0.0


def periodic_train(
    params: ModelParams,
    frame: WaveFrame,
    wavelength_eta: float,
    *,
    eps: float | None = None,
    rtol: float = 1e-10,
) -> JamitonSolution:
    """One period of a wave train in a previously constructed frame.

    Finds the pre-shock speed u_one in (u_sonic, u_minus) such that the
    smooth branch from u_plus = rh_jump(u_one) up to u_one spans exactly
    wavelength_eta; the periodic shock then connects u_one back to u_plus.
    As wavelength_eta grows the period approaches the solitary wave; beyond
    the span resolvable in double precision the remainder is flat at the far
    state.
    """
    u_small, u_minus = _equilibrium_roots(params, frame)
    # Guard: the frame must be self-sustained (sonic speed equal to the inner
    # equilibrium), otherwise the smooth branch cannot cross the sonic point.
    u_sonic = frame.s + _sonic_w(params, frame.m)
    if abs(u_sonic - u_small) > 1e-8 * params.u0:
        raise ConvergenceFailure(
            f"frame s={frame.s}, m={frame.m} is not self-sustained: sonic speed {u_sonic} "
            f"differs from the equilibrium {u_small}"
        )
    u_one, pad = _solve_u_one(params, frame, wavelength_eta)
    u_plus = rh_jump(params, frame, u_one)
    sonic = SonicState(u_s=u_sonic, rho_s=frame.m / (u_sonic - frame.s),
                       slope=sonic_slope(params, frame, u_sonic))
    prof = integrate_profile(params, frame, sonic, u_plus=u_plus, u_target=u_one, eps=eps, rtol=rtol)
    far = equilibrium(params, frame.m / (u_minus - frame.s))
    post = ShockState(rho=frame.m / (u_plus - frame.s), u=u_plus)
    # Close the period exactly at wavelength_eta: the integrated span agrees
    # with the wavelength to quadrature precision but may overshoot by
    # rounding, which must not leak past the period (downstream consumers
    # wrap eta modulo the wavelength); any true remainder is an equilibrium
    # plateau.
    if prof.eta[-1] > wavelength_eta:
        eta_fixed = prof.eta.copy()
        eta_fixed[-1] = wavelength_eta
        eta_fixed[-2] = min(eta_fixed[-2], 0.5 * (eta_fixed[-3] + wavelength_eta))
        prof = ProfileBranches(
            eta=eta_fixed, u=prof.u, rho=prof.rho,
            eta_sonic=prof.eta_sonic, i_sonic=prof.i_sonic,
        )
    if pad > 0.0:
        flat_tail = np.linspace(prof.eta[-1], wavelength_eta, 17)[1:]
    else:
        flat_tail = (
            np.asarray((wavelength_eta,)) if wavelength_eta > prof.eta[-1] else np.empty(0)
        )
    return _assemble(
        params,
        frame,
        far,
        post,
        sonic,
        prof,
        "periodic",
        wavelength_eta,
        flat_head=np.empty(0),
        flat_tail=flat_tail,
    )


def match_ring_density(
    params: ModelParams, rho_mean: float, wavelength_eta: float, *, rtol: float = 1e-10
) -> JamitonSolution:
    """Periodic train whose mean density equals the mean density of a ring.

    A train always rides on a far state less dense than its mean, so the far
    density is bracketed between the lower edge of the unstable band and
    rho_mean and resolved with Brent's method on the quadrature mean.
    """
    rho_lo, rho_hi = critical_densities(params)
    if not (rho_lo < rho_mean < rho_hi):
        raise NoJamiton(
            f"ring mean density {rho_mean} lies outside the unstable band ({rho_lo}, {rho_hi})"
        )

    def mean_gap(rho_minus: float) -> float:
        frame, _ = cj_construct(params, rho_minus)
        u_one, _pad = _solve_u_one(params, frame, wavelength_eta)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroStrengthShock)
            u_plus = rh_jump(params, frame, u_one)
        return mean_train_density(params, frame, u_plus, u_one, wavelength_eta) - rho_mean

    lo = rho_lo + 1e-6 * (rho_hi - rho_lo)
    hi = rho_mean * (1.0 - 1e-9)
    if mean_gap(hi) < 0.0 or mean_gap(lo) > 0.0:
        raise ConvergenceFailure(
            f"mean-density matching not bracketed for rho_mean={rho_mean}, wavelength={wavelength_eta}"
        )
    rho_minus = brentq(mean_gap, lo, hi, xtol=1e-14, rtol=1e-12)
    frame, _sonic = cj_construct(params, rho_minus)
    return periodic_train(params, frame, wavelength_eta, rtol=rtol)


@dataclass(frozen=True)
class SweepRow:
    """Existence and wave metrics at one background density."""

    rho_minus: float
    exists: bool
    s: float
    m: float
    amplitude: float
    reason: str


@dataclass(frozen=True)
class SweepResult:
    """Existence map over a density grid, with both band estimates for comparison."""

    rows: tuple[SweepRow, ...]
    band_measured: tuple[float, float] | None
    band_linear: tuple[float, float] | None
    s_monotone: bool


def sweep_existence(params: ModelParams, rho_grid) -> SweepResult:
    """Map each grid density to wave existence and metrics.

    Per-point failures are recorded as non-existence with the reason; the
    measured existence boundary is reported alongside the linear-stability
    band so any discrepancy is visible rather than hidden. Monotonicity of
    the measured wave speed across the grid is reported, not asserted.
    """
    rows = []
    for rho in np.asarray(rho_grid, dtype=float):
        try:
            frame, _sonic = cj_construct(params, rho)
            u_minus = desired_speed(params, rho)
            u_plus = rh_jump(params, frame, u_minus)
            rows.append(
                SweepRow(
                    rho_minus=float(rho),
                    exists=True,
                    s=frame.s,
                    m=frame.m,
                    amplitude=u_minus - u_plus,
                    reason="",
                )
            )
        except (NoJamiton, DomainError, ConvergenceFailure) as exc:
            rows.append(
                SweepRow(
                    rho_minus=float(rho),
                    exists=False,
                    s=math.nan,
                    m=math.nan,
                    amplitude=math.nan,
                    reason=f"{type(exc).__name__}: {exc}",
                )
            )
    existing = [r.rho_minus for r in rows if r.exists]
    band_measured = (min(existing), max(existing)) if existing else None
    try:
        band_linear = critical_densities(params)
    except NoUnstableBand:
        band_linear = None
    speeds = [r.s for r in rows if r.exists]
    s_monotone = bool(
        np.all(np.diff(speeds) >= 0.0) or np.all(np.diff(speeds) <= 0.0)
    ) if len(speeds) >= 2 else True
    return SweepResult(
        rows=tuple(rows),
        band_measured=band_measured,
        band_linear=band_linear,
        s_monotone=s_monotone,
    )
