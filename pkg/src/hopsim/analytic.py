"""Closed-form trajectory generator for one hop cycle.

Stance is the cosine response of the spring-mass system starting at maximum
compression; flight is the relative (leg-length) oscillation of the two
masses over exactly one period; the two are stitched into a periodic desired
trajectory with a position compensation coefficient applied over the second
half of the cycle.

Two closed forms are kept for the flight segment.  ``flight_position`` is
the legacy amplitude-sum form; it disagrees with a direct integration of the
two-mass flight dynamics, so the trajectory generator uses
``flight_leg_length`` instead, which matches that integration to machine
precision.  The discrepancy is logged when a cycle is built.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .errors import DegenerateFlightWindowError, NoLiftOffError
from .model import HopperParams, HopPhase

logger = logging.getLogger(__name__)

_EQ_FORM_TOL = 1e-4  # agreement threshold between the two flight closed forms


@dataclass(frozen=True)
class LiftState:
    """Leg length, extension rate and time at lift-off."""

    y_lo: float  # body-to-foot distance at lift-off, m
    v_lo: float  # its rate at lift-off, m/s (positive at a genuine lift-off)
    t_lo: float  # lift-off time, s


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    y_des: float
    phase: HopPhase


def stance_omega(p: HopperParams) -> float:
    """Angular frequency of the stance oscillation, sqrt(k_s/m)."""
    return math.sqrt(p.k_s / p.m)


def stance_amplitude(p: HopperParams) -> float:
    """Amplitude of the stance cosine, C_amp + m*g/k_s."""
    return p.C_amp + p.m * p.g / p.k_s


def stance_position(t: float, p: HopperParams) -> float:
    """Leg length during stance, starting at maximum compression at t=0."""
    return stance_amplitude(p) * math.cos(stance_omega(p) * t + math.pi) + p.y_s_neu


def stance_velocity(t: float, p: HopperParams) -> float:
    """Analytic time derivative of :func:`stance_position`."""
    w = stance_omega(p)
    return -stance_amplitude(p) * w * math.sin(w * t + math.pi)


def relative_period(p: HopperParams) -> float:
    """Period of the leg-length oscillation in flight, 2*pi*sqrt(mu/k_s)."""
    mu = p.m * p.m_e / (p.m + p.m_e)
    return 2.0 * math.pi * math.sqrt(mu / p.k_s)


def flight_omega(p: HopperParams) -> float:
    """Angular frequency of the flight leg-length oscillation."""
    return math.sqrt(p.k_s * (p.m + p.m_e) / (p.m * p.m_e))


def switch_times(p: HopperParams) -> tuple[float, float]:
    """Lift-off and landing times (t_lo, t_ld) of the hop cycle.

    Lift-off is the first nonnegative time at which the ascending stance
    response reaches the lift condition length m_e*g/k_s + y_s_neu; the
    nonnegative branch pi - arccos(...) is returned (the arccos(...) - pi
    form is its negative).  Landing follows one leg-length period later.
    """
    arg = p.m_e * p.g / (p.k_s * stance_amplitude(p))
    if arg > 1.0:
        raise NoLiftOffError(
            "no lift-off: spring cannot support foot weight at amplitude "
            f"(condition argument {arg:.4g} > 1)"
        )
    t_lo = math.sqrt(p.m / p.k_s) * (math.pi - math.acos(arg))
    return t_lo, t_lo + relative_period(p)


def lift_state(p: HopperParams) -> LiftState:
    """Stance state at the lift-off condition."""
    t_lo, _ = switch_times(p)
    return LiftState(
        y_lo=stance_position(t_lo, p),
        v_lo=stance_velocity(t_lo, p),
        t_lo=t_lo,
    )


def hop_period(p: HopperParams) -> float:
    """Period of continuous hopping: 2*t_lo plus one leg-length period."""
    t_lo, _ = switch_times(p)
    return 2.0 * t_lo + relative_period(p)


def _amplitude_radicals(p: HopperParams, ls: LiftState) -> tuple[float, float]:
    """Both radicals of the legacy amplitude-sum flight form.

    The second radical carries mass exponents (m**3 paired with a leading m)
    that are one reason this form disagrees with the two-mass integration;
    see :func:`flight_amplitude` for the consistent amplitude.
    """
    total = p.m + p.m_e
    r1 = math.sqrt(
        p.m * ls.v_lo**2 * p.m_e**3 / (p.k_s * total**3)
        + ls.y_lo**2 * p.m_e**2 / total**2
    )
    r2 = math.sqrt(
        p.m * ls.v_lo**2 * p.m**3 / (p.k_s * total**3)
        + ls.y_lo**2 * p.m**2 / total**2
    )
    return r1, r2


def flight_position(t: float, p: HopperParams, ls: LiftState) -> float:
    """Legacy amplitude-sum form of the flight leg length at time t.

    Kept for comparison; the trajectory generator uses
    :func:`flight_leg_length`, which agrees with direct integration of the
    two-mass flight dynamics.
    """
    r1, r2 = _amplitude_radicals(p, ls)
    w = flight_omega(p)
    return (r1 + r2) * math.cos(w * t) + p.y_s_neu


def flight_window(p: HopperParams, ls: LiftState) -> tuple[float, float]:
    """Effective time range (t_f_s, t_f_e) of the legacy flight response.

    Uses that form's product phase argument (a length times a radical);
    arguments outside [-1, 1] raise DegenerateFlightWindowError.  The window
    length t_f_e - t_f_s is one leg-length period regardless.
    """
    r1, _ = _amplitude_radicals(p, ls)
    arg = ls.y_lo * p.m_e / (p.m + p.m_e) * r1
    if not -1.0 <= arg <= 1.0:
        raise DegenerateFlightWindowError(
            f"degenerate flight window: phase argument {arg:.4g} outside [-1, 1]"
        )
    mu = p.m * p.m_e / (p.m + p.m_e)
    t_f_s = -math.sqrt(mu / p.k_s) * math.acos(arg)
    return t_f_s, t_f_s + relative_period(p)


def flight_amplitude(p: HopperParams, ls: LiftState) -> float:
    """Leg-length oscillation amplitude consistent with the flight dynamics.

    From the lift-off state: stretch s0 = y_lo - y_s_neu and rate v_lo give
    B = sqrt(s0**2 + v_lo**2 * mu / k_s).
    """
    mu = p.m * p.m_e / (p.m + p.m_e)
    s0 = ls.y_lo - p.y_s_neu
    return math.sqrt(s0 * s0 + ls.v_lo**2 * mu / p.k_s)


def flight_phase_offset(p: HopperParams, ls: LiftState) -> float:
    """Phase of the flight cosine at lift-off (ascending branch)."""
    b = flight_amplitude(p, ls)
    s0 = ls.y_lo - p.y_s_neu
    if b == 0.0:
        return 0.0
    return math.acos(min(1.0, max(-1.0, s0 / b)))


def flight_leg_length(tau: float, p: HopperParams, ls: LiftState) -> float:
    """Leg length tau seconds after lift-off, from the two-mass flight dynamics.

    Equals the relative-coordinate integration of the flight equations to
    machine precision: starts at y_lo extending with rate v_lo, swings once
    through the full oscillation, and returns to the same state after one
    leg-length period.
    """
    b = flight_amplitude(p, ls)
    alpha = flight_phase_offset(p, ls)
    return p.y_s_neu + b * math.cos(flight_omega(p) * tau - alpha)


def flight_leg_velocity(tau: float, p: HopperParams, ls: LiftState) -> float:
    """Time derivative of :func:`flight_leg_length`."""
    b = flight_amplitude(p, ls)
    alpha = flight_phase_offset(p, ls)
    w = flight_omega(p)
    return -b * w * math.sin(w * tau - alpha)


def compensation(t: float, T: float, C_max: float) -> float:
    """Position compensation coefficient over one cycle.

    Unity over the first half of the cycle, then a cosine dip of depth C_max
    that returns to unity at t = T; continuous at T/2 and T.  Times outside
    [0, T] are reduced modulo T.
    """
    t = t % T
    if t < T / 2.0:
        return 1.0
    return 0.5 * C_max * math.cos(4.0 * math.pi * t / T) - 0.5 * C_max + 1.0


def compensation_rate(t: float, T: float, C_max: float) -> float:
    """Time derivative of :func:`compensation`."""
    t = t % T
    if t < T / 2.0:
        return 0.0
    return -0.5 * C_max * (4.0 * math.pi / T) * math.sin(4.0 * math.pi * t / T)


class TrajectoryCycle:
    """Precomputed desired trajectory of one hop cycle.

    The cycle is: stance ascent on [0, t_lo), flight on [t_lo, T - t_lo]
    (one full leg-length oscillation), and the mirrored stance descent on
    (T - t_lo, T], all scaled by the compensation coefficient.  The mirrored
    descent makes the cycle continuous at the flight boundaries and exactly
    periodic.  Evaluation is a pure function of time; instances are immutable
    and safe to share.
    """

    def __init__(self, p: HopperParams):
        self.params = p
        self.t_lo, self.t_ld = switch_times(p)
        self.lift = lift_state(p)
        self.period = hop_period(p)
        self.flight_duration = relative_period(p)
        self.touchdown_time = self.period - self.t_lo  # == t_ld
        # Compare the legacy flight form against the dynamics-consistent one
        # at mid-window; they are known to disagree, and the latter wins.
        try:
            t_f_s, t_f_e = flight_window(p, self.lift)
            legacy_mid = flight_position((t_f_s + t_f_e) / 2.0, p, self.lift)
        except DegenerateFlightWindowError:
            legacy_mid = math.nan
        consistent_mid = flight_leg_length(self.flight_duration / 2.0, p, self.lift)
        self.flight_form_discrepancy = abs(legacy_mid - consistent_mid)
        if not self.flight_form_discrepancy <= _EQ_FORM_TOL:
            logger.info(
                "amplitude-sum flight form disagrees with two-mass integration "
                "by %.6g m at mid-window; using the dynamics-consistent segment",
                self.flight_form_discrepancy,
            )

    def phase(self, t: float) -> HopPhase:
        t = t % self.period
        if t < self.t_lo or t > self.touchdown_time:
            return HopPhase.STANCE
        return HopPhase.FLIGHT

    def leg_length(self, t: float) -> float:
        """Uncompensated leg length at cycle time t."""
        t = t % self.period
        if t < self.t_lo:
            return stance_position(t, self.params)
        if t <= self.touchdown_time:
            return flight_leg_length(t - self.t_lo, self.params, self.lift)
        return stance_position(self.period - t, self.params)

    def leg_velocity(self, t: float) -> float:
        t = t % self.period
        if t < self.t_lo:
            return stance_velocity(t, self.params)
        if t <= self.touchdown_time:
            return flight_leg_velocity(t - self.t_lo, self.params, self.lift)
        return -stance_velocity(self.period - t, self.params)

    def y_des(self, t: float) -> float:
        """Compensated desired leg length at cycle time t."""
        return compensation(t % self.period, self.period, self.params.C_max) * self.leg_length(t)

    def y_des_rate(self, t: float) -> float:
        """Time derivative of :meth:`y_des` (product rule with the compensation)."""
        t = t % self.period
        c = compensation(t, self.period, self.params.C_max)
        cdot = compensation_rate(t, self.period, self.params.C_max)
        return c * self.leg_velocity(t) + cdot * self.leg_length(t)

    def sample(self, t: float) -> TrajectorySample:
        return TrajectorySample(t=t, y_des=self.y_des(t), phase=self.phase(t))


def desired_trajectory(t: float, p: HopperParams) -> TrajectorySample:
    """Desired task-space sample at time t (reduced modulo the hop period).

    Convenience wrapper; callers evaluating many samples should build one
    :class:`TrajectoryCycle` and reuse it.
    """
    return TrajectoryCycle(p).sample(t)
