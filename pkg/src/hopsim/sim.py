"""Hybrid fixed-step simulation of the torque-driven hopping leg.

The plant is the two-mass system embodied as a two-link leg: during stance
the foot is pinned to ideal ground and only the body integrates; in flight
body and foot integrate as a pair coupled by the joint-torque-induced
task-space force, both under gravity.  Phase transitions are detected by
sign crossings (stance pin force for lift-off, foot height for touchdown),
located by linear interpolation within a step.

The module also provides :class:`TwoMassReference`, an RK4-plus-events
integration of the ideal two-mass model itself (the dynamics the closed-form
trajectory solves), used as the numeric oracle for switch times and the hop
period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from . import analytic, control, kinematics
from .errors import SimulationAbort
from .metrics import saturation_ratio
from .model import (
    Gains,
    HopperParams,
    HopPhase,
    LegGeometry,
    MotorParams,
    ValidatedBundle,
)

CONTACT_EPSILON = 1e-9  # touchdown height threshold, m
_MAX_EVENTS_PER_STEP = 4


class Record(NamedTuple):
    """One telemetry row; field order is the CSV column contract."""

    t: float
    phase: str
    y_body: float
    v_body: float
    y_foot: float
    v_foot: float
    theta_hip: float
    theta_knee: float
    thetad_hip: float
    thetad_knee: float
    tau_dyn_hip: float
    tau_dyn_knee: float
    tau_des_hip: float
    tau_des_knee: float
    tau_sat_hip: float
    tau_sat_knee: float
    c_act_hip: float
    c_act_knee: float


class Event(NamedTuple):
    kind: str  # "lift" or "landing"
    t: float
    y_body: float
    v_body: float


@dataclass
class TelemetryLog:
    """Ordered per-tick records plus detected phase events."""

    records: list[Record] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    failure: str | None = None

    def lift_events(self) -> list[Event]:
        return [e for e in self.events if e.kind == "lift"]

    def landing_events(self) -> list[Event]:
        return [e for e in self.events if e.kind == "landing"]

    def csv_header(self) -> str:
        return ",".join(Record._fields)

    def to_csv(self) -> str:
        lines = [self.csv_header()]
        for r in self.records:
            lines.append(
                ",".join(r.phase if i == 1 else repr(v) for i, v in enumerate(r))
            )
        return "\n".join(lines) + "\n"


@dataclass
class SimState:
    t: float
    phase: HopPhase
    y_body: float
    v_body: float
    y_foot: float
    v_foot: float
    joints: kinematics.JointState
    last_cmd: control.JointCommands | None = None
    pin_force: float = 0.0


@dataclass
class RunSetup:
    """Resolved inputs for one simulation run."""

    bundle: ValidatedBundle
    controller: str = "force"  # force | position | spring
    duration: float | None = None
    hops: int | None = None
    dt: float = 2.5e-4
    control_rate: float = 4000.0
    tracking_gains: Gains | None = None
    max_ik_failures: int = 100
    max_duration: float = 30.0  # guard for hop-count runs


@dataclass
class RunResult:
    log: TelemetryLog
    status: str  # "ok" or "aborted: <reason>"
    setup: RunSetup

    @property
    def ok(self) -> bool:
        return self.status == "ok"


# --- leg configuration helpers (raw floats, hot path) ---------------------


def _leg_terms(y_rel: float, geo: LegGeometry):
    """(theta_knee, dy_dknee, dhip_dknee) at a reach-capped leg length."""
    lo = abs(geo.L1 - geo.L2) + 1e-3
    hi = geo.L1 + geo.L2 - 1e-3
    y = min(max(y_rel, lo), hi)
    cos_gamma = (geo.L1**2 + geo.L2**2 - y * y) / (2.0 * geo.L1 * geo.L2)
    cos_gamma = min(1.0, max(-1.0, cos_gamma))
    gamma = math.acos(cos_gamma)
    theta_k = geo.knee_sign * (math.pi - gamma)
    sin_k = math.sin(theta_k)
    cos_k = -cos_gamma
    dy_dknee = -geo.L1 * geo.L2 * sin_k / y
    dhip_dknee = -geo.L2 * (geo.L2 + geo.L1 * cos_k) / (y * y)
    return theta_k, dy_dknee, dhip_dknee


def _force_from_torques(y_rel: float, tau_hip: float, tau_knee: float, geo: LegGeometry) -> float:
    """Vertical task force of held joint torques at the current configuration."""
    _, dy_dknee, dhip_dknee = _leg_terms(y_rel, geo)
    if dy_dknee == 0.0:
        return 0.0
    return (tau_knee + tau_hip * dhip_dknee) / dy_dknee


def joint_state_for(y_rel: float, v_rel: float, geo: LegGeometry) -> kinematics.JointState:
    """Joint angles and rates of the aligned leg at the given length/rate."""
    theta_k, dy_dknee, dhip_dknee = _leg_terms(y_rel, geo)
    theta_h = kinematics.hip_alignment_angle(theta_k, geo)
    if dy_dknee != 0.0:
        thetad_k = v_rel / dy_dknee
    else:
        thetad_k = 0.0
    return kinematics.JointState(
        theta_hip=theta_h,
        theta_knee=theta_k,
        thetad_hip=dhip_dknee * thetad_k,
        thetad_knee=thetad_k,
    )


def _apply_leg_stops(phase, yb, vb, yf, vf, p: HopperParams, geo: LegGeometry):
    """Enforce the mechanical fold/extension stops of the linkage.

    The torque-speed envelope provides no braking above the geared no-load
    speed, so a fast landing can drive the leg into its joint limits; the
    real linkage stops there.  The stops are plastic: relative motion into a
    stop is absorbed (stance: the body stops on the folded or straight leg;
    flight: both masses continue at the common center-of-mass velocity).
    """
    lo = abs(geo.L1 - geo.L2) + 1e-3
    hi = geo.L1 + geo.L2 - 1e-3
    if phase is HopPhase.STANCE:
        if yb < lo:
            yb, vb = lo, max(vb, 0.0)
        elif yb > hi:
            yb, vb = hi, min(vb, 0.0)
        return yb, vb, yf, vf
    y_rel = yb - yf
    if lo <= y_rel <= hi:
        return yb, vb, yf, vf
    cap = lo if y_rel < lo else hi
    total = p.m + p.m_e
    y_com = (p.m * yb + p.m_e * yf) / total
    yb = y_com + p.m_e / total * cap
    yf = y_com - p.m / total * cap
    v_rel = vb - vf
    if (y_rel < lo and v_rel < 0.0) or (y_rel > hi and v_rel > 0.0):
        v_com = (p.m * vb + p.m_e * vf) / total
        vb = vf = v_com
    return yb, vb, yf, vf


ForceLaw = Callable[[float, float], float]  # (y_rel, v_rel) -> task force, N


def _make_force_fn(cmd: control.JointCommands | None, law: ForceLaw | None, geo: LegGeometry) -> ForceLaw:
    if law is not None:
        return law
    tau_h = cmd.hip.tau_des if cmd is not None else 0.0
    tau_k = cmd.knee.tau_des if cmd is not None else 0.0
    return lambda y_rel, v_rel: _force_from_torques(y_rel, tau_h, tau_k, geo)


# --- RK4 sub-steps ---------------------------------------------------------


def _rk4_stance(y, v, dt, p: HopperParams, force):
    """One stance step: body only, foot pinned at the origin."""
    inv_m = 1.0 / p.m
    g = p.g

    def acc(yy, vv):
        return -g + force(yy, vv) * inv_m

    a1 = acc(y, v)
    y2, v2 = y + 0.5 * dt * v, v + 0.5 * dt * a1
    a2 = acc(y2, v2)
    y3, v3 = y + 0.5 * dt * v2, v + 0.5 * dt * a2
    a3 = acc(y3, v3)
    y4, v4 = y + dt * v3, v + dt * a3
    a4 = acc(y4, v4)
    y_n = y + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
    v_n = v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return y_n, v_n


def _rk4_flight(yb, vb, yf, vf, dt, p: HopperParams, force):
    """One flight step: body and foot coupled by the leg force, both falling."""
    inv_m = 1.0 / p.m
    inv_me = 1.0 / p.m_e
    g = p.g

    def acc(yb_, vb_, yf_, vf_):
        f = force(yb_ - yf_, vb_ - vf_)
        return -g + f * inv_m, -g - f * inv_me

    ab1, af1 = acc(yb, vb, yf, vf)
    yb2, vb2 = yb + 0.5 * dt * vb, vb + 0.5 * dt * ab1
    yf2, vf2 = yf + 0.5 * dt * vf, vf + 0.5 * dt * af1
    ab2, af2 = acc(yb2, vb2, yf2, vf2)
    yb3, vb3 = yb + 0.5 * dt * vb2, vb + 0.5 * dt * ab2
    yf3, vf3 = yf + 0.5 * dt * vf2, vf + 0.5 * dt * af2
    ab3, af3 = acc(yb3, vb3, yf3, vf3)
    yb4, vb4 = yb + dt * vb3, vb + dt * ab3
    yf4, vf4 = yf + dt * vf3, vf + dt * af3
    ab4, af4 = acc(yb4, vb4, yf4, vf4)
    yb_n = yb + dt / 6.0 * (vb + 2.0 * vb2 + 2.0 * vb3 + vb4)
    vb_n = vb + dt / 6.0 * (ab1 + 2.0 * ab2 + 2.0 * ab3 + ab4)
    yf_n = yf + dt / 6.0 * (vf + 2.0 * vf2 + 2.0 * vf3 + vf4)
    vf_n = vf + dt / 6.0 * (af1 + 2.0 * af2 + 2.0 * af3 + af4)
    return yb_n, vb_n, yf_n, vf_n


def step(
    state: SimState,
    cmd: control.JointCommands | None,
    dt: float,
    p: HopperParams,
    geo: LegGeometry,
    force_law: ForceLaw | None = None,
) -> SimState:
    """One RK4 substep of the active phase's dynamics under held torques.

    Passing ``force_law`` instead evaluates a continuous task-force law at
    every integrator stage (used by the ideal-spring oracle, which has no
    zero-order hold).  Transition detection is separate; see
    :func:`detect_transition`.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    force = _make_force_fn(cmd, force_law, geo)
    if state.phase is HopPhase.STANCE:
        y, v = _rk4_stance(state.y_body, state.v_body, dt, p, force)
        yf, vf = state.y_foot, state.v_foot
    else:
        y, v, yf, vf = _rk4_flight(
            state.y_body, state.v_body, state.y_foot, state.v_foot, dt, p, force
        )
    y, v, yf, vf = _apply_leg_stops(state.phase, y, v, yf, vf, p, geo)
    if not (math.isfinite(y) and math.isfinite(v) and math.isfinite(yf) and math.isfinite(vf)):
        raise SimulationAbort(f"non-finite state after step at t={state.t + dt:.6f}")
    t = state.t + dt
    pin = p.m_e * p.g + force(y - yf, v - vf) if state.phase is HopPhase.STANCE else 0.0
    return SimState(
        t=t,
        phase=state.phase,
        y_body=y,
        v_body=v,
        y_foot=yf,
        v_foot=vf,
        joints=joint_state_for(y - yf, v - vf, geo),
        last_cmd=cmd,
        pin_force=pin,
    )


# --- event detection -------------------------------------------------------


class Transition(NamedTuple):
    kind: str   # "lift" or "landing"
    frac: float  # fraction of the step at which the crossing occurs


def _crossing(
    phase: HopPhase,
    prev_pin: float,
    next_pin: float,
    prev_yf: float,
    next_yf: float,
    prev_vf: float,
    next_vf: float,
) -> Transition | None:
    """Shared crossing logic for both the run loop and detect_transition.

    In stance, lift-off fires when the pin (ground constraint) force crosses
    zero from above; a nonpositive force at both ends unpins immediately.
    In flight, landing fires when the foot height crosses zero from above
    with downward velocity.  The two cannot fire in the same phase; if a
    re-pinned foot is immediately pulled, landing has already won and the
    lift follows one substep later.
    """
    if phase is HopPhase.STANCE:
        if prev_pin > 0.0 and next_pin <= 0.0:
            return Transition("lift", prev_pin / (prev_pin - next_pin))
        if prev_pin <= 0.0 and next_pin <= 0.0:
            return Transition("lift", 0.0)
        return None
    if prev_yf > CONTACT_EPSILON and next_yf <= CONTACT_EPSILON:
        frac = prev_yf / (prev_yf - next_yf) if prev_yf != next_yf else 0.0
        v_at = prev_vf + frac * (next_vf - prev_vf)
        if v_at < 0.0:
            return Transition("landing", frac)
    elif prev_yf <= CONTACT_EPSILON and next_vf < 0.0:
        # Foot at or below contact level being driven down (a lift that was
        # immediately reversed): re-pin right away.
        return Transition("landing", 0.0)
    return None


def detect_transition(prev: SimState, next_state: SimState, p: HopperParams) -> Event | None:
    """Phase-switch event between two consecutive states, if any.

    The event time is located by linear interpolation within the step.  For
    the ideal-spring command the stance pin-force zero coincides with the
    analytic lift condition on the leg length.
    """
    tr = _crossing(
        prev.phase,
        prev.pin_force,
        next_state.pin_force,
        prev.y_foot,
        next_state.y_foot,
        prev.v_foot,
        next_state.v_foot,
    )
    if tr is None:
        return None
    t = prev.t + tr.frac * (next_state.t - prev.t)
    y = prev.y_body + tr.frac * (next_state.y_body - prev.y_body)
    v = prev.v_body + tr.frac * (next_state.v_body - prev.v_body)
    return Event(tr.kind, t, y, v)


# --- run loop ---------------------------------------------------------------


def _build_controller(setup: RunSetup):
    b = setup.bundle
    name = setup.controller
    if name == "force":
        return control.ForceController(b.params, b.geometry, b.motor, b.gains)
    if name == "position":
        return control.PositionController(
            b.params, b.geometry, b.motor, setup.tracking_gains
        )
    if name == "spring":
        return control.VirtualSpringController(b.params, b.geometry, b.motor)
    raise ValueError(f"unknown controller {name!r} (force, position, spring)")


def initial_state(setup: RunSetup) -> SimState:
    """Pinned stance state at the trajectory start posture, at rest."""
    b = setup.bundle
    p, geo = b.params, b.geometry
    if setup.controller == "spring":
        y0 = analytic.stance_position(0.0, p)
    else:
        y0 = analytic.TrajectoryCycle(p).y_des(0.0)
    lo = abs(geo.L1 - geo.L2) + 1e-3
    hi = geo.L1 + geo.L2 - 1e-3
    y0 = min(max(y0, lo), hi)
    return SimState(
        t=0.0,
        phase=HopPhase.STANCE,
        y_body=y0,
        v_body=0.0,
        y_foot=0.0,
        v_foot=0.0,
        joints=joint_state_for(y0, 0.0, geo),
        pin_force=p.m_e * p.g,
    )


def _record_from(state: SimState, cmd: control.JointCommands) -> Record:
    js = state.joints
    return Record(
        t=state.t,
        phase=state.phase.value,
        y_body=state.y_body,
        v_body=state.v_body,
        y_foot=state.y_foot,
        v_foot=state.v_foot,
        theta_hip=js.theta_hip,
        theta_knee=js.theta_knee,
        thetad_hip=js.thetad_hip,
        thetad_knee=js.thetad_knee,
        tau_dyn_hip=cmd.hip.tau_dyn,
        tau_dyn_knee=cmd.knee.tau_dyn,
        tau_des_hip=cmd.hip.tau_des,
        tau_des_knee=cmd.knee.tau_des,
        tau_sat_hip=cmd.hip.tau_sat,
        tau_sat_knee=cmd.knee.tau_sat,
        c_act_hip=saturation_ratio(cmd.hip.tau_des, cmd.hip.tau_sat),
        c_act_knee=saturation_ratio(cmd.knee.tau_des, cmd.knee.tau_sat),
    )


def run(setup: RunSetup) -> RunResult:
    """Run the control loop at a fixed rate and return the telemetry log.

    Each tick: controller command, plant substeps with transition checks,
    trajectory clock advance.  The run is seed-free and deterministic: the
    same setup produces a bitwise-identical log.  Aborts (non-finite state,
    too many unreachable-trajectory ticks) return a partial log whose
    ``failure`` field carries the reason.
    """
    if (setup.duration is None) == (setup.hops is None):
        raise ValueError("exactly one of duration or hops must be set")
    if setup.dt <= 0.0:
        raise ValueError("dt must be positive")
    if setup.control_rate <= 0.0:
        raise ValueError("control_rate must be positive")

    b = setup.bundle
    p, geo = b.params, b.geometry
    period = 1.0 / setup.control_rate
    n_sub = max(1, round(period / setup.dt))
    dt_sub = period / n_sub
    controller = _build_controller(setup)
    spring_law = controller.force_law if setup.controller == "spring" else None

    t_end = setup.duration if setup.duration is not None else setup.max_duration
    log = TelemetryLog()
    state = initial_state(setup)
    ik_failures = 0

    def abort(reason: str) -> RunResult:
        log.failure = reason
        return RunResult(log, f"aborted: {reason}", setup)

    while state.t < t_end - 1e-12:
        if setup.hops is not None and len(log.landing_events()) >= setup.hops:
            break
        cmd = controller.command(state)
        if cmd.ik_clamped:
            ik_failures += 1
            if ik_failures > setup.max_ik_failures:
                log.records.append(_record_from(state, cmd))
                return abort(
                    f"desired trajectory unreachable for {ik_failures} ticks "
                    f"(limit {setup.max_ik_failures})"
                )
        log.records.append(_record_from(state, cmd))

        force = _make_force_fn(cmd, spring_law, geo)
        try:
            state = _advance_tick(state, cmd, force, dt_sub, n_sub, p, geo, log, controller)
        except SimulationAbort as exc:
            return abort(str(exc))
        if not (math.isfinite(state.y_body) and abs(state.y_body) < 1e6):
            return abort(f"state diverged at t={state.t:.6f}")
        controller.advance(
            period, state.phase, state.y_body - state.y_foot, state.v_body - state.v_foot
        )

    log.records.append(_record_from(state, controller.command(state)))
    return RunResult(log, "ok", setup)


def _advance_tick(state, cmd, force, dt_sub, n_sub, p, geo, log, controller) -> SimState:
    t, phase = state.t, state.phase
    yb, vb, yf, vf = state.y_body, state.v_body, state.y_foot, state.v_foot

    def pin(yb_, vb_, yf_, vf_):
        if phase is not HopPhase.STANCE:
            return 0.0
        return p.m_e * p.g + force(yb_ - yf_, vb_ - vf_)

    for _ in range(n_sub):
        dt_left = dt_sub
        events_seen = 0
        while dt_left > 0.0:
            p_pin = pin(yb, vb, yf, vf)
            if phase is HopPhase.STANCE:
                nyb, nvb = _rk4_stance(yb, vb, dt_left, p, force)
                nyf, nvf = yf, vf
            else:
                nyb, nvb, nyf, nvf = _rk4_flight(yb, vb, yf, vf, dt_left, p, force)
            nyb, nvb, nyf, nvf = _apply_leg_stops(phase, nyb, nvb, nyf, nvf, p, geo)
            if not (math.isfinite(nyb) and math.isfinite(nvb) and math.isfinite(nyf) and math.isfinite(nvf)):
                raise SimulationAbort(f"non-finite state at t={t + dt_left:.6f}")
            tr = None
            if events_seen < _MAX_EVENTS_PER_STEP:
                tr = _crossing(phase, p_pin, pin(nyb, nvb, nyf, nvf), yf, nyf, vf, nvf)
            if tr is None:
                yb, vb, yf, vf = nyb, nvb, nyf, nvf
                t += dt_left
                break
            # Interpolate the state to the event time, switch phase, and
            # integrate the remainder of the substep in the new phase.  A
            # chattering contact is capped per substep; the remainder is then
            # integrated without further event checks.
            events_seen += 1
            f = tr.frac
            t_ev = t + f * dt_left
            yb, vb = yb + f * (nyb - yb), vb + f * (nvb - vb)
            if tr.kind == "landing":
                yf, vf = 0.0, 0.0  # plastic contact: foot kinetic energy lost
                phase = HopPhase.STANCE
                controller.on_touchdown(yb, vb)
            else:
                yf, vf = yf + f * (nyf - yf), vf + f * (nvf - vf)
                phase = HopPhase.FLIGHT
                controller.on_liftoff()
            log.events.append(Event(tr.kind, t_ev, yb, vb))
            dt_left -= f * dt_left
            t = t_ev

    return SimState(
        t=t,
        phase=phase,
        y_body=yb,
        v_body=vb,
        y_foot=yf,
        v_foot=vf,
        joints=joint_state_for(yb - yf, vb - vf, geo),
        last_cmd=cmd,
        pin_force=pin(yb, vb, yf, vf),
    )


# --- two-mass model reference integration ----------------------------------


@dataclass
class ReferenceResult:
    events: list[Event]

    def lift_times(self) -> list[float]:
        return [e.t for e in self.events if e.kind == "lift"]

    def landing_times(self) -> list[float]:
        return [e.t for e in self.events if e.kind == "landing"]

    def first_lift(self) -> float:
        return self.lift_times()[0]

    def hop_period(self) -> float:
        lifts = self.lift_times()
        if len(lifts) < 2:
            raise ValueError("need at least two lift events for a period")
        return lifts[1] - lifts[0]

    def flight_duration(self) -> float:
        return self.landing_times()[0] - self.lift_times()[0]


class TwoMassReference:
    """Numeric integration of the ideal two-mass hopping model.

    Stance integrates the pure spring-mass oscillation of the leg length
    (the dynamics the closed-form stance response solves) and lifts off when
    the model's ground force m_e*g - k_s*(y - y_s_neu) crosses zero.  Flight
    integrates the relative leg-length oscillation of the two masses and
    lands when the leg re-extends through the lift-off length; landing flips
    the sign of the extension rate, which is the model's mirrored stance
    descent.  Event times are located by linear interpolation, so detected
    switch times and hop periods check the closed forms independently.
    """

    def __init__(self, p: HopperParams, dt: float = 2.5e-4):
        self.p = p
        self.dt = dt
        self.y_lift = p.m_e * p.g / p.k_s + p.y_s_neu
        self._mu = p.m * p.m_e / (p.m + p.m_e)

    def _pin(self, y: float) -> float:
        return self.p.m_e * self.p.g - self.p.k_s * (y - self.p.y_s_neu)

    def _acc_stance(self, y: float) -> float:
        return -(self.p.k_s / self.p.m) * (y - self.p.y_s_neu)

    def _acc_flight(self, y: float) -> float:
        return -(self.p.k_s / self._mu) * (y - self.p.y_s_neu)

    def _rk4(self, y, v, dt, acc):
        a1 = acc(y)
        y2, v2 = y + 0.5 * dt * v, v + 0.5 * dt * a1
        a2 = acc(y2)
        y3, v3 = y + 0.5 * dt * v2, v + 0.5 * dt * a2
        a3 = acc(y3)
        y4, v4 = y + dt * v3, v + dt * a3
        a4 = acc(y4)
        return (
            y + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4),
            v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        )

    def run(self, hops: int = 2, t_max: float | None = None) -> ReferenceResult:
        """Integrate until ``hops`` lift events have been seen (plus margin)."""
        p = self.p
        if t_max is None:
            t_max = (hops + 1) * 4.0 * (analytic.hop_period(p))
        t = 0.0
        y = p.y_s_neu - analytic.stance_amplitude(p)
        v = 0.0
        phase = HopPhase.STANCE
        events: list[Event] = []
        lifts = 0
        while t < t_max and lifts < hops + 1:
            if phase is HopPhase.STANCE:
                ny, nv = self._rk4(y, v, self.dt, self._acc_stance)
                f0, f1 = self._pin(y), self._pin(ny)
                if f0 > 0.0 >= f1:
                    frac = f0 / (f0 - f1)
                    t_ev = t + frac * self.dt
                    y_ev = y + frac * (ny - y)
                    v_ev = v + frac * (nv - v)
                    events.append(Event("lift", t_ev, y_ev, v_ev))
                    lifts += 1
                    # finish the substep in flight
                    y, v = self._rk4(y_ev, v_ev, self.dt - frac * self.dt, self._acc_flight)
                    phase = HopPhase.FLIGHT
                    t += self.dt
                    continue
            else:
                ny, nv = self._rk4(y, v, self.dt, self._acc_flight)
                # Landing: the leg re-extends through the lift-off length.
                if y < self.y_lift <= ny and nv > 0.0:
                    frac = (self.y_lift - y) / (ny - y)
                    t_ev = t + frac * self.dt
                    v_ev = v + frac * (nv - v)
                    events.append(Event("landing", t_ev, self.y_lift, v_ev))
                    # Mirrored descent: the body re-enters stance moving down.
                    y_ev, v_ev = self.y_lift, -abs(v_ev)
                    y, v = self._rk4(y_ev, v_ev, self.dt - frac * self.dt, self._acc_stance)
                    phase = HopPhase.STANCE
                    t += self.dt
                    continue
            y, v = ny, nv
            t += self.dt
        return ReferenceResult(events)
