"""Torque laws, the actuator saturation envelope, and controller pipelines.

All commanded torques pass through the same speed-dependent clamp: the joint
cannot exceed the geared torque-speed envelope of its motor.  Three command
sources are provided:

* ForceController  — stance PD law with a large proportional gain, intended
  to ride the saturation envelope through stance.
* PositionController — trajectory-tracking PD on position and velocity error.
* VirtualSpringController — the ideal spring law with bodyweight
  feedforward; used as the analytic oracle for the plant integration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import analytic, kinematics
from .model import Gains, HopperParams, HopPhase, LegGeometry, MotorParams


class ControllerMode(enum.Enum):
    FORCE = "force"
    POSITION = "position"


@dataclass(frozen=True)
class TorqueCommand:
    """One joint's command: raw PD torque, envelope bound, clamped result."""

    tau_dyn: float  # desired raw torque, N*m joint side
    tau_sat: float  # saturation bound at the current speed, N*m
    tau_des: float  # clamped command actually applied, N*m


@dataclass(frozen=True)
class JointCommands:
    """Per-joint commands for one control tick."""

    hip: TorqueCommand
    knee: TorqueCommand
    ik_clamped: bool = False  # desired length was outside reach this tick


def pd_torque(theta_act: float, thetad_act: float, theta_des: float, g: Gains) -> float:
    """Stance PD law: -k_p*(theta_act - theta_des) - k_d*thetad_act.

    Note the damping acts on the absolute joint velocity, not the velocity
    error.
    """
    return -g.k_p * (theta_act - theta_des) - g.k_d * thetad_act


def motor_saturation(thetad_motor: float, m: MotorParams) -> float:
    """Motor-side torque ceiling at the given motor speed; never negative."""
    speed = abs(thetad_motor)
    if speed > m.omega_max:
        return 0.0
    return m.tau_max * (1.0 - speed / m.omega_max)


def back_emf(thetad_act: float, m: MotorParams) -> float:
    """Equivalent damping torque lost to back-EMF, (tau_max/omega_max)*speed."""
    return m.tau_max / m.omega_max * thetad_act


def actuator_saturation(thetad_act: float, m: MotorParams) -> float:
    """Joint-side torque ceiling at the given joint speed.

    The gear multiplies motor torque by R and the motor sees R times the
    joint speed, so this is exactly R*motor_saturation(R*thetad_act).
    """
    return m.R * motor_saturation(m.R * thetad_act, m)


def clamp(tau_dyn: float, tau_sat: float) -> float:
    """Clip a raw torque to the envelope bound, preserving sign."""
    if abs(tau_dyn) <= tau_sat:
        return tau_dyn
    return math.copysign(tau_sat, tau_dyn)


def make_command(tau_dyn: float, thetad_act: float, motor: MotorParams) -> TorqueCommand:
    """Run one raw torque through the envelope clamp."""
    tau_sat = actuator_saturation(thetad_act, motor)
    return TorqueCommand(tau_dyn=tau_dyn, tau_sat=tau_sat, tau_des=clamp(tau_dyn, tau_sat))


def position_tracking_gains(
    motor: MotorParams,
    error_scale: float = 0.35,
    velocity_time_constant: float = 0.02,
) -> Gains:
    """Tracking-servo gains scaled from the actuator envelope.

    The proportional gain commands the full joint stall torque at
    ``error_scale`` radians of error, which keeps the command below the
    low-speed envelope for ordinary tracking errors (the servo trades torque
    headroom for accuracy); the derivative gain weights velocity error with
    the given time constant.
    """
    k_p = motor.R * motor.tau_max / error_scale
    return Gains(k_p=k_p, k_d=velocity_time_constant * k_p)


class _TrajectoryScheduler:
    """Cycle-time bookkeeping synchronized to detected contact events.

    The clock runs freely through stance (wrapping at the period) but pauses
    at the touchdown-ready point while airborne, so a flight that outlasts
    the planned window holds the landing posture.

    A detected touchdown enters a landing segment instead of replaying the
    canonical descent: the desired leg length follows the spring response
    fitted to the actual touchdown state (same stance frequency, amplitude
    and phase from the measured length and rate).  A mismatched canonical
    descent would command a faster drop than the actual fall and yank the
    foot off the ground.  Once the measured leg stops compressing, the clock
    rejoins the canonical ascent at the phase matching the actual leg
    length, so the push always starts from the depth actually reached.
    """

    def __init__(self, cycle: analytic.TrajectoryCycle):
        self.cycle = cycle
        self.t_traj = 0.0
        self._landing = None  # (amplitude, phase) of the fitted descent
        self._landing_tau = 0.0
        self._compressed = False  # leg has been seen compressing since touchdown
        self._omega = analytic.stance_omega(cycle.params)

    def _ascent_phase_for_length(self, y_rel: float) -> float:
        """Canonical ascent time whose leg length matches y_rel (clamped)."""
        p = self.cycle.params
        amp = analytic.stance_amplitude(p)
        ratio = min(1.0, max(-1.0, (p.y_s_neu - y_rel) / amp))
        return math.acos(ratio) / self._omega

    def advance(self, dt: float, phase: HopPhase, y_rel: float, v_rel: float) -> None:
        if self._landing is not None:
            if v_rel < 0.0:
                self._compressed = True
            if phase is HopPhase.STANCE and self._compressed and v_rel >= 0.0:
                self.t_traj = min(self._ascent_phase_for_length(y_rel), self.cycle.t_lo)
                self._landing = None
            else:
                self._landing_tau += dt
            return
        if phase is HopPhase.FLIGHT:
            self.t_traj = min(self.t_traj + dt, self.cycle.touchdown_time)
        else:
            self.t_traj = (self.t_traj + dt) % self.cycle.period

    def on_touchdown(self, y_rel: float, v_rel: float) -> None:
        p = self.cycle.params
        w = self._omega
        dy = y_rel - p.y_s_neu
        b = math.hypot(dy, v_rel / w)
        phi = math.atan2(-v_rel / w, dy)
        self._landing = (b, phi)
        self._landing_tau = 0.0
        self._compressed = v_rel < 0.0

    def targets(self) -> tuple[float, float]:
        """Desired (leg length, leg rate) for the current clock state."""
        if self._landing is not None:
            b, phi = self._landing
            w = self._omega
            # Hold the fitted bottom if the actual leg is still compressing.
            arg = min(w * self._landing_tau + phi, math.pi)
            p = self.cycle.params
            return p.y_s_neu + b * math.cos(arg), -b * w * math.sin(arg)
        t = self.t_traj
        return self.cycle.y_des(t), self.cycle.y_des_rate(t)


class _TrajectoryController:
    """Shared machinery: desired joint targets from the trajectory cycle."""

    def __init__(
        self,
        p: HopperParams,
        geo: LegGeometry,
        motor: MotorParams,
        cycle: analytic.TrajectoryCycle | None = None,
        reach_margin: float = 1e-3,
    ):
        self.params = p
        self.geometry = geo
        self.motor = motor
        self.cycle = cycle if cycle is not None else analytic.TrajectoryCycle(p)
        self.clock = _TrajectoryScheduler(self.cycle)
        lo, hi = kinematics.reach_interval(geo)
        self._y_lo = lo + reach_margin
        self._y_hi = hi - reach_margin

    def advance(self, dt: float, phase: HopPhase, y_rel: float, v_rel: float) -> None:
        self.clock.advance(dt, phase, y_rel, v_rel)

    def on_touchdown(self, y_rel: float, v_rel: float) -> None:
        self.clock.on_touchdown(y_rel, v_rel)

    def on_liftoff(self) -> None:
        pass

    def joint_targets(self) -> tuple[float, float, float, float, bool]:
        """Desired (theta_hip, theta_knee, thetad_hip, thetad_knee, clamped)."""
        y_des, v_des = self.clock.targets()
        clamped = False
        if not (self._y_lo < y_des < self._y_hi):
            y_des = min(max(y_des, self._y_lo), self._y_hi)
            clamped = True
        th_h, th_k = kinematics.inverse_kinematics(y_des, self.geometry)
        if clamped:
            thd_h = thd_k = 0.0
        else:
            thd_h, thd_k = kinematics.joint_rates(th_k, v_des, self.geometry)
        return th_h, th_k, thd_h, thd_k, clamped


class ForceController(_TrajectoryController):
    """Stance torque law with the envelope clamp; rides the envelope when the
    proportional gain is large."""

    mode = ControllerMode.FORCE

    def __init__(self, p, geo, motor, gains: Gains, cycle=None):
        super().__init__(p, geo, motor, cycle)
        self.gains = gains

    def command(self, state) -> JointCommands:
        th_h, th_k, _, _, clamped = self.joint_targets()
        js = state.joints
        tau_h = pd_torque(js.theta_hip, js.thetad_hip, th_h, self.gains)
        tau_k = pd_torque(js.theta_knee, js.thetad_knee, th_k, self.gains)
        return JointCommands(
            hip=make_command(tau_h, js.thetad_hip, self.motor),
            knee=make_command(tau_k, js.thetad_knee, self.motor),
            ik_clamped=clamped,
        )


class PositionController(_TrajectoryController):
    """Trajectory-tracking PD on position and velocity error, then clamped."""

    mode = ControllerMode.POSITION

    def __init__(self, p, geo, motor, tracking_gains: Gains | None = None, cycle=None):
        super().__init__(p, geo, motor, cycle)
        self.gains = (
            tracking_gains
            if tracking_gains is not None
            else position_tracking_gains(motor)
        )

    def command(self, state) -> JointCommands:
        th_h, th_k, thd_h, thd_k, clamped = self.joint_targets()
        js = state.joints
        tau_h = self.gains.k_p * (th_h - js.theta_hip) + self.gains.k_d * (
            thd_h - js.thetad_hip
        )
        tau_k = self.gains.k_p * (th_k - js.theta_knee) + self.gains.k_d * (
            thd_k - js.thetad_knee
        )
        return JointCommands(
            hip=make_command(tau_h, js.thetad_hip, self.motor),
            knee=make_command(tau_k, js.thetad_knee, self.motor),
            ik_clamped=clamped,
        )


class VirtualSpringController:
    """Ideal two-mass spring law with bodyweight feedforward.

    The task force k_s*(y_s_neu - y) + m*g makes the closed-loop stance
    dynamics exactly the analytic stance oscillator, which is what the
    integration-accuracy and energy-audit oracles check against.  The force
    is carried by the knee alone and is evaluated continuously inside the
    integrator stages (no zero-order hold), so the closed loop has no
    discretization of the command itself.
    """

    mode = None

    def __init__(self, p: HopperParams, geo: LegGeometry, motor: MotorParams):
        self.params = p
        self.geometry = geo
        self.motor = motor

    def force_law(self, y_rel: float, v_rel: float) -> float:
        p = self.params
        return p.k_s * (p.y_s_neu - y_rel) + p.m * p.g

    def advance(self, dt: float, phase: HopPhase, y_rel: float, v_rel: float) -> None:
        pass

    def on_touchdown(self, y_rel: float, v_rel: float) -> None:
        pass

    def on_liftoff(self) -> None:
        pass

    def command(self, state) -> JointCommands:
        force = self.force_law(state.y_body - state.y_foot, state.v_body - state.v_foot)
        tau_k = kinematics.knee_torque_for_force(
            force, state.joints.theta_knee, self.geometry
        )
        return JointCommands(
            hip=make_command(0.0, state.joints.thetad_hip, self.motor),
            knee=make_command(tau_k, state.joints.thetad_knee, self.motor),
        )


def force_control_step(state, p, geo, gains, motor) -> JointCommands:
    """One force-controller command with the trajectory evaluated at state.t."""
    ctrl = ForceController(p, geo, motor, gains)
    ctrl.clock.t_traj = state.t % ctrl.cycle.period
    return ctrl.command(state)


def position_control_step(state, p, geo, tracking_gains=None, motor=None) -> JointCommands:
    """One position-controller command with the trajectory evaluated at state.t."""
    motor = motor if motor is not None else MotorParams()
    ctrl = PositionController(p, geo, motor, tracking_gains)
    ctrl.clock.t_traj = state.t % ctrl.cycle.period
    return ctrl.command(state)
