"""Ego-motion compensation of tracked states.

Between two sensor frames the ego vehicle travels d = v Δ and turns by the
cap angle θ = ω Δ. Tracks are predicted in the old ego frame with the
constant velocity model and re-expressed in the new one by

    o' = B(θ) [x + Δ vx - d cos θ, y + Δ vy - d sin θ, vx, vy]
    I' = B(θ) (F I Fᵀ + P_S) B(θ)ᵀ

with B(θ) = blockdiag(R_θ, R_θ). ``rotation_sign=-1`` uses R_{-θ}
instead; see DESIGN.md for which convention the simulator agrees with.

The formula expects velocities over ground expressed in the ego frame. The
tracker keeps relative velocities; ``compensation_affine`` folds the
``to_over_ground``/``to_relative`` conversions into the same affine map.
"""
import bisect
import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError
from ..filtering.kalman import (
    STATE_DIM,
    StateEstimate,
    as_finite,
    symmetrize,
)
from .models import block_rotation

DEFAULT_ROTATION_SIGN = 1


@dataclass(frozen=True)
class EgoMotion:
    """Linear speed v (m/s) and yaw rate omega (rad/s) at time t."""

    t: float
    v: float
    omega: float

    def __post_init__(self):
        for name in ('t', 'v', 'omega'):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidInputError(
                    "{} must be finite, got {}".format(name, value))


@dataclass(frozen=True)
class FrameStep:
    """Elapsed time, cap angle and travelled distance between two frames."""

    delta: float
    theta: float
    d: float

    def __post_init__(self):
        if not math.isfinite(self.delta) or self.delta <= 0:
            raise InvalidInputError(
                "delta must be finite and > 0, got {}".format(self.delta))
        if not (math.isfinite(self.theta) and math.isfinite(self.d)):
            raise InvalidInputError("theta and d must be finite")

    @classmethod
    def from_ego(cls, ego, delta):
        """
        Frame step from the ego motion known at the new frame time

        Arguments:
            * ego (EgoMotion): latest ego motion, None if unknown
            * delta (float): elapsed time between the frames

        Returns:
            * step (FrameStep): θ = ω Δ and d = v Δ (both 0 without ego)
        """
        if ego is None:
            return cls(delta=delta, theta=0.0, d=0.0)
        return cls(delta=delta, theta=ego.omega * delta, d=ego.v * delta)


def compensation_affine(step, rotation_sign=DEFAULT_ROTATION_SIGN, v=0.0,
                        omega=0.0):
    """
    Ego-motion compensation as one affine map of the state

    x' = M x + b and P' = M P Mᵀ + N P_S Nᵀ.

    With v = omega = 0 the map acts on states with velocities over ground.
    Otherwise the states carry relative velocities, and the map includes
    the conversion to over ground velocities with (v, omega) before the
    compensation and back afterwards. Writing J for the quarter turn and R
    for R_{±θ}, the composition reduces to

        M = blockdiag(R, R) [[I + ΔωJ, ΔI], [Δω² I, I - ΔωJ]]
        N = [[R, 0], [-ωJR, R]]

    Arguments:
        * step (FrameStep): motion of the ego vehicle between the frames
        * rotation_sign (int): +1 for R_θ, -1 for R_{-θ}
        * v (float): ego speed of the relative velocity conversion
        * omega (float): ego yaw rate of the relative velocity conversion

    Returns:
        * transform (numpy.ndarray): 4x4 matrix M
        * offset (numpy.ndarray): 4-vector b
        * noise_map (numpy.ndarray): 4x4 matrix N applied to P_S
    """
    delta = step.delta
    angle = rotation_sign * step.theta
    cos, sin = math.cos(angle), math.sin(angle)
    spin = delta * omega
    core = np.array([
        [1.0, -spin, delta, 0.0],
        [spin, 1.0, 0.0, delta],
        [spin * omega, 0.0, 1.0, spin],
        [0.0, spin * omega, -spin, 1.0],
    ])
    transform = block_rotation(angle) @ core
    # translation of the origin, rotated into the new frame
    shift_x = delta * v - step.d * math.cos(step.theta)
    shift_y = -step.d * math.sin(step.theta)
    px = cos * shift_x - sin * shift_y
    py = sin * shift_x + cos * shift_y
    offset = np.array([px, py, cos * v + omega * py - v,
                       sin * v - omega * px])
    noise_map = np.array([
        [cos, -sin, 0.0, 0.0],
        [sin, cos, 0.0, 0.0],
        [omega * sin, omega * cos, cos, -sin],
        [-omega * cos, omega * sin, sin, cos],
    ])
    return transform, offset, noise_map


def apply_affine(means, covs, transform, offset, process_cov, noise_map):
    """
    Affine map of a stack of states

    The covariances go through one (n, 16) x (16, 16) product with the
    Kronecker square of the transform.

    Arguments:
        * means (numpy.ndarray): (n, 4) state means
        * covs (numpy.ndarray): (n, 4, 4) covariances
        * transform (numpy.ndarray): 4x4 matrix M
        * offset (numpy.ndarray): 4-vector b
        * process_cov (numpy.ndarray): 4x4 process noise P_S
        * noise_map (numpy.ndarray): 4x4 matrix N applied to P_S

    Returns:
        * means (numpy.ndarray): M x + b
        * covs (numpy.ndarray): M P Mᵀ + N P_S Nᵀ, symmetrized
    """
    count = len(means)
    size = STATE_DIM * STATE_DIM
    kron = (transform[:, None, :, None] * transform[None, :, None, :])
    covs = (covs.reshape(count, size) @ kron.reshape(size, size).T).reshape(
        count, STATE_DIM, STATE_DIM)
    covs += noise_map @ process_cov @ noise_map.T
    return means @ transform.T + offset, symmetrize(covs)


def compensate_batch(means, covs, step, process_cov,
                     rotation_sign=DEFAULT_ROTATION_SIGN):
    """
    Ego-motion compensation of a stack of states

    Arguments:
        * means (numpy.ndarray): (n, 4) states in the previous ego frame
        * covs (numpy.ndarray): (n, 4, 4) covariances
        * step (FrameStep): motion of the ego vehicle between the frames
        * process_cov (numpy.ndarray): 4x4 process noise of the new frame's
            sensor
        * rotation_sign (int): +1 for R_θ, -1 for R_{-θ}

    Returns:
        * means (numpy.ndarray): states in the new ego frame
        * covs (numpy.ndarray): covariances in the new ego frame
    """
    transform, offset, noise_map = compensation_affine(step, rotation_sign)
    return apply_affine(
        means, covs, transform, offset, process_cov, noise_map)


def ego_compensate(track, step, process_cov,
                   rotation_sign=DEFAULT_ROTATION_SIGN):
    """
    Re-express a tracked state in the new ego frame

    Arguments:
        * track (StateEstimate): state in the previous ego frame, with
            velocities over ground
        * step (FrameStep): motion of the ego vehicle between the frames
        * process_cov (array_like): 4x4 process noise P_S
        * rotation_sign (int): +1 for R_θ (default), -1 for R_{-θ}

    Returns:
        * state (StateEstimate): predicted state in the new ego frame
    """
    process_cov = as_finite(
        process_cov, (STATE_DIM, STATE_DIM), 'process_cov')
    if rotation_sign not in (1, -1):
        raise InvalidInputError(
            "rotation_sign must be 1 or -1, got {}".format(rotation_sign))
    means, covs = compensate_batch(
        track.mean[None, :], track.cov[None, :, :], step,
        process_cov, rotation_sign)
    return StateEstimate(means[0], covs[0])


def over_ground_velocity(x, y, vx, vy, v, omega):
    """
    Velocity over ground, in ego coordinates, of an object seen at (x, y)
    with relative velocity (vx, vy)

    Works elementwise on numpy arrays.

    Arguments:
        * x, y (float): relative position
        * vx, vy (float): relative velocity (derivative of x, y)
        * v (float): ego linear speed
        * omega (float): ego yaw rate

    Returns:
        * (ux, uy) (tuple): over-ground velocity components
    """
    return vx + v - omega * y, vy + omega * x


def _over_ground_transform(v, omega):
    transform = np.eye(STATE_DIM)
    transform[2, 1] = -omega
    transform[3, 0] = omega
    offset = np.array([0.0, 0.0, v, 0.0])
    return transform, offset


def to_over_ground(means, covs, v, omega):
    """Relative-velocity states to over-ground-velocity states."""
    transform, offset = _over_ground_transform(v, omega)
    return means @ transform.T + offset, transform @ covs @ transform.T


def to_relative(means, covs, v, omega):
    """Inverse of ``to_over_ground``."""
    transform, offset = _over_ground_transform(-v, -omega)
    return means @ transform.T + offset, transform @ covs @ transform.T


def latest_ego(ego_times, ego_stream, t):
    """
    Latest ego motion with time <= t

    Arguments:
        * ego_times (list): sorted record times
        * ego_stream (list): records aligned with ego_times
        * t (float): frame timestamp

    Returns:
        * ego (EgoMotion): matching record, None if every record is later
    """
    index = bisect.bisect_right(ego_times, t) - 1
    if index < 0:
        return None
    return ego_stream[index]


class EgoTimeline:

    def __init__(self, records):
        """
        Time-ordered odometry records with "latest before" lookup

        Arguments:
            * records (iterable): EgoMotion records sorted by time
        """
        self.records = list(records)
        self.times = [record.t for record in self.records]
        if any(b < a for a, b in zip(self.times, self.times[1:])):
            raise InvalidInputError("ego motion stream is not time-ordered")

    def __len__(self):
        return len(self.records)

    def latest(self, t):
        """Latest record with time <= t, None if there is none."""
        return latest_ego(self.times, self.records, t)
