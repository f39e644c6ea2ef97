"""Closed-form vehicle trajectories along a piecewise constant curvature road.

Positions, headings, velocities and yaw rates are exact, so the relative
ground truth derived from them carries no integration error.
"""
import math
from dataclasses import dataclass

import numpy as np

from ..truth_eval.ground_truth import relative_kinematics
from .scenario import KIND_BEND, KIND_CUSTOM


class Road:

    def __init__(self, segments=()):
        """
        Road starting at the origin heading along +x

        Arguments:
            * segments (list): (length, curvature) pairs; a straight line
                continues past the last one
        """
        segments = [(float(length), float(curv)) for length, curv in segments]
        segments.append((math.inf, 0.0))
        self.lengths = np.array([length for length, _ in segments])
        self.curvatures = np.array([curv for _, curv in segments])
        count = len(segments)
        self.starts = np.zeros(count)
        self.x0 = np.zeros(count)
        self.y0 = np.zeros(count)
        self.psi0 = np.zeros(count)
        for i in range(1, count):
            length = self.lengths[i - 1]
            x, y, psi = self._advance(
                self.x0[i - 1], self.y0[i - 1], self.psi0[i - 1],
                self.curvatures[i - 1], length)
            self.starts[i] = self.starts[i - 1] + length
            self.x0[i], self.y0[i], self.psi0[i] = x, y, psi

    @staticmethod
    def _advance(x0, y0, psi0, curvature, ds):
        psi = psi0 + curvature * ds
        straight = curvature == 0
        safe = np.where(straight, 1.0, curvature)
        x = np.where(straight, x0 + ds * np.cos(psi0),
                     x0 + (np.sin(psi) - np.sin(psi0)) / safe)
        y = np.where(straight, y0 + ds * np.sin(psi0),
                     y0 - (np.cos(psi) - np.cos(psi0)) / safe)
        return x, y, psi

    def pose(self, s):
        """
        Pose at arc length s

        Arguments:
            * s (numpy.ndarray): arc lengths, >= 0

        Returns:
            * x, y (numpy.ndarray): position
            * psi (numpy.ndarray): unwrapped heading
            * curvature (numpy.ndarray): curvature of the road at s
        """
        s = np.asarray(s, dtype=float)
        index = np.clip(
            np.searchsorted(self.starts, s, side='right') - 1,
            0, len(self.starts) - 1)
        curvature = self.curvatures[index]
        x, y, psi = self._advance(
            self.x0[index], self.y0[index], self.psi0[index], curvature,
            s - self.starts[index])
        return x, y, psi, curvature


def bend_segments(lead_in, arc_length, curvature, total_length):
    """Straight lead-in then alternating +/- curvature arcs over a length."""
    segments = []
    if lead_in > 0:
        segments.append((lead_in, 0.0))
    covered = lead_in
    sign = 1.0
    while covered < total_length:
        segments.append((arc_length, sign * curvature))
        covered += arc_length
        sign = -sign
    return segments


@dataclass(frozen=True)
class Sinusoid:
    """mean + amplitude * sin(2 pi t / period) and its integral/derivative."""

    mean: float
    amplitude: float
    period: float

    def value(self, t):
        return self.mean + self.amplitude * np.sin(2 * np.pi * t / self.period)

    def rate(self, t):
        return (self.amplitude * 2 * np.pi / self.period
                * np.cos(2 * np.pi * t / self.period))

    def integral(self, t):
        """Integral from 0 to t."""
        return self.mean * t + self.amplitude * self.period / (2 * np.pi) * (
            1 - np.cos(2 * np.pi * t / self.period))


@dataclass
class VehicleStates:
    """Global kinematics of one vehicle at a set of times."""

    t: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    heading: np.ndarray
    omega: np.ndarray
    speed: np.ndarray


class Scene:

    def __init__(self, config):
        """
        Road and motion profiles of a scenario

        Arguments:
            * config (ScenarioConfig): validated scenario
        """
        self.config = config
        self.speed = Sinusoid(
            config.ego_speed, config.speed_amplitude, config.speed_period)
        self.lateral = Sinusoid(
            config.lateral_offset, config.lateral_amplitude,
            config.lateral_period)
        self.road = Road(self._segments())

    def _segments(self):
        config = self.config
        if config.kind == KIND_CUSTOM:
            return config.segments
        if config.kind == KIND_BEND:
            total = self.speed.integral(config.duration + config.gap_time)
            return bend_segments(
                config.lead_in, config.arc_length, config.curvature,
                total + config.arc_length)
        return []

    @property
    def length(self):
        """Arc length driven by the target over the scenario."""
        return float(self.speed.integral(
            self.config.duration + self.config.gap_time))

    def ego(self, t):
        """Ego vehicle states at times t."""
        t = np.asarray(t, dtype=float)
        speed = self.speed.value(t)
        x, y, psi, curvature = self.road.pose(self.speed.integral(t))
        return VehicleStates(
            t=t,
            position=np.column_stack([x, y]),
            velocity=np.column_stack(
                [speed * np.cos(psi), speed * np.sin(psi)]),
            heading=psi,
            omega=curvature * speed,
            speed=speed,
        )

    def target(self, t):
        """Target vehicle states at times t, gap_time ahead on the road."""
        t = np.asarray(t, dtype=float)
        ahead = t + self.config.gap_time
        speed = self.speed.value(ahead)
        x, y, psi, curvature = self.road.pose(self.speed.integral(ahead))
        offset = self.lateral.value(t)
        offset_rate = self.lateral.rate(t)
        tangent = np.column_stack([np.cos(psi), np.sin(psi)])
        normal = np.column_stack([-np.sin(psi), np.cos(psi)])
        along = speed * (1.0 - offset * curvature)
        return VehicleStates(
            t=t,
            position=np.column_stack([x, y]) + offset[:, None] * normal,
            velocity=along[:, None] * tangent + offset_rate[:, None] * normal,
            heading=psi,
            omega=curvature * speed,
            speed=np.hypot(along, offset_rate),
        )

    def relative(self, t, include_transport=True):
        """(n, 4) target states in the ego frame at times t."""
        ego = self.ego(t)
        target = self.target(t)
        return relative_kinematics(
            target.position - ego.position,
            target.velocity - ego.velocity,
            ego.heading,
            ego.omega,
            include_transport,
        )

    def static_relative(self, points, ego):
        """
        States in the ego frame of fixed global points

        Arguments:
            * points (numpy.ndarray): (m, 2) global positions
            * ego (VehicleStates): ego states at a single time

        Returns:
            * states (numpy.ndarray): (m, 4) relative states
        """
        count = len(points)
        return relative_kinematics(
            points - ego.position[0],
            np.broadcast_to(-ego.velocity[0], (count, 2)),
            np.full(count, ego.heading[0]),
            np.full(count, ego.omega[0]),
        )

    def roadside_points(self, s, offsets):
        """Global positions at arc lengths s shifted by signed offsets."""
        x, y, psi, _ = self.road.pose(s)
        return np.column_stack(
            [x - offsets * np.sin(psi), y + offsets * np.cos(psi)])

