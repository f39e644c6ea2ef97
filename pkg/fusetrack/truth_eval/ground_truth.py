"""Relative ground truth of the target from the RTK fixes of two vehicles.

Both vehicles log global positions and velocities in a fixed reference
frame; the ego vehicle also logs its heading. The target state in the ego
frame is the position difference rotated by minus the heading, and the
time derivative of that quantity for the velocity. Differentiating the
rotation adds the transport term -ω × r.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..exceptions import InvalidInputError
from ..motion.ego import EgoTimeline

logger = logging.getLogger(__name__)

DEFAULT_MAX_GAP = 0.5
QUANTITIES = ('x', 'y', 'vx', 'vy')


class Vehicle(str, Enum):

    EGO = 'Ego'
    TARGET = 'Target'

    @classmethod
    def parse(cls, value):
        """Vehicle from its name, case insensitive."""
        if isinstance(value, cls):
            return value
        for vehicle in cls:
            if vehicle.value.lower() == str(value).lower():
                return vehicle
        raise InvalidInputError("Unknown vehicle: {}".format(value))


def wrap_angle(angle):
    """Angle(s) wrapped into (-π, π]."""
    wrapped = math.pi - np.mod(
        math.pi - np.asarray(angle, dtype=float), 2.0 * math.pi)
    return np.where(wrapped <= -math.pi, wrapped + 2.0 * math.pi, wrapped)


def _check_finite(record, names):
    for name in names:
        value = getattr(record, name)
        if not math.isfinite(value):
            raise InvalidInputError(
                "{} must be finite, got {}".format(name, value))


@dataclass(frozen=True)
class RtkFix:
    """Global position, velocity and (ego only) heading of one vehicle."""

    t: float
    vehicle: Vehicle
    px: float
    py: float
    vx: float
    vy: float
    heading: float = None

    def __post_init__(self):
        object.__setattr__(self, 'vehicle', Vehicle.parse(self.vehicle))
        _check_finite(self, ('t', 'px', 'py', 'vx', 'vy'))
        if self.heading is not None:
            _check_finite(self, ('heading',))
            if not -math.pi < self.heading <= math.pi:
                raise InvalidInputError(
                    "heading must be in (-pi, pi], got {}".format(
                        self.heading))


@dataclass(frozen=True)
class RelativeState:
    """Target position and velocity in the ego frame at time t."""

    t: float
    x: float
    y: float
    vx: float
    vy: float

    def __post_init__(self):
        _check_finite(self, ('t',) + QUANTITIES)

    def as_vector(self):
        return np.array([self.x, self.y, self.vx, self.vy])

    @classmethod
    def from_vector(cls, t, vector):
        return cls(float(t), *(float(value) for value in vector))


def relative_kinematics(dp, dv, heading, omega, include_transport=True):
    """
    Vectorized composition of movements

    Arguments:
        * dp (numpy.ndarray): (n, 2) global position differences
        * dv (numpy.ndarray): (n, 2) global velocity differences
        * heading (numpy.ndarray): (n,) ego headings
        * omega (numpy.ndarray): (n,) ego yaw rates
        * include_transport (bool): subtract ω × r from the velocity

    Returns:
        * states (numpy.ndarray): (n, 4) relative [x, y, vx, vy]
    """
    dp = np.asarray(dp, dtype=float).reshape(-1, 2)
    dv = np.asarray(dv, dtype=float).reshape(-1, 2)
    cos, sin = np.cos(heading), np.sin(heading)
    x = cos * dp[:, 0] + sin * dp[:, 1]
    y = -sin * dp[:, 0] + cos * dp[:, 1]
    vx = cos * dv[:, 0] + sin * dv[:, 1]
    vy = -sin * dv[:, 0] + cos * dv[:, 1]
    if include_transport:
        vx = vx + omega * y
        vy = vy - omega * x
    return np.column_stack([x, y, vx, vy])


def relative_state(ego, target, omega, include_transport=True):
    """
    Target state in the ego frame from simultaneous fixes

    Arguments:
        * ego (RtkFix): ego fix, with heading
        * target (RtkFix): target fix at the same time
        * omega (float): ego yaw rate (rad/s)
        * include_transport (bool): include the rotating frame term

    Returns:
        * state (RelativeState): relative position and velocity

    Raises:
        * InvalidInputError: missing heading or fixes at different times
    """
    if ego.heading is None:
        raise InvalidInputError("ego fix at t={} has no heading".format(ego.t))
    if abs(ego.t - target.t) > 1e-9:
        raise InvalidInputError(
            "fixes must be simultaneous, got t={} and t={}".format(
                ego.t, target.t))
    if not math.isfinite(omega):
        raise InvalidInputError("omega must be finite")
    states = relative_kinematics(
        [target.px - ego.px, target.py - ego.py],
        [target.vx - ego.vx, target.vy - ego.vy],
        np.array([ego.heading]),
        np.array([omega]),
        include_transport,
    )
    return RelativeState.from_vector(ego.t, states[0])


def interpolate_many(times, values, query, max_gap=DEFAULT_MAX_GAP):
    """
    Linear interpolation of a sampled series at several times

    Arguments:
        * times (numpy.ndarray): (n,) sorted sample times
        * values (numpy.ndarray): (n,) or (n, k) samples
        * query (numpy.ndarray): (m,) times to interpolate at
        * max_gap (float): largest bracketing spacing allowed

    Returns:
        * result (numpy.ndarray): (m,) or (m, k) interpolated values, NaN
            where invalid
        * valid (numpy.ndarray): (m,) mask of usable results
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    query = np.atleast_1d(np.asarray(query, dtype=float))
    result = np.full((len(query),) + values.shape[1:], np.nan)
    if not len(times):
        return result, np.zeros(len(query), dtype=bool)
    hi = np.clip(np.searchsorted(times, query, side='left'), 0,
                 len(times) - 1)
    exact = times[hi] == query
    lo = np.clip(hi - 1, 0, len(times) - 1)
    inside = (query > times[0]) & (query < times[-1])
    spacing = times[hi] - times[lo]
    bracketed = inside & ~exact & (spacing <= max_gap) & (spacing > 0)
    result[exact] = values[hi[exact]]
    weight = np.zeros(len(query))
    weight[bracketed] = (
        (query[bracketed] - times[lo[bracketed]]) / spacing[bracketed])
    weight = weight.reshape((-1,) + (1,) * (values.ndim - 1))
    blend = values[lo] + weight * (values[hi] - values[lo])
    result[bracketed] = blend[bracketed]
    return result, exact | bracketed


def interpolate(times, values, t, max_gap=DEFAULT_MAX_GAP):
    """
    Linear interpolation of a sampled series at time t

    Arguments:
        * times (array_like): sorted sample times
        * values (array_like): samples, scalars or vectors
        * t (float): query time
        * max_gap (float): largest bracketing spacing allowed

    Returns:
        * value (float or numpy.ndarray): interpolated value; the sample
            itself at a sample time; None outside the series or across
            a gap larger than max_gap
    """
    result, valid = interpolate_many(times, values, [t], max_gap)
    if not valid[0]:
        return None
    if result.ndim == 1:
        return float(result[0])
    return result[0]


class TruthSeries:

    def __init__(self, states):
        """
        Time-ordered relative ground truth

        Arguments:
            * states (iterable): RelativeState records sorted by time
        """
        self.states = list(states)
        self.times = np.array([state.t for state in self.states])
        self.values = np.array(
            [state.as_vector() for state in self.states]).reshape(-1, 4)
        if np.any(np.diff(self.times) < 0):
            raise InvalidInputError("truth series is not time-ordered")

    def __len__(self):
        return len(self.states)

    def at(self, t, max_gap=DEFAULT_MAX_GAP):
        """Truth 4-vector at t, None when not interpolable."""
        return interpolate(self.times, self.values, t, max_gap)

    def at_many(self, query, max_gap=DEFAULT_MAX_GAP):
        return interpolate_many(self.times, self.values, query, max_gap)


def heading_rate(times, headings):
    """Yaw rate from the derivative of the unwrapped heading."""
    times = np.asarray(times, dtype=float)
    if len(times) < 2:
        return np.zeros(len(times))
    return np.gradient(np.unwrap(np.asarray(headings, dtype=float)), times)


def build_truth(fixes, ego_stream=None, include_transport=True,
                max_gap=DEFAULT_MAX_GAP):
    """
    Relative ground truth on the ego fix timeline

    Target fixes are interpolated at each ego fix time. The yaw rate comes
    from the odometry stream when given, else from the heading derivative.

    Arguments:
        * fixes (iterable): RtkFix records of both vehicles
        * ego_stream (iterable): EgoMotion records, optional
        * include_transport (bool): include the rotating frame term
        * max_gap (float): largest target fix spacing to interpolate over

    Returns:
        * truth (list): RelativeState records, one per usable ego fix

    Raises:
        * InvalidInputError: an ego fix has no heading
    """
    ego_fixes, target_fixes = [], []
    for fix in fixes:
        if fix.vehicle == Vehicle.EGO:
            ego_fixes.append(fix)
        else:
            target_fixes.append(fix)
    ego_fixes.sort(key=lambda fix: fix.t)
    target_fixes.sort(key=lambda fix: fix.t)
    if not ego_fixes or not target_fixes:
        logger.warning(
            "RTK log has %d ego and %d target fixes; no truth produced",
            len(ego_fixes), len(target_fixes))
        return []
    missing = [fix.t for fix in ego_fixes if fix.heading is None]
    if missing:
        raise InvalidInputError(
            "ego fix at t={} has no heading".format(missing[0]))

    times = np.array([fix.t for fix in ego_fixes])
    ego_values = np.array(
        [[fix.px, fix.py, fix.vx, fix.vy] for fix in ego_fixes])
    headings = np.array([fix.heading for fix in ego_fixes])
    target_times = np.array([fix.t for fix in target_fixes])
    target_values = np.array(
        [[fix.px, fix.py, fix.vx, fix.vy] for fix in target_fixes])
    target, valid = interpolate_many(
        target_times, target_values, times, max_gap)

    omega = heading_rate(times, headings)
    timeline = EgoTimeline(ego_stream or ())
    if len(timeline):
        ego_omega, ego_valid = interpolate_many(
            timeline.times, [record.omega for record in timeline.records],
            times, max_gap)
        omega = np.where(ego_valid, ego_omega, omega)

    states = relative_kinematics(
        target[valid, :2] - ego_values[valid, :2],
        target[valid, 2:] - ego_values[valid, 2:],
        headings[valid],
        omega[valid],
        include_transport,
    )
    if not valid.all():
        logger.info(
            "%d ego fixes without a target fix to pair with",
            int((~valid).sum()))
    return [
        RelativeState.from_vector(t, state)
        for t, state in zip(times[valid], states)
    ]
