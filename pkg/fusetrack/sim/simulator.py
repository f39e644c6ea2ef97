"""Deterministic sensor, odometry and RTK logs of a following scenario."""
import logging
import math
import os
import zlib
from dataclasses import dataclass

import numpy as np

from ..motion.ego import EgoMotion
from ..records.jsonl import write_jsonl
from ..sensors import SensorId
from ..tracker.types import SensorFrame
from ..truth_eval.ground_truth import (
    RelativeState,
    RtkFix,
    Vehicle,
    wrap_angle,
)
from .trajectory import Scene

logger = logging.getLogger(__name__)

SENSOR_FILE = 'sensor.jsonl'
EGO_FILE = 'ego.jsonl'
RTK_FILE = 'rtk.jsonl'
TRUTH_FILE = 'truth.jsonl'
COUNT_EPS = 1e-9


def stream_rng(seed, name):
    """
    Generator of one named random stream

    Each stream is keyed by the CRC-32 of its name, so adding a stream
    leaves the draws of the others unchanged.

    Arguments:
        * seed (int): scenario seed
        * name (str): stream name, e.g. 'lidar'

    Returns:
        * rng (numpy.random.Generator): independent generator
    """
    sequence = np.random.SeedSequence(
        seed, spawn_key=(zlib.crc32(name.encode('utf-8')),))
    return np.random.default_rng(sequence)


def frame_times(rate_hz, duration, phase=0.0):
    """Emission times phase + k / rate for k < floor(duration * rate)."""
    count = int(math.floor(duration * rate_hz + COUNT_EPS))
    return phase + np.arange(count) / rate_hz


def in_sector(states, fov, max_range):
    """Mask of relative states inside the angular sector and range."""
    bearing = np.arctan2(states[:, 1], states[:, 0])
    inside = np.hypot(states[:, 0], states[:, 1]) <= max_range
    if fov < 2.0 * math.pi:
        inside &= np.abs(bearing) <= fov / 2.0
    return inside


def _noise(rng, cov, count):
    if not np.any(cov):
        return np.zeros((count, 4))
    return rng.multivariate_normal(np.zeros(4), cov, size=count)


def in_windows(times, windows):
    """Mask of times falling in any [start, end) window."""
    mask = np.zeros(len(times), dtype=bool)
    for start, end in windows:
        mask |= (times >= start) & (times < end)
    return mask


@dataclass
class SimulationLog:
    """Everything a simulation run produces."""

    config: object
    frames: list
    ego: list
    rtk: list
    truth: list

    def frames_of(self, sensor):
        sensor = SensorId.parse(sensor)
        return [frame for frame in self.frames if frame.sensor_id == sensor]

    def write(self, out_dir):
        """
        Write the four JSONL files into a directory

        Arguments:
            * out_dir (str): output directory, created if missing

        Returns:
            * paths (dict): 'sensor', 'ego', 'rtk' and 'truth' file paths
        """
        os.makedirs(out_dir, exist_ok=True)
        paths = {
            'sensor': os.path.join(out_dir, SENSOR_FILE),
            'ego': os.path.join(out_dir, EGO_FILE),
            'rtk': os.path.join(out_dir, RTK_FILE),
            'truth': os.path.join(out_dir, TRUTH_FILE),
        }
        write_jsonl(self.frames, paths['sensor'])
        write_jsonl(self.ego, paths['ego'])
        write_jsonl(self.rtk, paths['rtk'])
        write_jsonl(self.truth, paths['truth'])
        return paths


class Simulator:

    def __init__(self, config):
        """
        Simulator of one scenario

        Arguments:
            * config (ScenarioConfig): validated scenario
        """
        self.config = config
        self.scene = Scene(config)
        self.clutter = self._clutter_points()

    def _clutter_points(self):
        config = self.config
        if not config.n_clutter:
            return np.zeros((0, 2))
        rng = stream_rng(config.seed, 'clutter')
        s = rng.uniform(0.0, self.scene.length, config.n_clutter)
        low, high = config.clutter_offset
        offsets = rng.uniform(low, high, config.n_clutter)
        sides = np.where(rng.random(config.n_clutter) < 0.5, -1.0, 1.0)
        return self.scene.roadside_points(s, sides * offsets)

    def sensor_frames(self, sensor_config):
        """
        Frames of one emulated sensor

        Arguments:
            * sensor_config (SensorConfig): the sensor

        Returns:
            * frames (list): SensorFrame objects, target detection first
        """
        config = self.config
        name = sensor_config.sensor.value.lower()
        rng = stream_rng(config.seed, name)
        times = frame_times(
            sensor_config.rate_hz, config.duration, sensor_config.phase)
        count = len(times)
        truth = self.scene.relative(times)

        dropped = in_windows(times, sensor_config.dropout_windows)
        draws = rng.random(count)
        dropped |= draws < sensor_config.dropout_probability
        measured = truth + _noise(rng, sensor_config.obs_cov, count)
        hold = sensor_config.velocity_hold
        if hold > 1:
            measured[:, 2:] = measured[(np.arange(count) // hold) * hold, 2:]
        visible = in_sector(truth, sensor_config.fov, sensor_config.max_range)
        detected = visible & ~dropped

        clutter_rng = stream_rng(config.seed, name + '-clutter')
        frames = []
        for index, t in enumerate(times):
            rows = [measured[index]] if detected[index] else []
            if len(self.clutter):
                states = self.scene.static_relative(
                    self.clutter, self.scene.ego(np.array([t])))
                states = states + _noise(
                    clutter_rng, sensor_config.obs_cov, len(states))
                keep = in_sector(
                    states, sensor_config.fov, sensor_config.max_range)
                rows.extend(states[keep])
            frames.append(SensorFrame(
                float(t), sensor_config.sensor,
                np.array(rows).reshape(-1, 4)))
        logger.info(
            "%s: %d frames, target detected in %d", sensor_config.sensor.value,
            count, int(detected.sum()))
        return frames

    def rtk_times(self):
        """RTK epochs from 0 to duration inclusive."""
        config = self.config
        count = int(math.floor(
            config.duration * config.rtk_rate_hz + COUNT_EPS)) + 1
        return np.arange(count) / config.rtk_rate_hz

    def rtk_fixes(self, times):
        """RTK fixes of both vehicles, ego fix first at every time."""
        config = self.config
        rng = stream_rng(config.seed, 'rtk')
        count = len(times)
        noisy = []
        for states in (self.scene.ego(times), self.scene.target(times)):
            position = states.position + config.rtk_sigma_pos * rng.normal(
                size=(count, 2))
            velocity = states.velocity + config.rtk_sigma_vel * rng.normal(
                size=(count, 2))
            heading = states.heading
            if config.rtk_sigma_heading:
                heading = heading + config.rtk_sigma_heading * rng.normal(
                    size=count)
            noisy.append((position, velocity, wrap_angle(heading)))
        fixes = []
        for index, t in enumerate(times):
            for vehicle, (position, velocity, heading) in zip(
                    (Vehicle.EGO, Vehicle.TARGET), noisy):
                fixes.append(RtkFix(
                    t=float(t),
                    vehicle=vehicle,
                    px=float(position[index, 0]),
                    py=float(position[index, 1]),
                    vx=float(velocity[index, 0]),
                    vy=float(velocity[index, 1]),
                    heading=float(heading[index]),
                ))
        return fixes

    def run(self):
        """
        Simulate the whole scenario

        Returns:
            * log (SimulationLog): sensor frames, ego motion, RTK fixes and
                relative truth
        """
        frames = []
        for sensor_config in self.config.sensors:
            frames.extend(self.sensor_frames(sensor_config))
        frames.sort(key=lambda frame: frame.t)

        times = self.rtk_times()
        ego = self.scene.ego(times)
        ego_records = [
            EgoMotion(float(t), float(v), float(omega))
            for t, v, omega in zip(times, ego.speed, ego.omega)
        ]
        truth = [
            RelativeState.from_vector(t, state)
            for t, state in zip(times, self.scene.relative(times))
        ]
        log = SimulationLog(
            config=self.config,
            frames=frames,
            ego=ego_records,
            rtk=self.rtk_fixes(times),
            truth=truth,
        )
        logger.info(
            "Simulated %s scenario: %.1f s, %d frames, %d RTK epochs",
            self.config.kind, self.config.duration, len(frames), len(times))
        return log


def simulate(config):
    """
    Run a scenario

    Arguments:
        * config (ScenarioConfig): validated scenario

    Returns:
        * log (SimulationLog): the generated logs, deterministic for a
            given config and seed
    """
    return Simulator(config).run()
