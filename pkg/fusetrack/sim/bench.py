"""Latency benchmark of one fusion cycle."""
import gc
import logging
import os
import time
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError
from ..motion.ego import EgoMotion
from ..tracker.config import TrackerConfig
from ..tracker.gnn import init_list, step
from ..tracker.types import SensorFrame
from .scenario import LIDAR_RATE_HZ, RADAR_PHASE, RADAR_RATE_HZ
from .simulator import frame_times, stream_rng

logger = logging.getLogger(__name__)

REFERENCE_US = 15.0
LATENCY_BOUND_US = 100.0
BENCH_EGO_SPEED = 20.0


@dataclass
class BenchReport:
    """Wall-clock durations of the timed ``step`` calls."""

    n_obstacles: int
    samples_ns: np.ndarray

    @property
    def n_cycles(self):
        return len(self.samples_ns)

    @property
    def median_us(self):
        return float(np.median(self.samples_ns)) / 1e3

    @property
    def p99_us(self):
        return float(np.percentile(self.samples_ns, 99)) / 1e3

    @property
    def max_us(self):
        return float(np.max(self.samples_ns)) / 1e3

    @property
    def within_bound(self):
        return self.median_us <= LATENCY_BOUND_US

    def to_dict(self):
        return {
            'n_obstacles': self.n_obstacles,
            'n_cycles': self.n_cycles,
            'median_us': self.median_us,
            'p99_us': self.p99_us,
            'max_us': self.max_us,
            'reference_us': REFERENCE_US,
            'bound_us': LATENCY_BOUND_US,
        }


def synthetic_frames(n_obstacles, n_cycles, seed, config):
    """
    Interleaved Lidar/Radar frames of obstacles driving with the ego vehicle

    Arguments:
        * n_obstacles (int): persistent obstacles, at least 2.5 m apart
        * n_cycles (int): frames after the initial one
        * seed (int): random seed
        * config (TrackerConfig): gives each sensor's noise

    Returns:
        * frames (list): n_cycles + 1 SensorFrame objects in time order
    """
    rng = stream_rng(seed, 'bench')
    columns = int(np.ceil(np.sqrt(n_obstacles)))
    grid = np.array(
        [(10.0 + 5.0 * (k // columns), -10.0 + 5.0 * (k % columns))
         for k in range(n_obstacles)])
    positions = grid + rng.uniform(-1.0, 1.0, grid.shape)
    states = np.column_stack([positions, np.zeros((n_obstacles, 2))])

    duration = (n_cycles + 2) / (LIDAR_RATE_HZ + RADAR_RATE_HZ) + 1.0
    timeline = sorted(
        [(t, 'Lidar') for t in frame_times(LIDAR_RATE_HZ, duration)]
        + [(t, 'Radar') for t in frame_times(
            RADAR_RATE_HZ, duration, RADAR_PHASE)])[:n_cycles + 1]
    frames = []
    for t, sensor in timeline:
        obs_cov = config.noise_model(sensor).obs_cov
        noise = rng.multivariate_normal(np.zeros(4), obs_cov, n_obstacles)
        frames.append(SensorFrame(float(t), sensor, states + noise))
    return frames


def _pin_cpu():
    if not hasattr(os, 'sched_setaffinity'):
        return None
    previous = os.sched_getaffinity(0)
    os.sched_setaffinity(0, {min(previous)})
    return previous


def bench(n_obstacles=50, n_cycles=10000, seed=0, config=None, pin=True):
    """
    Time ``step`` on synthetic frames with persistent obstacles

    Frames are generated before timing; only the ``step`` call is inside
    the timed region, with the garbage collector disabled.

    Arguments:
        * n_obstacles (int): obstacles per frame, >= 1
        * n_cycles (int): timed cycles, >= 1
        * seed (int): random seed
        * config (TrackerConfig): tracker settings
        * pin (bool): pin the process to one CPU where supported

    Returns:
        * report (BenchReport): one sample per cycle

    Raises:
        * InvalidInputError: n_obstacles or n_cycles < 1
    """
    if n_obstacles < 1:
        raise InvalidInputError(
            "n_obstacles must be >= 1, got {}".format(n_obstacles))
    if n_cycles < 1:
        raise InvalidInputError(
            "n_cycles must be >= 1, got {}".format(n_cycles))
    config = config if config is not None else TrackerConfig()
    frames = synthetic_frames(n_obstacles, n_cycles, seed, config)
    ego = EgoMotion(0.0, BENCH_EGO_SPEED, 0.0)
    samples = np.zeros(n_cycles, dtype=np.int64)

    previous = _pin_cpu() if pin else None
    gc_enabled = gc.isenabled()
    gc.disable()
    try:
        fused = init_list(frames[0], config.noise_model(frames[0].sensor_id))
        for index, frame in enumerate(frames[1:]):
            start = time.perf_counter_ns()
            fused = step(fused, frame, ego, config)
            samples[index] = time.perf_counter_ns() - start
    finally:
        if gc_enabled:
            gc.enable()
        if previous is not None:
            os.sched_setaffinity(0, previous)
    report = BenchReport(n_obstacles, samples)
    logger.info(
        "step with %d obstacles: median %.1f us, p99 %.1f us, max %.1f us",
        n_obstacles, report.median_us, report.p99_us, report.max_us)
    return report
