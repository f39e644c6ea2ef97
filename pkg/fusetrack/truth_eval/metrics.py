"""Accuracy of sensor and fused outputs against the relative ground truth.

The target is identified in every output as the nearest non-static
object to the interpolated truth. Errors are reported as mean squared
errors per quantity, together with the fraction of outputs in which the
target was found.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..exceptions import (
    InsufficientDataError,
    InvalidInputError,
    UndefinedMseError,
)
from ..filtering.kalman import STATE_DIM, NoiseModel
from ..motion.ego import EgoTimeline, over_ground_velocity
from ..motion.models import cv_transition
from ..sensors import SensorId
from .ground_truth import DEFAULT_MAX_GAP, QUANTITIES, TruthSeries

logger = logging.getLogger(__name__)

SOURCE_FUSION = 'Fusion'
SOURCES = (SensorId.RADAR.value, SensorId.LIDAR.value, SOURCE_FUSION)
DEFAULT_STATIC_THRESHOLD = 0.5
DEFAULT_INFLATION = 1.5
REPORT_COLUMNS = ['source', 'quantity', 'mse', 'n', 'availability']


def object_states(output):
    """(n, 4) object states of a FusedList or SensorFrame."""
    if hasattr(output, 'means'):
        return output.means
    return output.measurements


def match_target(objects, truth, ego_speed,
                 static_threshold=DEFAULT_STATIC_THRESHOLD, ego_omega=0.0):
    """
    Index of the object that stands for the target

    Arguments:
        * objects (FusedList or SensorFrame): candidate objects, relative
            velocities
        * truth (RelativeState or array_like): target truth [x, y, ...]
        * ego_speed (float): ego speed (m/s); 0 for objects that already
            carry velocities over ground
        * static_threshold (float): objects with a ground speed at or
            below this value are static
        * ego_omega (float): ego yaw rate (rad/s)

    Returns:
        * index (int): nearest non-static object, None if there is none
    """
    states = np.asarray(object_states(objects)).reshape(-1, STATE_DIM)
    if not len(states):
        return None
    if hasattr(truth, 'as_vector'):
        truth = truth.as_vector()
    truth = np.asarray(truth, dtype=float)
    ux, uy = over_ground_velocity(
        states[:, 0], states[:, 1], states[:, 2], states[:, 3],
        ego_speed, ego_omega)
    moving = np.hypot(ux, uy) > static_threshold
    if not moving.any():
        return None
    distances = np.hypot(states[:, 0] - truth[0], states[:, 1] - truth[1])
    distances[~moving] = np.inf
    return int(np.argmin(distances))


def _quantity_index(quantity):
    try:
        return QUANTITIES.index(quantity)
    except ValueError:
        raise InvalidInputError(
            "quantity must be one of {}, got {!r}".format(
                QUANTITIES, quantity))


def mse(series_sensor, series_truth, quantity, max_gap=DEFAULT_MAX_GAP):
    """
    Mean squared error of one quantity

    Arguments:
        * series_sensor (list): RelativeState samples of the source
        * series_truth (list or TruthSeries): RelativeState ground truth
        * quantity (str): one of 'x', 'y', 'vx', 'vy'
        * max_gap (float): largest truth spacing to interpolate over

    Returns:
        * mse (float): mean of the squared errors over the samples where
            the truth is interpolable

    Raises:
        * UndefinedMseError: no sample could be paired with the truth
    """
    index = _quantity_index(quantity)
    pairs = paired_residuals(series_sensor, series_truth, max_gap)
    if not len(pairs):
        raise UndefinedMseError(
            "no {} sample overlaps the ground truth".format(quantity))
    errors = pairs[:, 0, index] - pairs[:, 1, index]
    return float(np.mean(errors ** 2))


def paired_residuals(samples, truth, max_gap=DEFAULT_MAX_GAP):
    """
    Source samples paired with the truth interpolated at their time

    Arguments:
        * samples (list): RelativeState samples of one source
        * truth (list or TruthSeries): RelativeState ground truth
        * max_gap (float): largest truth spacing to interpolate over

    Returns:
        * pairs (numpy.ndarray): (n, 2, 4) [sample, truth] vectors
    """
    if not isinstance(truth, TruthSeries):
        truth = TruthSeries(truth)
    samples = list(samples)
    if not samples:
        return np.zeros((0, 2, STATE_DIM))
    times = np.array([sample.t for sample in samples])
    values = np.array([sample.as_vector() for sample in samples])
    expected, valid = truth.at_many(times, max_gap)
    return np.stack([values[valid], expected[valid]], axis=1)


def _check_inflation(inflation):
    if not np.isfinite(inflation) or inflation <= 0:
        raise InvalidInputError(
            "inflation must be finite and > 0, got {}".format(inflation))


def estimate_noise_cov(paired, inflation=DEFAULT_INFLATION):
    """
    Diagonal observation noise from (sensor, truth) pairs

    Arguments:
        * paired (array_like): (n, 2, 4) pairs or a list of
            (sensor 4-vector, truth 4-vector)
        * inflation (float): factor applied to the sample variances

    Returns:
        * cov (numpy.ndarray): 4x4 diagonal matrix of inflated unbiased
            variances of the residuals

    Raises:
        * InsufficientDataError: fewer than 2 pairs
    """
    _check_inflation(inflation)
    paired = np.asarray(paired, dtype=float).reshape(-1, 2, STATE_DIM)
    if len(paired) < 2:
        raise InsufficientDataError(
            "need at least 2 pairs, got {}".format(len(paired)))
    residuals = paired[:, 0, :] - paired[:, 1, :]
    return np.diag(inflation * np.var(residuals, axis=0, ddof=1))


def estimate_process_cov(truth, period, inflation=DEFAULT_INFLATION,
                         max_gap=DEFAULT_MAX_GAP):
    """
    Diagonal process noise from the truth's departure from constant velocity

    Each truth sample is predicted ``period`` seconds ahead with the
    constant velocity model and compared with the truth at that time.

    Arguments:
        * truth (list or TruthSeries): RelativeState ground truth
        * period (float): sensor period (s)
        * inflation (float): factor applied to the sample variances
        * max_gap (float): largest truth spacing to interpolate over

    Returns:
        * cov (numpy.ndarray): 4x4 diagonal process noise

    Raises:
        * InsufficientDataError: fewer than 2 predictions could be checked
    """
    _check_inflation(inflation)
    if not isinstance(truth, TruthSeries):
        truth = TruthSeries(truth)
    predicted = truth.values @ cv_transition(period).T
    expected, valid = truth.at_many(truth.times + period, max_gap)
    if valid.sum() < 2:
        raise InsufficientDataError(
            "need at least 2 truth samples one period apart, got {}".format(
                int(valid.sum())))
    residuals = predicted[valid] - expected[valid]
    return np.diag(inflation * np.var(residuals, axis=0, ddof=1))


@dataclass
class TargetSeries:
    """Target samples found in a sequence of outputs of one source."""

    source: str
    times: np.ndarray
    states: np.ndarray
    truth: np.ndarray
    found: np.ndarray

    @property
    def availability(self):
        """Fraction of outputs, with truth available, holding the target."""
        if not len(self.found):
            return float('nan')
        return float(self.found.mean())

    @property
    def residuals(self):
        return self.states[self.found] - self.truth[self.found]


def target_series(source, outputs, truth, ego_stream=(),
                  static_threshold=DEFAULT_STATIC_THRESHOLD,
                  max_gap=DEFAULT_MAX_GAP, window=None):
    """
    Match the target in every output of one source

    Arguments:
        * source (str): 'Radar', 'Lidar' or 'Fusion'
        * outputs (iterable): FusedList or SensorFrame objects
        * truth (list or TruthSeries): RelativeState ground truth
        * ego_stream (iterable): EgoMotion records; without them the
            static filter is disabled
        * static_threshold (float): ground speed separating static objects
        * max_gap (float): largest truth spacing to interpolate over
        * window (tuple): optional (start, end) time range

    Returns:
        * series (TargetSeries): per output state, truth and found flag;
            outputs where the truth is not interpolable are left out
    """
    if not isinstance(truth, TruthSeries):
        truth = TruthSeries(truth)
    timeline = EgoTimeline(ego_stream or ())
    threshold = static_threshold
    if not len(timeline):
        logger.warning(
            "No ego motion for %s: static object filter disabled", source)
        threshold = -np.inf
    outputs = [
        output for output in outputs
        if window is None or window[0] <= output.t <= window[1]
    ]
    times = np.array([output.t for output in outputs], dtype=float)
    expected, valid = truth.at_many(times, max_gap)
    states = np.full((len(outputs), STATE_DIM), np.nan)
    found = np.zeros(len(outputs), dtype=bool)
    for index, output in enumerate(outputs):
        if not valid[index]:
            continue
        ego = timeline.latest(output.t)
        match = match_target(
            output, expected[index],
            ego.v if ego is not None else 0.0,
            threshold,
            ego.omega if ego is not None else 0.0,
        )
        if match is not None:
            states[index] = object_states(output)[match]
            found[index] = True
    return TargetSeries(
        source=source,
        times=times[valid],
        states=states[valid],
        truth=expected[valid],
        found=found[valid],
    )


class MseReport:

    def __init__(self, frame):
        """
        MSE table with one row per (source, quantity)

        Arguments:
            * frame (pandas.DataFrame): columns source, quantity, mse, n,
                availability
        """
        self.frame = frame.loc[:, REPORT_COLUMNS].reset_index(drop=True)

    @classmethod
    def from_series(cls, series):
        """
        Report built from matched target series

        Arguments:
            * series (list): TargetSeries, one per source

        Returns:
            * report (MseReport): 4 rows per source

        Raises:
            * UndefinedMseError: no source holds a single matched sample
        """
        rows = []
        for item in series:
            residuals = item.residuals
            n = len(residuals)
            if n == 0:
                logger.warning("%s never matched the target", item.source)
            for index, quantity in enumerate(QUANTITIES):
                rows.append({
                    'source': item.source,
                    'quantity': quantity,
                    'mse': float(np.mean(residuals[:, index] ** 2))
                    if n else float('nan'),
                    'n': n,
                    'availability': item.availability,
                })
        if not rows or all(row['n'] == 0 for row in rows):
            raise UndefinedMseError(
                "no output overlaps the ground truth; MSE is undefined")
        return cls(pd.DataFrame(rows, columns=REPORT_COLUMNS))

    def __len__(self):
        return len(self.frame)

    @property
    def sources(self):
        return list(dict.fromkeys(self.frame['source']))

    def value(self, source, quantity, column='mse'):
        """Entry of the table for one source and quantity."""
        rows = self.frame[(self.frame['source'] == source)
                          & (self.frame['quantity'] == quantity)]
        if rows.empty:
            raise InvalidInputError(
                "no row for {} {}".format(source, quantity))
        return rows.iloc[0][column]

    def to_csv(self, path=None):
        """CSV text, written to path when given."""
        return self.frame.to_csv(path, index=False)

    def to_json(self, path=None):
        """JSON list of row objects, written to path when given."""
        return self.frame.to_json(path, orient='records')


def evaluate(fused_lists, sensor_frames, truth, ego_stream=(),
             static_threshold=DEFAULT_STATIC_THRESHOLD,
             max_gap=DEFAULT_MAX_GAP, window=None):
    """
    MSE report of the raw sensors and of the fusion

    Arguments:
        * fused_lists (iterable): FusedList outputs of the tracker
        * sensor_frames (iterable): SensorFrame inputs, both sensors
        * truth (list or TruthSeries): RelativeState ground truth
        * ego_stream (iterable): EgoMotion records
        * static_threshold (float): ground speed separating static objects
        * max_gap (float): largest truth spacing to interpolate over
        * window (tuple): optional (start, end) time range

    Returns:
        * report (MseReport): rows for Radar, Lidar and Fusion, sources
            without any output are left out

    Raises:
        * UndefinedMseError: no output overlaps the truth
    """
    if not isinstance(truth, TruthSeries):
        truth = TruthSeries(truth)
    ego_stream = list(ego_stream or ())
    frames = list(sensor_frames or ())
    outputs = {
        SensorId.RADAR.value: [
            frame for frame in frames if frame.sensor_id == SensorId.RADAR],
        SensorId.LIDAR.value: [
            frame for frame in frames if frame.sensor_id == SensorId.LIDAR],
        SOURCE_FUSION: list(fused_lists or ()),
    }
    series = [
        target_series(
            source, outputs[source], truth, ego_stream, static_threshold,
            max_gap, window)
        for source in SOURCES if outputs[source]
    ]
    report = MseReport.from_series(series)
    logger.info("Evaluated %s against %d truth samples",
                ', '.join(report.sources), len(truth))
    return report


def calibrate_noise(sensor_frames, truth, ego_stream=(),
                    inflation=DEFAULT_INFLATION,
                    static_threshold=DEFAULT_STATIC_THRESHOLD,
                    max_gap=DEFAULT_MAX_GAP, obs_floor=1e-6):
    """
    Per-sensor noise models estimated against the ground truth

    The observation noise comes from the target detections paired with
    the truth; the process noise from the truth itself over one period of
    the sensor.

    Arguments:
        * sensor_frames (iterable): SensorFrame inputs, both sensors
        * truth (list or TruthSeries): RelativeState ground truth
        * ego_stream (iterable): EgoMotion records
        * inflation (float): factor applied to the sample variances
        * static_threshold (float): ground speed separating static objects
        * max_gap (float): largest truth spacing to interpolate over
        * obs_floor (float): smallest observation variance kept

    Returns:
        * noise (dict): SensorId -> NoiseModel for each sensor with frames

    Raises:
        * InsufficientDataError: a sensor matched the target fewer than
            twice
    """
    if not isinstance(truth, TruthSeries):
        truth = TruthSeries(truth)
    ego_stream = list(ego_stream or ())
    frames = list(sensor_frames)
    noise = {}
    for sensor in SensorId:
        outputs = [frame for frame in frames if frame.sensor_id == sensor]
        if not outputs:
            continue
        series = target_series(
            sensor.value, outputs, truth, ego_stream, static_threshold,
            max_gap)
        paired = np.stack(
            [series.states[series.found], series.truth[series.found]],
            axis=1)
        obs_cov = estimate_noise_cov(paired, inflation)
        obs_cov = np.diag(np.maximum(np.diag(obs_cov), obs_floor))
        period = float(np.median(np.diff([frame.t for frame in outputs]))) \
            if len(outputs) > 1 else 1.0
        process_cov = estimate_process_cov(truth, period, inflation, max_gap)
        noise[sensor] = NoiseModel(process_cov, obs_cov, sensor)
        logger.info(
            "%s noise from %d pairs over a %.3f s period", sensor.value,
            len(paired), period)
    return noise
