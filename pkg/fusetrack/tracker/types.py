"""Value types exchanged by the fusion pipeline."""
import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import InvalidInputError
from ..filtering.kalman import STATE_DIM, StateEstimate, as_finite
from ..sensors import SensorId


def _readonly(array):
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class Detection:
    """Relative position (m) and velocity (m/s) of one detected obstacle."""

    x: float
    y: float
    vx: float
    vy: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.vx,
                                               self.vy)):
            raise InvalidInputError("detection has non-finite entries")

    def as_vector(self):
        return np.array([self.x, self.y, self.vx, self.vy])


@dataclass(frozen=True, eq=False)
class SensorFrame:
    """Detections emitted by one sensor at time t, one row per detection."""

    t: float
    sensor_id: SensorId
    measurements: np.ndarray = field(
        default_factory=lambda: np.zeros((0, STATE_DIM)))

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise InvalidInputError("frame time must be finite")
        object.__setattr__(self, 'sensor_id', SensorId.parse(self.sensor_id))
        measurements = np.reshape(
            np.asarray(self.measurements, dtype=float), (-1, STATE_DIM))
        measurements = as_finite(
            measurements, measurements.shape, 'measurements')
        object.__setattr__(self, 'measurements', _readonly(measurements))

    @classmethod
    def from_detections(cls, t, sensor_id, detections):
        """
        Frame from a list of detections

        Arguments:
            * t (float): emission time
            * sensor_id (SensorId): emitting sensor
            * detections (list): Detection objects

        Returns:
            * frame (SensorFrame): new frame
        """
        rows = [detection.as_vector() for detection in detections]
        return cls(t, sensor_id, np.array(rows).reshape(-1, STATE_DIM))

    @property
    def detections(self):
        return tuple(Detection(*map(float, row)) for row in self.measurements)

    def __len__(self):
        return len(self.measurements)


@dataclass(frozen=True, eq=False)
class Track:
    """A fused obstacle: state plus identity and bookkeeping."""

    id: int
    state: StateEstimate
    age: int
    created_at: float
    updated_at: float
    last_sensor: SensorId
    misses: int = 0
    sensors: tuple = ()

    def __post_init__(self):
        if self.age < 1:
            raise InvalidInputError("track age must be >= 1")
        if self.updated_at < self.created_at:
            raise InvalidInputError("track updated before its creation")
        object.__setattr__(
            self, 'last_sensor', SensorId.parse(self.last_sensor))
        sensors = self.sensors or (self.last_sensor,)
        object.__setattr__(
            self, 'sensors', tuple(SensorId.parse(s) for s in sensors))


@dataclass(frozen=True, eq=False)
class FusedList:
    """
    Fused obstacle list FO_k, stored column-wise

    Row i of every array describes one track. ``tracks`` builds Track
    objects from the columns.
    """

    t: float
    ids: np.ndarray
    means: np.ndarray
    covs: np.ndarray
    ages: np.ndarray
    misses: np.ndarray
    created_at: np.ndarray
    updated_at: np.ndarray
    last_sensor: np.ndarray
    sensor_masks: np.ndarray
    next_id: int
    sensor: SensorId = None

    def __post_init__(self):
        n = len(self.ids)
        if self.means.shape != (n, STATE_DIM) or \
                self.covs.shape != (n, STATE_DIM, STATE_DIM):
            raise InvalidInputError("fused list columns disagree on length")
        for name in ('ids', 'means', 'covs', 'ages', 'misses', 'created_at',
                     'updated_at', 'last_sensor', 'sensor_masks'):
            column = getattr(self, name)
            if len(column) != n:
                raise InvalidInputError(
                    "fused list column {} has wrong length".format(name))
            _readonly(column)

    @classmethod
    def empty(cls, t, next_id=0, sensor=None):
        """Fused list without tracks at time t."""
        return cls(
            t=t,
            ids=np.zeros(0, dtype=np.int64),
            means=np.zeros((0, STATE_DIM)),
            covs=np.zeros((0, STATE_DIM, STATE_DIM)),
            ages=np.zeros(0, dtype=np.int64),
            misses=np.zeros(0, dtype=np.int64),
            created_at=np.zeros(0),
            updated_at=np.zeros(0),
            last_sensor=np.zeros(0, dtype=np.int8),
            sensor_masks=np.zeros(0, dtype=np.int8),
            next_id=next_id,
            sensor=sensor,
        )

    @classmethod
    def from_tracks(cls, t, tracks, next_id=None, sensor=None):
        """
        Fused list holding the given tracks

        Arguments:
            * t (float): list timestamp
            * tracks (list): Track objects with unique ids
            * next_id (int): id counter, defaults to max id + 1
            * sensor (SensorId): sensor of the last processed frame

        Returns:
            * fused (FusedList): new list

        Raises:
            * InvalidInputError: duplicate ids
        """
        tracks = list(tracks)
        ids = np.array([track.id for track in tracks], dtype=np.int64)
        if len(np.unique(ids)) != len(ids):
            raise InvalidInputError("track ids must be unique")
        if next_id is None:
            next_id = int(ids.max()) + 1 if len(ids) else 0
        if not tracks:
            return cls.empty(t, next_id=next_id, sensor=sensor)
        return cls(
            t=t,
            ids=ids,
            means=np.array([track.state.mean for track in tracks]),
            covs=np.array([track.state.cov for track in tracks]),
            ages=np.array([track.age for track in tracks], dtype=np.int64),
            misses=np.array(
                [track.misses for track in tracks], dtype=np.int64),
            created_at=np.array([track.created_at for track in tracks]),
            updated_at=np.array([track.updated_at for track in tracks]),
            last_sensor=np.array(
                [track.last_sensor.mask for track in tracks], dtype=np.int8),
            sensor_masks=np.array(
                [sum(s.mask for s in set(track.sensors)) for track in tracks],
                dtype=np.int8),
            next_id=next_id,
            sensor=sensor,
        )

    def __len__(self):
        return len(self.ids)

    @property
    def tracks(self):
        return [self._track(index) for index in range(len(self))]

    def _track(self, index):
        return Track(
            id=int(self.ids[index]),
            state=StateEstimate(self.means[index], self.covs[index]),
            age=int(self.ages[index]),
            created_at=float(self.created_at[index]),
            updated_at=float(self.updated_at[index]),
            last_sensor=SensorId.from_mask(int(self.last_sensor[index]))[0],
            misses=int(self.misses[index]),
            sensors=SensorId.from_mask(int(self.sensor_masks[index])),
        )

    def track(self, track_id):
        """
        Track with the given id

        Arguments:
            * track_id (int): track identity

        Returns:
            * track (Track): matching track, None when absent
        """
        matches = np.flatnonzero(self.ids == track_id)
        if not len(matches):
            return None
        return self._track(int(matches[0]))
