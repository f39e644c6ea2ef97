"""Sensor identities shared by filtering, tracking and simulation."""
from enum import Enum

from .exceptions import InvalidInputError


class SensorId(str, Enum):
    """Sensor that produced a frame; the value is the JSONL spelling."""

    LIDAR = 'Lidar'
    RADAR = 'Radar'

    @property
    def mask(self):
        """Bit used in the per-track sensor history mask."""
        return _MASKS[self]

    @classmethod
    def from_mask(cls, mask):
        """Sensors whose bit is set in ``mask``, in declaration order."""
        return tuple(sensor for sensor in cls if mask & _MASKS[sensor])

    @classmethod
    def parse(cls, value):
        """
        Sensor from its name, case insensitive

        Arguments:
            * value (str or SensorId): 'Lidar', 'radar', ...

        Returns:
            * sensor (SensorId): matching member

        Raises:
            * InvalidInputError: unknown sensor name
        """
        if isinstance(value, cls):
            return value
        for sensor in cls:
            if sensor.value.lower() == str(value).lower():
                return sensor
        raise InvalidInputError("Unknown sensor: {}".format(value))


_MASKS = {SensorId.LIDAR: 1, SensorId.RADAR: 2}
