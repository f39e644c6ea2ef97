"""Constant velocity motion model."""
import math

import numpy as np

from ..exceptions import InvalidInputError


def cv_transition(delta):
    """
    Constant velocity transition matrix over an elapsed time

    Arguments:
        * delta (float): elapsed time Δ in seconds, > 0

    Returns:
        * F (numpy.ndarray): 4x4 matrix with Δ at (x, vx) and (y, vy)

    Raises:
        * InvalidInputError: Δ not finite or not positive
    """
    if not math.isfinite(delta) or delta <= 0:
        raise InvalidInputError(
            "delta must be finite and > 0, got {}".format(delta))
    transition = np.eye(4)
    transition[0, 2] = delta
    transition[1, 3] = delta
    return transition


def rotation(theta):
    """2x2 counterclockwise rotation matrix of angle theta."""
    cos, sin = math.cos(theta), math.sin(theta)
    return np.array([[cos, -sin], [sin, cos]])


def block_rotation(theta):
    """4x4 matrix rotating both the position and the velocity by theta."""
    rot = rotation(theta)
    block = np.zeros((4, 4))
    block[:2, :2] = rot
    block[2:, 2:] = rot
    return block
