"""Helpers shared by the configuration dataclasses.

Configuration files are YAML; matrices may be written as 4 diagonal
entries, 16 row-major entries or a nested 4x4 list.
"""
import numpy as np
import yaml

from .exceptions import ConfigError


def load_yaml(path):
    """
    Mapping stored in a YAML file

    Arguments:
        * path (str): file path

    Returns:
        * data (dict): parsed mapping, empty for an empty file

    Raises:
        * ConfigError: the document is not a mapping
    """
    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError(["{}: top level must be a mapping".format(path)])
    return data


def dump_yaml(data, path):
    """Write a mapping as block-style YAML."""
    with open(path, 'w') as f:
        yaml.safe_dump(data, f, default_flow_style=None, sort_keys=False)


def as_matrix(value, name, size=4):
    """
    Square matrix from its configuration spelling

    Arguments:
        * value (list): diagonal, row-major flat list or nested rows
        * name (str): field name for error messages
        * size (int): matrix order

    Returns:
        * matrix (numpy.ndarray): size x size float matrix

    Raises:
        * ConfigError: the value has no matrix reading
    """
    try:
        array = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(["{}: not a numeric matrix".format(name)])
    if array.shape == (size,):
        return np.diag(array)
    if array.shape == (size * size,):
        return array.reshape(size, size)
    if array.shape == (size, size):
        return array
    raise ConfigError([
        "{}: expected {} diagonal entries, {} entries or {}x{} rows".format(
            name, size, size * size, size, size)
    ])


def matrix_to_config(matrix):
    """Diagonal list for diagonal matrices, nested rows otherwise."""
    matrix = np.asarray(matrix, dtype=float)
    if np.count_nonzero(matrix - np.diag(np.diag(matrix))) == 0:
        return [float(value) for value in np.diag(matrix)]
    return [[float(value) for value in row] for row in matrix]


def unknown_keys(data, known, section):
    """Messages for keys of ``data`` that are not in ``known``."""
    return [
        "{}{}: unknown field".format(section, key)
        for key in sorted(set(data) - set(known))
    ]
