from .gating import (
    CHI2_GATE_090_4DOF,
    chi2_gate_threshold,
    in_gate,
)
from .kalman import (
    STATE_DIM,
    Innovation,
    NoiseModel,
    StateEstimate,
    batch_predict,
    batch_update,
    gate_distance,
    inverse_covariances,
    kalman_predict,
    kalman_update,
    symmetrize,
)

__all__ = [
    'CHI2_GATE_090_4DOF',
    'STATE_DIM',
    'Innovation',
    'NoiseModel',
    'StateEstimate',
    'batch_predict',
    'batch_update',
    'chi2_gate_threshold',
    'gate_distance',
    'inverse_covariances',
    'in_gate',
    'kalman_predict',
    'kalman_update',
    'symmetrize',
]
