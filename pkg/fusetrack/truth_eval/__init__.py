from .ground_truth import (
    QUANTITIES,
    RelativeState,
    RtkFix,
    TruthSeries,
    Vehicle,
    build_truth,
    heading_rate,
    interpolate,
    interpolate_many,
    relative_kinematics,
    relative_state,
    wrap_angle,
)
from .metrics import (
    SOURCE_FUSION,
    SOURCES,
    MseReport,
    TargetSeries,
    calibrate_noise,
    estimate_noise_cov,
    estimate_process_cov,
    evaluate,
    match_target,
    mse,
    paired_residuals,
    target_series,
)

__all__ = [
    'QUANTITIES',
    'SOURCE_FUSION',
    'SOURCES',
    'MseReport',
    'RelativeState',
    'RtkFix',
    'TargetSeries',
    'TruthSeries',
    'Vehicle',
    'build_truth',
    'calibrate_noise',
    'estimate_noise_cov',
    'estimate_process_cov',
    'evaluate',
    'heading_rate',
    'interpolate',
    'interpolate_many',
    'match_target',
    'mse',
    'paired_residuals',
    'relative_kinematics',
    'relative_state',
    'target_series',
    'wrap_angle',
]
