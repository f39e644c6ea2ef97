"""Chi-square validation gate."""
import functools
import math
import numbers

from scipy.stats import chi2

from ..exceptions import InvalidInputError

DEFAULT_GATE_ALPHA = 0.9
DEFAULT_GATE_DOF = 4
# chi2.ppf(0.9, 4)
CHI2_GATE_090_4DOF = 7.779440339734858


@functools.lru_cache(maxsize=64)
def _chi2_quantile(alpha, dof):
    return float(chi2.ppf(alpha, dof))


def chi2_gate_threshold(alpha=DEFAULT_GATE_ALPHA, dof=DEFAULT_GATE_DOF):
    """
    Gate size γ such that P(χ²_dof < γ) = alpha

    Arguments:
        * alpha (float): gate probability, in (0, 1)
        * dof (int): degrees of freedom of the innovation

    Returns:
        * gamma (float): chi-square quantile of order alpha

    Raises:
        * InvalidInputError: alpha outside (0, 1) or dof < 1
    """
    if not isinstance(alpha, numbers.Real) or not math.isfinite(alpha) \
            or not 0.0 < alpha < 1.0:
        raise InvalidInputError(
            "alpha must be in (0, 1), got {}".format(alpha))
    if int(dof) != dof or dof < 1:
        raise InvalidInputError(
            "dof must be a positive integer, got {}".format(dof))
    if alpha == DEFAULT_GATE_ALPHA and dof == DEFAULT_GATE_DOF:
        return CHI2_GATE_090_4DOF
    return _chi2_quantile(float(alpha), int(dof))


def in_gate(d2, gamma):
    """Validation gate test d² < γ, elementwise for arrays."""
    return d2 < gamma
