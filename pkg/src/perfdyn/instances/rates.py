"""Theoretical rate curves for overlay on measured traces."""

from __future__ import annotations

import math

import numpy as np

from ..core.types import SensitivityParams
from ..errors import InvalidInputError

# Two-snapshot averaging constant sqrt((sqrt(3)+2)/4) ~= 0.9659258; averaged
# retraining converges whenever this times sqrt(eps) M / gamma is below 1,
# i.e. up to sqrt(eps) M / gamma ~= 1.0353.
ARM_TWO_SNAPSHOT_CONSTANT = math.sqrt((math.sqrt(3.0) + 2.0) / 4.0)

RATE_KINDS = ("perdomo_upper", "perdomo_arm_lower", "mofakhami_upper",
              "mofakhami_lower", "arm_upper")


def rate_curve(kind: str, params: SensitivityParams, t_max: int) -> np.ndarray:
    """Curve values at t = 0..t_max.

    perdomo_upper      (eps beta / gamma)^t        last-iterate parameter rate
    perdomo_arm_lower  (eps beta / 2 gamma)^t      snapshot-averaging floor
    mofakhami_upper    (sqrt(eps) M / gamma)^t     last-iterate prediction rate
    mofakhami_lower    ((1/(1/e+2)) sqrt(eps) M / gamma)^t
    arm_upper          (C sqrt(eps) M / gamma)^(t/2), C the two-snapshot
                       constant: envelope of successive-iterate gaps under
                       two-snapshot averaging
    """
    if t_max < 1:
        raise InvalidInputError("t_max must be >= 1")
    t = np.arange(t_max + 1, dtype=float)
    if kind == "perdomo_upper":
        return params.parameter_rate ** t
    if kind == "perdomo_arm_lower":
        return (params.epsilon * params.beta / (2.0 * params.gamma)) ** t
    if kind == "mofakhami_upper":
        return params.prediction_rate ** t
    if kind == "mofakhami_lower":
        return ((1.0 / (1.0 / math.e + 2.0)) * params.prediction_rate) ** t
    if kind == "arm_upper":
        return (ARM_TWO_SNAPSHOT_CONSTANT * params.prediction_rate) ** (t / 2.0)
    raise InvalidInputError(f"unknown rate curve kind {kind!r}; choose from {RATE_KINDS}")
