from .certificates import CertificateReport, chi2_certificate, w1_certificate
from .mofakhami import (
    MofakhamiLowerBoundInstance,
    MofakhamiTightnessInstance,
    mofakhami_lowerbound_update,
    mofakhami_tightness_update,
)
from .negative_feedback import (
    NegativeFeedbackInstance,
    censored_gaussian_mean,
    censored_gaussian_sq_mean,
)
from .perdomo import (
    PerdomoLowerBoundInstance,
    PerdomoTightnessInstance,
    perdomo_lowerbound_update,
    perdomo_tightness_update,
)
from .rates import ARM_TWO_SNAPSHOT_CONSTANT, RATE_KINDS, rate_curve

__all__ = [
    "ARM_TWO_SNAPSHOT_CONSTANT",
    "CertificateReport",
    "MofakhamiLowerBoundInstance",
    "MofakhamiTightnessInstance",
    "NegativeFeedbackInstance",
    "PerdomoLowerBoundInstance",
    "PerdomoTightnessInstance",
    "RATE_KINDS",
    "censored_gaussian_mean",
    "censored_gaussian_sq_mean",
    "chi2_certificate",
    "mofakhami_lowerbound_update",
    "mofakhami_tightness_update",
    "perdomo_lowerbound_update",
    "perdomo_tightness_update",
    "rate_curve",
    "w1_certificate",
]
