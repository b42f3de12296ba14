from .base import (
    DiscreteBase,
    FeatureSchema,
    GaussianBlocksBase,
    load_credit_csv,
    synthetic_discrete_base,
    synthetic_gaussian_base,
)
from .environment import (
    CreditDataset,
    InnerSettings,
    cell_expected_loss,
    credit_environment_step,
    draw_dataset,
    exact_risk,
    pooled_atom_targets,
    run_credit_experiment,
)
from .mechanism import (
    RejectionRule,
    SensitivityCertificate,
    model_values_table,
    rir_density,
    rir_density_table,
    rir_sample,
    rir_sample_batch,
    rir_sensitivity_certificate,
    rir_sensitivity_constant,
)
from .model import CreditModel, adam_train

__all__ = [
    "CreditDataset",
    "CreditModel",
    "DiscreteBase",
    "FeatureSchema",
    "GaussianBlocksBase",
    "InnerSettings",
    "RejectionRule",
    "SensitivityCertificate",
    "adam_train",
    "cell_expected_loss",
    "credit_environment_step",
    "draw_dataset",
    "exact_risk",
    "load_credit_csv",
    "model_values_table",
    "pooled_atom_targets",
    "rir_density",
    "rir_density_table",
    "rir_sample",
    "rir_sample_batch",
    "rir_sensitivity_certificate",
    "rir_sensitivity_constant",
    "run_credit_experiment",
    "synthetic_discrete_base",
    "synthetic_gaussian_base",
]
