"""perfdyn: simulation and verification of performative-prediction
retraining dynamics (repeated risk minimization, repeated gradient descent,
and affine risk minimizers over snapshot histories), with analytic problem
instances, a resample-if-rejected credit-scoring environment, a two-firm
pricing game, and a seeded experiment harness."""

__version__ = "0.1.0"
