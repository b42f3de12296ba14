"""Base distributions for the resample-if-rejected environment.

Features split into a strategic block (resampled when a prediction is
rejected) and a non-strategic block (never touched). A discrete base stores
the joint over a product grid of strategic x non-strategic atoms (cell
probabilities need not factorize; unseen cells are reachable after
resampling). Discrete bases unlock exact shifted densities; the Gaussian
base is sampling-only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ..core.rng import spawn
from ..errors import IngestionError, InvalidInputError


@dataclass(frozen=True)
class FeatureSchema:
    """Index bookkeeping: which of the n_features columns are strategic."""

    n_features: int = 11
    strategic: tuple = (0, 1)

    def __post_init__(self):
        strat = tuple(sorted(int(i) for i in self.strategic))
        if len(strat) != len(set(strat)):
            raise InvalidInputError("strategic indices must be distinct")
        if not strat or len(strat) >= self.n_features:
            raise InvalidInputError("strategic and non-strategic sets must both be non-empty")
        if strat[0] < 0 or strat[-1] >= self.n_features:
            raise InvalidInputError("strategic indices out of range")
        object.__setattr__(self, "strategic", strat)

    @property
    def non_strategic(self) -> tuple:
        return tuple(i for i in range(self.n_features) if i not in self.strategic)


@dataclass(frozen=True)
class DiscreteBase:
    """Exact-density base over strategic atoms x non-strategic atoms.

    joint[i, j] is the probability of (strategic_atoms[i],
    nonstrategic_atoms[j]); label_p1[i, j] is P(y = 1 | that cell).
    """

    schema: FeatureSchema
    strategic_atoms: np.ndarray      # (S, len(strategic))
    nonstrategic_atoms: np.ndarray   # (F, len(non_strategic))
    joint: np.ndarray                # (S, F), sums to 1
    label_p1: np.ndarray             # (S, F) in [0, 1]

    is_discrete: bool = True

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.strategic_atoms, dtype=float))
        f = np.atleast_2d(np.asarray(self.nonstrategic_atoms, dtype=float))
        joint = np.asarray(self.joint, dtype=float)
        p1 = np.asarray(self.label_p1, dtype=float)
        if joint.shape != (len(s), len(f)) or p1.shape != joint.shape:
            raise InvalidInputError("joint and label tables must be (S, F)")
        if np.any(joint < 0) or not np.isclose(joint.sum(), 1.0, atol=1e-9):
            raise InvalidInputError("joint must be a probability table")
        if np.any((p1 < 0) | (p1 > 1)):
            raise InvalidInputError("label probabilities must lie in [0, 1]")
        object.__setattr__(self, "strategic_atoms", s)
        object.__setattr__(self, "nonstrategic_atoms", f)
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "label_p1", p1)

    @property
    def n_strategic_atoms(self) -> int:
        return len(self.strategic_atoms)

    @property
    def n_nonstrategic_atoms(self) -> int:
        return len(self.nonstrategic_atoms)

    @property
    def strategic_probs(self) -> np.ndarray:
        return self.joint.sum(axis=1)

    @property
    def nonstrategic_probs(self) -> np.ndarray:
        return self.joint.sum(axis=0)

    @property
    def is_product(self) -> bool:
        return bool(np.allclose(
            self.joint, np.outer(self.strategic_probs, self.nonstrategic_probs), atol=1e-12))

    def assemble(self, s_idx: np.ndarray, f_idx: np.ndarray) -> np.ndarray:
        """Full feature rows for strategic/non-strategic atom indices."""
        s_idx = np.atleast_1d(s_idx)
        f_idx = np.atleast_1d(f_idx)
        x = np.empty((len(s_idx), self.schema.n_features))
        x[:, list(self.schema.strategic)] = self.strategic_atoms[s_idx]
        x[:, list(self.schema.non_strategic)] = self.nonstrategic_atoms[f_idx]
        return x

    def support(self) -> np.ndarray:
        """All (S*F, n_features) cells, strategic-major order."""
        s_idx, f_idx = np.divmod(np.arange(self.n_strategic_atoms * self.n_nonstrategic_atoms),
                                 self.n_nonstrategic_atoms)
        return self.assemble(s_idx, f_idx)

    def cell_of(self, x: np.ndarray) -> tuple[int, int]:
        """Indices of the cell matching a full feature vector."""
        x = np.asarray(x, dtype=float)
        xs = x[list(self.schema.strategic)]
        xf = x[list(self.schema.non_strategic)]
        si = np.nonzero(np.all(np.isclose(self.strategic_atoms, xs, atol=1e-12), axis=1))[0]
        fi = np.nonzero(np.all(np.isclose(self.nonstrategic_atoms, xf, atol=1e-12), axis=1))[0]
        if len(si) != 1 or len(fi) != 1:
            raise InvalidInputError("feature vector does not match a unique support cell")
        return int(si[0]), int(fi[0])


@dataclass(frozen=True)
class GaussianBlocksBase:
    """Sampling-only base: independent Gaussian strategic and non-strategic
    blocks, logistic label model p(y=1|x) = sigmoid(w.x + b)."""

    schema: FeatureSchema
    strategic_mean: np.ndarray
    strategic_sd: float
    nonstrategic_mean: np.ndarray
    nonstrategic_sd: float
    label_w: np.ndarray
    label_b: float

    is_discrete: bool = False

    def sample_strategic(self, rng: np.random.Generator, n: int) -> np.ndarray:
        k = len(self.schema.strategic)
        return self.strategic_mean + self.strategic_sd * rng.standard_normal((n, k))

    def sample_nonstrategic(self, rng: np.random.Generator, n: int) -> np.ndarray:
        k = len(self.schema.non_strategic)
        return self.nonstrategic_mean + self.nonstrategic_sd * rng.standard_normal((n, k))

    def label_p1_rows(self, x: np.ndarray) -> np.ndarray:
        z = np.asarray(x, dtype=float) @ self.label_w + self.label_b
        return 1.0 / (1.0 + np.exp(-z))


def synthetic_discrete_base(seed: int, n_features: int = 11,
                            strategic_indices=(0, 1), atoms_per_feature: int = 4,
                            n_nonstrategic_atoms: int = 8) -> DiscreteBase:
    """Seeded synthetic base with independent blocks: a product grid of
    strategic values (atoms_per_feature per strategic feature) against a
    cloud of non-strategic atoms, labels from a logistic model that leans
    on the strategic block."""
    schema = FeatureSchema(n_features=n_features, strategic=tuple(strategic_indices))
    rng = spawn(seed, 97)
    k_s, k_f = len(schema.strategic), len(schema.non_strategic)

    grids = [np.sort(rng.uniform(-1.0, 1.0, size=atoms_per_feature)) for _ in range(k_s)]
    mesh = np.meshgrid(*grids, indexing="ij")
    strategic_atoms = np.stack([m.ravel() for m in mesh], axis=1)
    s_probs = rng.gamma(2.0, size=len(strategic_atoms))
    s_probs /= s_probs.sum()

    nonstrategic_atoms = rng.normal(0.0, 1.0, size=(n_nonstrategic_atoms, k_f))
    f_probs = rng.gamma(2.0, size=n_nonstrategic_atoms)
    f_probs /= f_probs.sum()

    w = np.empty(n_features)
    w[list(schema.strategic)] = rng.normal(0.0, 2.0, size=k_s)
    w[list(schema.non_strategic)] = rng.normal(0.0, 0.5, size=k_f)
    b = float(rng.normal(0.0, 0.2))

    joint = np.outer(s_probs, f_probs)
    s_idx, f_idx = np.divmod(np.arange(joint.size), joint.shape[1])
    x_all = np.empty((joint.size, n_features))
    x_all[:, list(schema.strategic)] = strategic_atoms[s_idx]
    x_all[:, list(schema.non_strategic)] = nonstrategic_atoms[f_idx]
    p1 = (1.0 / (1.0 + np.exp(-(x_all @ w + b)))).reshape(joint.shape)
    return DiscreteBase(schema=schema, strategic_atoms=strategic_atoms,
                        nonstrategic_atoms=nonstrategic_atoms, joint=joint, label_p1=p1)


def synthetic_gaussian_base(seed: int, n_features: int = 11,
                            strategic_indices=(0, 1)) -> GaussianBlocksBase:
    schema = FeatureSchema(n_features=n_features, strategic=tuple(strategic_indices))
    rng = spawn(seed, 98)
    k_s, k_f = len(schema.strategic), len(schema.non_strategic)
    w = np.empty(n_features)
    w[list(schema.strategic)] = rng.normal(0.0, 2.0, size=k_s)
    w[list(schema.non_strategic)] = rng.normal(0.0, 0.5, size=k_f)
    return GaussianBlocksBase(schema=schema,
                              strategic_mean=rng.normal(0.0, 0.5, size=k_s),
                              strategic_sd=1.0,
                              nonstrategic_mean=rng.normal(0.0, 0.5, size=k_f),
                              nonstrategic_sd=1.0,
                              label_w=w, label_b=float(rng.normal(0.0, 0.2)))


def load_credit_csv(path, strategic_indices=(0, 1)) -> tuple[DiscreteBase, int]:
    """Empirical base from a CSV with a header, 11 numeric feature columns
    and one binary label column (last). Rows with missing or non-numeric
    values are dropped and counted; returns (base, n_dropped).

    The empirical joint over (strategic sub-row, non-strategic sub-row)
    cells need not factorize; resampling can reach unseen cells, whose label
    rate falls back to the column (non-strategic block) average.
    """
    n_feature_cols = 11
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError("file is empty")
        if len(header) != n_feature_cols + 1:
            raise IngestionError(
                f"expected {n_feature_cols + 1} columns (11 features + label), got {len(header)}")
        rows, labels, dropped = [], [], 0
        for i, row in enumerate(reader, start=2):  # header is line 1
            if len(row) != n_feature_cols + 1:
                raise IngestionError(f"wrong column count at row {i}", row=i)
            try:
                vals = [float(v) for v in row[:n_feature_cols]]
                y = float(row[n_feature_cols])
            except ValueError:
                dropped += 1
                continue
            if any(not np.isfinite(v) for v in vals) or not np.isfinite(y):
                dropped += 1
                continue
            if y not in (0.0, 1.0):
                raise IngestionError(f"non-binary label {row[n_feature_cols]!r} at row {i}", row=i)
            rows.append(vals)
            labels.append(y)
    if not rows:
        raise IngestionError("no usable rows")

    schema = FeatureSchema(n_features=n_feature_cols, strategic=tuple(strategic_indices))
    x = np.asarray(rows, dtype=float)
    y = np.asarray(labels, dtype=float)
    xs = x[:, list(schema.strategic)]
    xf = x[:, list(schema.non_strategic)]
    s_atoms, s_idx = np.unique(xs, axis=0, return_inverse=True)
    f_atoms, f_idx = np.unique(xf, axis=0, return_inverse=True)
    counts = np.zeros((len(s_atoms), len(f_atoms)))
    y1 = np.zeros_like(counts)
    np.add.at(counts, (s_idx, f_idx), 1.0)
    np.add.at(y1, (s_idx, f_idx), y)
    joint = counts / counts.sum()
    col_totals = counts.sum(axis=0)
    col_rates = np.divide(y1.sum(axis=0), col_totals,
                          out=np.full(len(f_atoms), y.mean()), where=col_totals > 0)
    p1 = np.divide(y1, counts, out=np.broadcast_to(col_rates, counts.shape).copy(),
                   where=counts > 0)
    base = DiscreteBase(schema=schema, strategic_atoms=s_atoms, nonstrategic_atoms=f_atoms,
                        joint=joint, label_p1=p1)
    return base, dropped
