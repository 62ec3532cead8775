"""Loading, threshold quantization, and A/B splitting of labeled instance tables.

Input format is CSV: a header row of feature names with the label in a final
column named ``class``, all cells numeric. Feature kinds (quantitative vs
boolean) come from a sidecar schema file with one ``name: kind`` line per
feature; when no schema is given, kinds are inferred (a column whose values
are all 0/1 is boolean, anything else quantitative).

Quantitative features are turned into sensor bits by a per-feature threshold
chosen to minimize the error count of the single-bit classifier over the
learning set. Both threshold polarities are searched:

    direct:   z = 1  when x >= u, else 0
    inverted: z = 0  when x >= u, else 1

Candidate cuts are the midpoints between consecutive distinct sorted values
plus one sentinel below the minimum; ties prefer the smaller u, then direct
polarity, so results are reproducible.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import ContractError, DatasetError

LABEL_COLUMN = "class"

Kind = Literal["quantitative", "boolean"]


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: Kind

    def __post_init__(self):
        if not self.name:
            raise ContractError("feature name must be nonempty")
        if self.kind not in ("quantitative", "boolean"):
            raise ContractError(f"unknown feature kind {self.kind!r} for {self.name!r}")


@dataclass(frozen=True, eq=False)
class LearningSet:
    """Raw labeled instances: n rows of m feature values plus a bit label each."""

    features: tuple[FeatureSpec, ...]
    instances: np.ndarray  # (n, m) float64
    labels: np.ndarray  # (n,) uint8

    def __post_init__(self):
        n, m = self.instances.shape
        if n < 2:
            raise ContractError(f"need at least 2 instances, got {n}")
        if m != len(self.features):
            raise ContractError(f"{m} value columns vs {len(self.features)} feature specs")
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ContractError("duplicate feature names")
        if not set(np.unique(self.labels)) == {0, 1}:
            raise ContractError("labels must contain both classes of the dichotomy")
        if not np.all(np.isfinite(self.instances)):
            raise ContractError("feature values must be finite")
        for j, spec in enumerate(self.features):
            if spec.kind == "boolean":
                col = self.instances[:, j]
                if not np.all((col == 0) | (col == 1)):
                    raise ContractError(f"boolean feature {spec.name!r} has values outside {{0,1}}")

    @property
    def n(self) -> int:
        return self.instances.shape[0]

    @property
    def m(self) -> int:
        return self.instances.shape[1]


@dataclass(frozen=True)
class Threshold:
    """A quantization cut for one quantitative feature.

    ``train_errors`` is the loss of the resulting sensor bit as a one-feature
    classifier on the learning set it was fitted on. ``degenerate`` marks a
    constant feature, where the cut is a below-range sentinel and the sensor
    bit carries no information.
    """

    u: float
    polarity: Literal["direct", "inverted"]
    train_errors: int
    degenerate: bool = False

    def apply(self, x) -> np.ndarray:
        ge = np.asarray(x, dtype=np.float64) >= self.u
        bits = ge if self.polarity == "direct" else ~ge
        return bits.astype(np.uint8)

    def apply_scalar(self, x: float) -> int:
        ge = x >= self.u
        return int(ge if self.polarity == "direct" else not ge)


@dataclass(frozen=True)
class QuantizationSpec:
    """Per-feature thresholds, aligned with the feature list; None for boolean."""

    features: tuple[FeatureSpec, ...]
    thresholds: tuple[Optional[Threshold], ...]

    def __post_init__(self):
        if len(self.features) != len(self.thresholds):
            raise ContractError("thresholds must align with features")
        for spec, thr in zip(self.features, self.thresholds):
            if (spec.kind == "quantitative") != (thr is not None):
                raise ContractError(f"quantization spec does not cover feature {spec.name!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def quantize_row(self, row: Sequence[float]) -> np.ndarray:
        if len(row) != len(self.features):
            raise ContractError(f"row width {len(row)} does not match schema width {len(self.features)}")
        bits = np.empty(len(row), dtype=np.uint8)
        for j, (spec, thr) in enumerate(zip(self.features, self.thresholds)):
            v = row[j]
            if thr is None:
                if v not in (0, 1):
                    raise DatasetError(f"boolean feature {spec.name!r} got {v!r}", column=j)
                bits[j] = int(v)
            else:
                if not math.isfinite(float(v)):
                    raise DatasetError(f"non-finite value for feature {spec.name!r}", column=j)
                bits[j] = thr.apply_scalar(float(v))
        return bits


@dataclass(frozen=True, eq=False)
class BooleanLearningSet:
    """The quantized learning set: an (n, m) sensor-bit matrix plus labels."""

    sensor_bits: np.ndarray  # (n, m) uint8
    labels: np.ndarray  # (n,) uint8
    provenance: QuantizationSpec

    _col_masks: tuple = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.sensor_bits.ndim != 2:
            raise ContractError("sensor_bits must be 2-dimensional")
        if self.sensor_bits.shape[0] != self.labels.shape[0]:
            raise ContractError("labels length must match instance count")

    @property
    def n(self) -> int:
        return self.sensor_bits.shape[0]

    @property
    def m(self) -> int:
        return self.sensor_bits.shape[1]

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.provenance.names

    def column(self, j: int) -> np.ndarray:
        return self.sensor_bits[:, j]

    # Bitmask views (bit i = instance i) for the bit-parallel synthesis paths.
    def column_masks(self) -> tuple[int, ...]:
        if self._col_masks is None:
            masks = tuple(pack_bits(self.sensor_bits[:, j]) for j in range(self.m))
            object.__setattr__(self, "_col_masks", masks)
        return self._col_masks

    def labels_mask(self) -> int:
        return pack_bits(self.labels)

    def full_mask(self) -> int:
        return (1 << self.n) - 1


def pack_bits(bits) -> int:
    """Pack a 0/1 vector into an int bitmask, bit i = element i."""
    mask = 0
    for i, b in enumerate(bits):
        if b:
            mask |= 1 << i
    return mask


def unpack_bits(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=np.uint8)


def load_schema(path: str) -> dict[str, Kind]:
    """Parse a sidecar schema file of ``name: kind`` lines."""
    kinds: dict[str, Kind] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise DatasetError(f"schema line {lineno}: expected 'name: kind', got {raw.strip()!r}")
            name, kind = (part.strip() for part in line.split(":", 1))
            if kind not in ("quantitative", "boolean"):
                raise DatasetError(f"schema line {lineno}: unknown kind {kind!r} for {name!r}")
            if name in kinds:
                raise DatasetError(f"schema line {lineno}: duplicate feature {name!r}")
            kinds[name] = kind
    return kinds


def load_csv(path: str, schema: Optional[dict[str, Kind]] = None) -> LearningSet:
    """Load a labeled CSV table into a LearningSet.

    The final header column must be ``class`` and hold 0/1 labels. ``schema``
    maps feature names to kinds; with ``schema=None`` kinds are inferred per
    column (all-0/1 columns are boolean). Malformed cells are reported with
    their row/column position.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[-1] != LABEL_COLUMN:
        raise DatasetError(f"{path}: missing label column (final column must be named {LABEL_COLUMN!r})")
    names = header[:-1]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise DatasetError(f"{path}: duplicate feature names {dupes}")
    if not names:
        raise DatasetError(f"{path}: no feature columns")

    body = [r for r in rows[1:] if r and any(cell.strip() for cell in r)]
    n, m = len(body), len(names)
    if n < 2:
        raise DatasetError(f"{path}: need at least 2 instances, got {n}")

    values = np.empty((n, m), dtype=np.float64)
    labels = np.empty(n, dtype=np.uint8)
    for i, row in enumerate(body):
        if len(row) != m + 1:
            raise DatasetError(f"{path}: expected {m + 1} cells, got {len(row)}", row=i)
        for j, cell in enumerate(row[:-1]):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: non-numeric cell {cell!r} for feature {names[j]!r}", row=i, column=j
                ) from None
        lab = row[-1].strip()
        if lab not in ("0", "1"):
            raise DatasetError(f"{path}: non-binary label {lab!r}", row=i, column=m)
        labels[i] = int(lab)

    if schema is not None:
        missing = [nm for nm in names if nm not in schema]
        if missing:
            raise DatasetError(f"{path}: schema does not declare features {missing}")
        extra = [nm for nm in schema if nm not in names]
        if extra:
            raise DatasetError(f"{path}: schema declares unknown features {extra}")
        kinds = [schema[nm] for nm in names]
    else:
        kinds = [
            "boolean" if np.all((values[:, j] == 0) | (values[:, j] == 1)) else "quantitative"
            for j in range(m)
        ]

    for j, kind in enumerate(kinds):
        if kind == "boolean":
            bad = np.nonzero(~((values[:, j] == 0) | (values[:, j] == 1)))[0]
            if bad.size:
                raise DatasetError(
                    f"{path}: boolean feature {names[j]!r} has value {values[bad[0], j]!r}",
                    row=int(bad[0]),
                    column=j,
                )
        else:
            bad = np.nonzero(~np.isfinite(values[:, j]))[0]
            if bad.size:
                raise DatasetError(
                    f"{path}: non-finite value for feature {names[j]!r}", row=int(bad[0]), column=j
                )

    if labels.min() == labels.max():
        raise DatasetError(f"{path}: labels are all {int(labels[0])}; both classes are required")

    feats = tuple(FeatureSpec(nm, kd) for nm, kd in zip(names, kinds))
    return LearningSet(feats, values, labels)


def quantize_feature(values, labels) -> Threshold:
    """Pick the error-minimizing (cut, polarity) for one quantitative feature.

    Scans the midpoints between consecutive distinct sorted values plus a
    sentinel below the minimum; for each cut both polarities are scored by
    the misclassification count of the sensor bit against the labels. Equal
    error counts resolve to the smaller u, then to direct polarity.
    """
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.uint8)
    if values.shape != labels.shape or values.ndim != 1:
        raise ContractError("values and labels must be equal-length vectors")
    n = values.shape[0]
    if n < 2:
        raise ContractError(f"need at least 2 values, got {n}")

    order = np.argsort(values, kind="stable")
    xs = values[order]
    ys = labels[order]
    ones_before = np.concatenate(([0], np.cumsum(ys)))  # ones among the i smallest
    total_ones = int(ones_before[-1])

    distinct_end = np.nonzero(np.diff(xs) > 0)[0]  # last index of each value group but the final
    # Candidate cuts in ascending order: sentinel, then midpoints. For a cut
    # with i values below it: direct predicts 1 on the n-i values >= u, so
    # errors = (ones among the below) + (zeros among the rest).
    candidates = [(float(xs[0] - 1.0), 0)]
    for e in distinct_end:
        i = int(e) + 1
        candidates.append((float((xs[e] + xs[e + 1]) / 2.0), i))

    best = None  # (errors, u, polarity_rank)
    for u, i in candidates:
        ones_below = int(ones_before[i])
        direct_errors = ones_below + ((n - i) - (total_ones - ones_below))
        for rank, errors in ((0, direct_errors), (1, n - direct_errors)):
            key = (errors, u, rank)
            if best is None or key < best:
                best = key
    errors, u, rank = best
    return Threshold(
        u=u,
        polarity="direct" if rank == 0 else "inverted",
        train_errors=errors,
        degenerate=len(candidates) == 1,
    )


def quantization_for(lset: LearningSet) -> QuantizationSpec:
    """Fit thresholds for every quantitative feature of a learning set."""
    thresholds = tuple(
        quantize_feature(lset.instances[:, j], lset.labels) if spec.kind == "quantitative" else None
        for j, spec in enumerate(lset.features)
    )
    return QuantizationSpec(lset.features, thresholds)


def binarize(lset: LearningSet, spec: Optional[QuantizationSpec] = None) -> BooleanLearningSet:
    """Convert a learning set to sensor bits, fitting thresholds when absent."""
    if spec is None:
        spec = quantization_for(lset)
    else:
        if tuple(spec.names) != tuple(f.name for f in lset.features):
            raise ContractError("quantization spec features do not match the learning set")
        for fspec, sspec in zip(lset.features, spec.features):
            if fspec.kind != sspec.kind:
                raise ContractError(f"kind mismatch for feature {fspec.name!r}")

    bits = np.empty((lset.n, lset.m), dtype=np.uint8)
    for j, thr in enumerate(spec.thresholds):
        if thr is None:
            bits[:, j] = lset.instances[:, j].astype(np.uint8)
        else:
            bits[:, j] = thr.apply(lset.instances[:, j])
    return BooleanLearningSet(bits, lset.labels.copy(), spec)


def split_ab(
    bset: BooleanLearningSet,
    strategy: Literal["interleave", "seeded-random"] = "interleave",
    seed: int = 0,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Partition instance indices into near-equal halves A and B."""
    n = bset.n
    if n < 4:
        raise ContractError(f"A/B fitting needs at least 4 instances, got {n}")
    if strategy == "interleave":
        a = tuple(range(0, n, 2))
        b = tuple(range(1, n, 2))
    elif strategy == "seeded-random":
        idx = list(range(n))
        random.Random(seed).shuffle(idx)
        half = (n + 1) // 2
        a = tuple(sorted(idx[:half]))
        b = tuple(sorted(idx[half:]))
    else:
        raise ContractError(f"unknown split strategy {strategy!r}")
    return a, b
