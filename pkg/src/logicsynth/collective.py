"""Voting over a collective of equally efficient networks.

A collective is the set of structurally distinct networks that reached the
same (minimal) loss during synthesis. A decision on an input row is the
strict-majority bit of the member outputs; its coherence is the fraction of
members that voted for it. Coherence is kept as an exact rational so that
threshold comparisons near the plausibility cutoff never depend on float
rounding. An exact tie (possible only with an even member count) yields an
abstention, which is surfaced rather than coerced to either class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .dataset import QuantizationSpec
from .errors import ContractError, DatasetError
from .network import Expr, eval_on_matrix, evaluate, features_used

DEFAULT_CHI0 = Fraction(4, 5)

MAP_LIMIT_BITS = 24  # refuse cubes beyond 2**24 rows


def as_fraction(value: Union[Fraction, str, float, int]) -> Fraction:
    """Exact rational from user input; floats go through their repr so 0.8 -> 4/5."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Decision:
    """One classified row: majority label, vote count, coherence, plausibility."""

    label: Optional[int]  # None means abstain (exact tie)
    l1: int
    L: int
    chi: Fraction
    plausible: bool

    @property
    def abstained(self) -> bool:
        return self.label is None

    @property
    def chi_text(self) -> str:
        """Coherence as the unreduced votes/members fraction, e.g. '6/9'."""
        return f"{self.l1}/{self.L}"

    @property
    def label_text(self) -> str:
        return "abstain" if self.label is None else str(self.label)


@dataclass(frozen=True)
class Collective:
    """Equally efficient, structurally distinct networks acting as a committee."""

    members: tuple[Expr, ...]
    chi0: Fraction = DEFAULT_CHI0

    def __post_init__(self):
        if len(self.members) < 1:
            raise ContractError("a collective needs at least one member")
        sigs = [m.signature for m in self.members]
        if len(set(sigs)) != len(sigs):
            raise ContractError("collective members must be structurally distinct")
        if not 0 < self.chi0 <= 1:
            raise ContractError(f"chi0 must lie in (0, 1], got {self.chi0}")

    @property
    def L(self) -> int:
        return len(self.members)

    def features_used(self) -> tuple[int, ...]:
        used: set[int] = set()
        for member in self.members:
            used |= features_used(member)
        return tuple(sorted(used))

    def with_chi0(self, chi0) -> "Collective":
        return Collective(self.members, as_fraction(chi0))


def _decide(ones: int, L: int, chi0: Fraction) -> Decision:
    zeros = L - ones
    if ones == zeros:
        return Decision(label=None, l1=ones, L=L, chi=Fraction(ones, L), plausible=False)
    label, l1 = (1, ones) if ones > zeros else (0, zeros)
    chi = Fraction(l1, L)
    return Decision(label=label, l1=l1, L=L, chi=chi, plausible=chi >= chi0)


def vote(c: Collective, sensor_row) -> Decision:
    """Evaluate every member on one sensor row and take the strict majority."""
    ones = sum(evaluate(member, sensor_row) for member in c.members)
    return _decide(ones, c.L, c.chi0)


def coherence_map(
    c: Collective,
    m: Optional[int] = None,
    restrict_to_used: bool = True,
) -> list[tuple[tuple[int, ...], Decision]]:
    """Decisions for every combination of the relevant sensor bits.

    With ``restrict_to_used`` the cube ranges over the sensors any member
    actually reads (everything else is don't-care); otherwise over all ``m``
    sensors, which must then be given. Rows come back in ascending binary
    order of the enumerated bits.
    """
    used = c.features_used()
    if restrict_to_used:
        indices = used
        width = (max(used) + 1) if used else 1
    else:
        if m is None:
            raise ContractError("m is required when enumerating the full sensor cube")
        if used and max(used) >= m:
            raise ContractError(f"collective reads sensor x{max(used)} outside width {m}")
        indices = tuple(range(m))
        width = m
    bits_count = len(indices)
    if bits_count > MAP_LIMIT_BITS:
        raise ContractError(
            f"{bits_count} relevant sensors would enumerate 2^{bits_count} rows; "
            f"the limit is 2^{MAP_LIMIT_BITS} (restrict to used features or reduce the model)"
        )

    combos = np.array(list(itertools.product((0, 1), repeat=bits_count)), dtype=np.uint8)
    matrix = np.zeros((combos.shape[0], width), dtype=np.uint8)
    matrix[:, list(indices)] = combos

    ones = np.zeros(combos.shape[0], dtype=np.int64)
    for member in c.members:
        ones += eval_on_matrix(member, matrix)

    return [
        (tuple(int(b) for b in combo), _decide(int(k), c.L, c.chi0))
        for combo, k in zip(combos, ones)
    ]


def classify_batch(
    c: Collective,
    qspec: QuantizationSpec,
    raw_rows: Iterable[Sequence[float]],
) -> list[Decision]:
    """Quantize raw feature rows with the stored thresholds, then vote on each."""
    decisions = []
    for i, row in enumerate(raw_rows):
        try:
            bits = qspec.quantize_row(row)
        except (ContractError, DatasetError) as exc:
            raise DatasetError(f"row {i}: {exc}", row=i) from exc
        decisions.append(vote(c, bits))
    return decisions
