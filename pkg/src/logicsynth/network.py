"""Immutable gate-network expressions and their evaluation.

The grammar is deliberately narrow: a network is either a raw sensor
(``Leaf``) or a gate applied to a previous-layer network and one raw sensor
(``Node`` whose right child is always a ``Leaf``). Growth therefore proceeds
along a left spine, one new sensor per layer, which is what keeps layer-wise
synthesis tractable. A first-layer node combines two leaves and stores them
in index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from .errors import ContractError
from .gates import N_GATES, apply_gate_array, eval_gate


@dataclass(frozen=True)
class Leaf:
    """A raw sensor bit, by feature index."""

    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 0:
            raise ContractError(f"leaf index must be a nonnegative integer, got {self.index!r}")

    @property
    def signature(self) -> str:
        return f"x{self.index}"

    @property
    def depth(self) -> int:
        return 0


@dataclass(frozen=True)
class Node:
    """A gate over a previous-layer network (left) and one raw sensor (right)."""

    gate: int
    left: "Expr"
    right: Leaf

    def __post_init__(self):
        if not isinstance(self.gate, int) or not 0 <= self.gate < N_GATES:
            raise ContractError(f"invalid gate id {self.gate!r}")
        if not isinstance(self.right, Leaf):
            raise ContractError("right child of a node must be a raw sensor leaf")
        if not isinstance(self.left, (Leaf, Node)):
            raise ContractError("left child must be a network expression")
        if isinstance(self.left, Leaf) and not self.left.index < self.right.index:
            raise ContractError(
                "a first-layer node takes an ordered sensor pair "
                f"(got x{self.left.index}, x{self.right.index})"
            )

    @cached_property
    def signature(self) -> str:
        return f"(g{self.gate} {self.left.signature} x{self.right.index})"

    @cached_property
    def depth(self) -> int:
        return self.left.depth + 1


Expr = Union[Leaf, Node]


def evaluate(expr: Expr, sensor_row) -> int:
    """Evaluate an expression on one row of sensor bits."""
    if isinstance(expr, Leaf):
        if expr.index >= len(sensor_row):
            raise ContractError(f"sensor index x{expr.index} out of range for row of width {len(sensor_row)}")
        bit = sensor_row[expr.index]
        if bit not in (0, 1):
            raise ContractError(f"sensor value must be 0 or 1, got {bit!r}")
        return int(bit)
    return eval_gate(expr.gate, evaluate(expr.left, sensor_row), evaluate(expr.right, sensor_row))


def eval_on_matrix(expr: Expr, sensor_bits: np.ndarray) -> np.ndarray:
    """Evaluate an expression down every row of an (n, m) 0/1 matrix at once."""
    if isinstance(expr, Leaf):
        if expr.index >= sensor_bits.shape[1]:
            raise ContractError(f"sensor index x{expr.index} out of range for width {sensor_bits.shape[1]}")
        return sensor_bits[:, expr.index]
    left = eval_on_matrix(expr.left, sensor_bits)
    right = sensor_bits[:, expr.right.index]
    return apply_gate_array(expr.gate, left, right)


def outputs(expr: Expr, bset) -> np.ndarray:
    """Expression outputs over a whole Boolean learning set, one bit per instance."""
    return eval_on_matrix(expr, bset.sensor_bits)


def loss_mu(out, labels) -> int:
    """Number of instances where two bit vectors disagree."""
    out = np.asarray(out)
    labels = np.asarray(labels)
    if out.shape != labels.shape:
        raise ContractError(f"length mismatch: {out.shape} vs {labels.shape}")
    return int(np.count_nonzero(out != labels))


def signature(expr: Expr) -> str:
    """Canonical text form; structurally equal expressions give equal text."""
    return expr.signature


def features_used(expr: Expr) -> set[int]:
    """Set of sensor indices the expression reads."""
    if isinstance(expr, Leaf):
        return {expr.index}
    return features_used(expr.left) | {expr.right.index}


def parse_signature(text: str) -> Expr:
    """Parse the canonical text form back into an expression.

    Accepts exactly the grammar produced by :func:`signature`; anything else
    raises :class:`ContractError`. Grammar invariants are re-checked by the
    node constructors on the way up.
    """
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse() -> Expr:
        nonlocal pos
        if pos >= len(tokens):
            raise ContractError(f"truncated expression text: {text!r}")
        tok = tokens[pos]
        if tok == "(":
            pos += 1
            gate_tok = tokens[pos] if pos < len(tokens) else ""
            if not gate_tok.startswith("g") or not gate_tok[1:].isdigit():
                raise ContractError(f"expected gate id, got {gate_tok!r} in {text!r}")
            gate = int(gate_tok[1:])
            pos += 1
            left = parse()
            right = parse()
            if pos >= len(tokens) or tokens[pos] != ")":
                raise ContractError(f"missing ')' in {text!r}")
            pos += 1
            if not isinstance(right, Leaf):
                raise ContractError(f"right operand must be a sensor in {text!r}")
            return Node(gate, left, right)
        if tok.startswith("x") and tok[1:].isdigit():
            pos += 1
            return Leaf(int(tok[1:]))
        raise ContractError(f"unexpected token {tok!r} in {text!r}")

    expr = parse()
    if pos != len(tokens):
        raise ContractError(f"trailing tokens in {text!r}")
    return expr


@dataclass(frozen=True, eq=False)
class Candidate:
    """An expression together with its outputs and loss on a learning set."""

    expr: Expr
    outputs: np.ndarray
    mu: int

    @classmethod
    def from_expr(cls, expr: Expr, bset) -> "Candidate":
        out = outputs(expr, bset)
        return cls(expr, out, loss_mu(out, bset.labels))

    @property
    def signature(self) -> str:
        return self.expr.signature
