"""The fixed alphabet of two-input Boolean reference gates.

Ten gates, ids 0..9: every Boolean function of two variables whose output
depends on both inputs. The 16 two-variable functions minus the 2 constants
and the 4 single-variable projections leave exactly these 10. Nodes of a
synthesized network carry one of these ids; the ids also appear verbatim in
model files, rule text, and matrix renderings.

Truth tables are stored row-major over input pairs (u1, u2) in the order
(0,0), (0,1), (1,0), (1,1).
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError

N_GATES = 10

# id -> (g(0,0), g(0,1), g(1,0), g(1,1))
GATE_TABLES: tuple[tuple[int, int, int, int], ...] = (
    (0, 0, 0, 1),  # g0: u1 and u2
    (0, 1, 0, 0),  # g1: not u1 and u2
    (0, 1, 1, 1),  # g2: u1 or u2
    (1, 0, 1, 1),  # g3: u1 or not u2
    (1, 1, 0, 1),  # g4: not u1 or u2
    (1, 1, 1, 0),  # g5: nand
    (0, 0, 1, 0),  # g6: u1 and not u2
    (1, 0, 0, 0),  # g7: nor
    (0, 1, 1, 0),  # g8: xor
    (1, 0, 0, 1),  # g9: xnor
)

GATE_NAMES: tuple[str, ...] = (
    "and", "lt", "or", "ge", "le", "nand", "gt", "nor", "xor", "xnor",
)

_LOOKUP = np.array(GATE_TABLES, dtype=np.uint8)


def _check_gate(g) -> int:
    if not isinstance(g, (int, np.integer)) or isinstance(g, bool):
        raise ContractError(f"gate id must be an integer, got {g!r}")
    if not 0 <= g < N_GATES:
        raise ContractError(f"gate id {g} out of range 0..{N_GATES - 1}")
    return int(g)


def _check_bit(u, name: str) -> int:
    if u not in (0, 1):
        raise ContractError(f"{name} must be 0 or 1, got {u!r}")
    return int(u)


def eval_gate(g: int, u1: int, u2: int) -> int:
    """Apply gate ``g`` to a single input pair."""
    g = _check_gate(g)
    u1 = _check_bit(u1, "u1")
    u2 = _check_bit(u2, "u2")
    return GATE_TABLES[g][(u1 << 1) | u2]


def gate_truth_table(g: int) -> tuple[int, int, int, int]:
    """Return the 4-row truth table of gate ``g``, rows over (0,0),(0,1),(1,0),(1,1)."""
    return GATE_TABLES[_check_gate(g)]


def apply_gate_array(g: int, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """Apply gate ``g`` elementwise to two 0/1 uint8 arrays."""
    g = _check_gate(g)
    idx = (u1.astype(np.uint8) << 1) | u2.astype(np.uint8)
    return _LOOKUP[g][idx]


def apply_gate_mask(g: int, u1: int, u2: int, full: int) -> int:
    """Apply gate ``g`` bit-parallel to two bitmasks.

    ``full`` is the all-ones mask of the vector width; complements are taken
    against it so results never leave the width.
    """
    g = _check_gate(g)
    if g == 0:
        return u1 & u2
    if g == 1:
        return (u1 ^ full) & u2
    if g == 2:
        return u1 | u2
    if g == 3:
        return u1 | (u2 ^ full)
    if g == 4:
        return (u1 ^ full) | u2
    if g == 5:
        return (u1 & u2) ^ full
    if g == 6:
        return u1 & (u2 ^ full)
    if g == 7:
        return (u1 | u2) ^ full
    if g == 8:
        return u1 ^ u2
    return (u1 ^ u2) ^ full


def all_gate_masks(u1: int, u2: int, full: int) -> tuple[int, ...]:
    """All ten gate outputs for one bitmask input pair, indexed by gate id."""
    n1 = u1 ^ full
    n2 = u2 ^ full
    conj = u1 & u2
    disj = u1 | u2
    x = u1 ^ u2
    return (
        conj,
        n1 & u2,
        disj,
        u1 | n2,
        n1 | u2,
        conj ^ full,
        u1 & n2,
        disj ^ full,
        x,
        x ^ full,
    )


def depends_on_both_inputs(g: int) -> bool:
    """True when some input pair flips the output for each argument separately."""
    t = gate_truth_table(g)
    dep_u1 = t[0] != t[2] or t[1] != t[3]
    dep_u2 = t[0] != t[1] or t[2] != t[3]
    return dep_u1 and dep_u2
