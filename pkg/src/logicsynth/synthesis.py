"""Layer-wise synthesis with strict-improvement (exterior addition) selection.

Layer 0 is the raw sensors themselves. Layer 1 tries every gate over every
unordered sensor pair; layer r >= 2 extends each surviving network with every
gate over every raw sensor. A candidate survives only when its loss is
strictly below both the loss of the network it extends and the loss of the
sensor it attaches: a modification that fails this test adds nothing the
parent did not already know. Survivor losses therefore descend strictly along
every left spine, which bounds the depth and guarantees termination.

Synthesis stops at the first layer holding a zero-loss survivor (success: all
zero-loss survivors of that layer form the collective) or at the first layer
where nothing survives (exhausted: the sensor structure cannot express the
labels and needs expanding).

The public generate/select functions materialize every raw candidate, which
is fine for small problems and for tests; ``synthesize`` runs the same
selection over packed bitmasks without building the non-survivors, and is
bit-identical in outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .collective import Collective
from .dataset import BooleanLearningSet, unpack_bits
from .errors import ContractError
from .gates import all_gate_masks, apply_gate_array
from .network import Candidate, Expr, Leaf, Node, loss_mu


@dataclass(frozen=True)
class SynthesisConfig:
    """Knobs for the layer loop.

    ``max_layers`` is a safety bound only; strict descent terminates the loop
    by itself. ``width_cap`` truncates each layer's survivors to the best
    (loss, signature) entries; the default keeps everything. ``dedup``
    removes structurally repeated survivors.
    """

    max_layers: int = 32
    width_cap: Optional[int] = None
    dedup: bool = True

    def __post_init__(self):
        if self.max_layers < 1:
            raise ContractError(f"max_layers must be >= 1, got {self.max_layers}")
        if self.width_cap is not None and self.width_cap < 1:
            raise ContractError(f"width_cap must be >= 1, got {self.width_cap}")


@dataclass(frozen=True, eq=False)
class ScoredCandidate(Candidate):
    """A candidate carrying the two losses its selection test compares against."""

    parent_mu: int
    feature_mu: int


@dataclass
class LayerTrace:
    r: int
    generated: int
    passed: int
    deduped: int
    kept: int
    min_mu: Optional[int]

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "generated": self.generated,
            "passed": self.passed,
            "deduped": self.deduped,
            "kept": self.kept,
            "min_mu": self.min_mu,
        }


@dataclass
class LayerState:
    """Survivors of one layer, for inspection and property checks."""

    r: int
    survivors: list[ScoredCandidate]
    feature_mus: list[int]


@dataclass(eq=False)
class SynthesisResult:
    outcome: str  # "success" | "exhausted"
    collective: Optional[Collective]
    r_star: Optional[int]
    best: Optional[Candidate]
    r: int
    reason: Optional[str]  # None | "no-survivors" | "layer-budget"
    trace: list[LayerTrace]
    layer0_shortcut: bool = False
    layers: Optional[list[LayerState]] = field(default=None, repr=False)

    @property
    def succeeded(self) -> bool:
        return self.outcome == "success"


EXPAND_HINT = "expand the input variable structure (or revise the learning set)"


def feature_losses(bset: BooleanLearningSet) -> list[int]:
    """Loss of each raw sensor used alone as the classifier."""
    return [loss_mu(bset.column(k), bset.labels) for k in range(bset.m)]


def generate_layer1(bset: BooleanLearningSet) -> list[ScoredCandidate]:
    """All first-layer candidates: every gate over every ordered sensor pair."""
    m = bset.m
    if m < 2:
        raise ContractError(f"first layer needs at least 2 sensors, got {m}")
    fmu = feature_losses(bset)
    labels = bset.labels
    cands = []
    for j in range(m):
        cj = bset.column(j)
        for k in range(j + 1, m):
            ck = bset.column(k)
            for g in range(10):
                out = apply_gate_array(g, cj, ck)
                cands.append(
                    ScoredCandidate(
                        expr=Node(g, Leaf(j), Leaf(k)),
                        outputs=out,
                        mu=loss_mu(out, labels),
                        parent_mu=fmu[j],
                        feature_mu=fmu[k],
                    )
                )
    return cands


def generate_layer_r(
    survivors: Sequence[Candidate], bset: BooleanLearningSet
) -> list[ScoredCandidate]:
    """All extensions of the given survivors by one gate and one raw sensor."""
    if not survivors:
        raise ContractError("cannot generate a layer from zero survivors")
    fmu = feature_losses(bset)
    labels = bset.labels
    cands = []
    for parent in survivors:
        for k in range(bset.m):
            ck = bset.column(k)
            for g in range(10):
                out = apply_gate_array(g, parent.outputs, ck)
                cands.append(
                    ScoredCandidate(
                        expr=Node(g, parent.expr, Leaf(k)),
                        outputs=out,
                        mu=loss_mu(out, labels),
                        parent_mu=parent.mu,
                        feature_mu=fmu[k],
                    )
                )
    return cands


def select_exterior_addition(
    cands: Sequence[ScoredCandidate],
    dedup: bool = True,
    width_cap: Optional[int] = None,
) -> list[ScoredCandidate]:
    """Keep candidates whose loss strictly beats both reference losses.

    Survivors are deduplicated by structural signature (first occurrence
    wins), ordered by ascending (loss, signature), and truncated to
    ``width_cap`` when one is set. The surviving *set* does not depend on the
    order candidates were generated in.
    """
    passed = [c for c in cands if c.mu < c.parent_mu and c.mu < c.feature_mu]
    if dedup:
        seen: set[str] = set()
        unique = []
        for c in passed:
            sig = c.signature
            if sig not in seen:
                seen.add(sig)
                unique.append(c)
        passed = unique
    passed.sort(key=lambda c: (c.mu, c.signature))
    if width_cap is not None:
        passed = passed[:width_cap]
    return passed


def synthesize(
    bset: BooleanLearningSet,
    config: Optional[SynthesisConfig] = None,
    record_layers: bool = False,
) -> SynthesisResult:
    """Run the layer loop to a collective or to exhaustion.

    ``record_layers`` keeps per-layer survivor states on the result (memory
    proportional to survivor count; meant for inspection and tests).
    """
    config = config or SynthesisConfig()
    n, m = bset.n, bset.m
    full = bset.full_mask()
    ymask = bset.labels_mask()
    cols = bset.column_masks()
    fmu = [(cols[k] ^ ymask).bit_count() for k in range(m)]
    trace: list[LayerTrace] = []
    states: list[LayerState] = [] if record_layers else None

    # A raw sensor that already classifies perfectly forms a trivial collective.
    perfect = [k for k in range(m) if fmu[k] == 0]
    if perfect:
        members = tuple(Leaf(k) for k in perfect)
        best = Candidate(members[0], unpack_bits(cols[perfect[0]], n), 0)
        trace.append(LayerTrace(r=0, generated=m, passed=len(perfect), deduped=0,
                                kept=len(perfect), min_mu=0))
        return SynthesisResult(
            outcome="success",
            collective=Collective(members),
            r_star=0,
            best=best,
            r=0,
            reason=None,
            trace=trace,
            layer0_shortcut=True,
            layers=states,
        )

    if m < 2:
        raise ContractError(f"first layer needs at least 2 sensors, got {m}")

    best_k = min(range(m), key=lambda k: (fmu[k], k))
    best = (Leaf(best_k), cols[best_k], fmu[best_k])  # (expr, mask, mu)

    survivors: list[tuple] = []  # (expr, mask, mu, parent_mu, feature_mu)
    r = 0
    while True:
        r += 1
        raw: list[tuple] = []
        if r == 1:
            generated = m * (m - 1) // 2 * 10
            for j in range(m):
                cj, fj = cols[j], fmu[j]
                for k in range(j + 1, m):
                    bound = fj if fj < fmu[k] else fmu[k]
                    ck = cols[k]
                    for g, out in enumerate(all_gate_masks(cj, ck, full)):
                        mu = (out ^ ymask).bit_count()
                        if mu < bound:
                            raw.append((Node(g, Leaf(j), Leaf(k)), out, mu, fj, fmu[k]))
        else:
            generated = len(survivors) * m * 10
            for expr, mask, pmu, _, _ in ((s[0], s[1], s[2], s[3], s[4]) for s in survivors):
                for k in range(m):
                    fk = fmu[k]
                    bound = pmu if pmu < fk else fk
                    ck = cols[k]
                    for g, out in enumerate(all_gate_masks(mask, ck, full)):
                        mu = (out ^ ymask).bit_count()
                        if mu < bound:
                            raw.append((Node(g, expr, Leaf(k)), out, mu, pmu, fk))

        passed = len(raw)
        if config.dedup:
            seen: set[str] = set()
            unique = []
            for entry in raw:
                sig = entry[0].signature
                if sig not in seen:
                    seen.add(sig)
                    unique.append(entry)
            deduped = passed - len(unique)
            raw = unique
        else:
            deduped = 0
        raw.sort(key=lambda e: (e[2], e[0].signature))
        if config.width_cap is not None:
            raw = raw[: config.width_cap]
        survivors = raw

        min_mu = survivors[0][2] if survivors else None
        trace.append(LayerTrace(r=r, generated=generated, passed=passed,
                                deduped=deduped, kept=len(survivors), min_mu=min_mu))
        if record_layers:
            states.append(
                LayerState(
                    r=r,
                    survivors=[
                        ScoredCandidate(e, unpack_bits(mask, n), mu, pmu, fk)
                        for e, mask, mu, pmu, fk in survivors
                    ],
                    feature_mus=list(fmu),
                )
            )

        if survivors and survivors[0][2] < best[2]:
            best = (survivors[0][0], survivors[0][1], survivors[0][2])

        if not survivors:
            return SynthesisResult(
                outcome="exhausted",
                collective=None,
                r_star=None,
                best=Candidate(best[0], unpack_bits(best[1], n), best[2]),
                r=r,
                reason="no-survivors",
                trace=trace,
                layers=states,
            )

        zeros = [s for s in survivors if s[2] == 0]
        if zeros:
            members = tuple(z[0] for z in sorted(zeros, key=lambda z: z[0].signature))
            return SynthesisResult(
                outcome="success",
                collective=Collective(members),
                r_star=r,
                best=Candidate(zeros[0][0], unpack_bits(zeros[0][1], n), 0),
                r=r,
                reason=None,
                trace=trace,
                layers=states,
            )

        if r >= config.max_layers:
            return SynthesisResult(
                outcome="exhausted",
                collective=None,
                r_star=None,
                best=Candidate(best[0], unpack_bits(best[1], n), best[2]),
                r=r,
                reason="layer-budget",
                trace=trace,
                layers=states,
            )
