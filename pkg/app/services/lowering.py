"""Per-gate lowering into (2,0) void rules and species additions.

Species names follow one grammar everywhere: ``x[w]T``/``x[w]F`` for the
species carried on wire ``w``, ``y[i]T``/``y[i]F`` and ``y[j->i]T``/``y[j->i]F``
for gate outputs, ``a[i]``/``b[i]`` for majority internals and ``dx``/``dy``
for the catalyst deleters.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from typing import NamedTuple

from app.models.circuit import GateKind
from app.models.crn import RuleSpec
from app.models.program import GateLowering
from app.services.errors import CompilationError

DX = "dx"
DY = "dy"


def _pol(bit: int | bool) -> str:
    return "T" if bit else "F"


def x_species(wire: int, bit: int | bool) -> str:
    return f"x[{wire}]{_pol(bit)}"


def y_species(gate: int, bit: int | bool) -> str:
    return f"y[{gate}]{_pol(bit)}"


def y_edge_species(producer: int, gate: int, bit: int | bool) -> str:
    return f"y[{producer}->{gate}]{_pol(bit)}"


def a_species(gate: int, bit: int | bool) -> str:
    return f"a[{gate}]{_pol(bit)}"


def b_species(gate: int, bit: int | bool) -> str:
    return f"b[{gate}]{_pol(bit)}"


class FanIn(NamedTuple):
    """One incoming connection: the producing gate and the wire index its x species use."""

    producer: int
    wire: int


def _fan_in(items: Iterable[FanIn | int]) -> list[FanIn]:
    return [item if isinstance(item, FanIn) else FanIn(item, item) for item in items]


def _and_or(kind: GateKind, gate: int, fan_in: list[FanIn], m: int) -> GateLowering:
    # AND keeps y[i]T unless some input is false; OR is the same with polarities swapped
    keep = 1 if kind is GateKind.AND else 0
    additions: Counter[str] = Counter({y_species(gate, keep): m})
    rules: list[RuleSpec] = []
    for item in fan_in:
        edge = y_edge_species(item.producer, gate, 1 - keep)
        additions[edge] += m
        rules.append(RuleSpec.void(x_species(item.wire, keep), edge))
        rules.append(RuleSpec.void(x_species(item.wire, 1 - keep), y_species(gate, keep)))
    rules = list(dict.fromkeys(rules))
    return GateLowering(gate, kind, (dict(additions),), tuple(rules), (0,) * len(rules))


def _not(gate: int, fan_in: list[FanIn], m: int) -> GateLowering:
    if len(fan_in) != 1:
        raise CompilationError(f"NOT gate {gate} needs fan-in 1")
    wire = fan_in[0].wire
    additions = {y_species(gate, 1): m, y_species(gate, 0): m}
    rules = (
        RuleSpec.void(x_species(wire, 1), y_species(gate, 1)),
        RuleSpec.void(x_species(wire, 0), y_species(gate, 0)),
    )
    return GateLowering(gate, GateKind.NOT, (additions,), rules, (0, 0))


def majority_counts(fan_in: int) -> tuple[int, int, int]:
    """Per unit of multiplicity: (a[i]T copies, a[i]F copies, copies of each b species).

    Even fan-in is padded with one extra false input, so ``a[i]F`` gets one more copy.
    """
    padded = fan_in + (fan_in % 2 == 0)
    return fan_in, padded, padded // 2


def _maj(gate: int, fan_in: list[FanIn], m: int) -> GateLowering:
    a_true, a_false, b_each = majority_counts(len(fan_in))
    rules: list[RuleSpec] = []
    offsets: list[int] = []
    for item in fan_in:
        for bit in (1, 0):
            rules.append(RuleSpec.void(x_species(item.wire, bit), a_species(gate, 1 - bit)))
            offsets.append(0)
    step_a = {a_species(gate, 1): a_true * m, a_species(gate, 0): a_false * m}
    step_b: dict[str, int] = {}
    if b_each:
        step_b = {b_species(gate, 1): b_each * m, b_species(gate, 0): b_each * m}
        for bit in (1, 0):
            rules.append(RuleSpec.void(a_species(gate, bit), b_species(gate, bit)))
            offsets.append(1)
    step_y = {y_species(gate, 1): m, y_species(gate, 0): m}
    for bit in (1, 0):
        rules.append(RuleSpec.void(a_species(gate, bit), y_species(gate, 1 - bit)))
        offsets.append(2)
    unique = dict(zip(rules, offsets))
    return GateLowering(
        gate, GateKind.MAJ, (step_a, step_b, step_y), tuple(unique), tuple(unique.values())
    )


def lower_gate(
    kind: GateKind, gate: int, fan_in: Sequence[FanIn | int], multiplicity: int = 1
) -> GateLowering:
    """Additions and rules for one gate, every addition count scaled by ``multiplicity``.

    ``fan_in`` items are either ``FanIn`` pairs or bare producer ids, in which case
    the producer id doubles as the wire index.
    """
    if multiplicity < 1:
        raise CompilationError(f"gate {gate}: multiplicity must be positive, got {multiplicity}")
    items = _fan_in(fan_in)
    if kind in (GateKind.AND, GateKind.OR):
        if not items:
            raise CompilationError(f"{kind.value} gate {gate} needs fan-in >= 1")
        return _and_or(kind, gate, items, multiplicity)
    if kind is GateKind.NOT:
        return _not(gate, items, multiplicity)
    if kind is GateKind.MAJ:
        if not items:
            raise CompilationError(f"MAJ gate {gate} needs fan-in >= 1")
        return _maj(gate, items, multiplicity)
    raise CompilationError(f"unsupported gate kind {kind.value} for gate {gate}")


def output_species(
    kind: GateKind, gate: int, producers: Sequence[int]
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(true species, false species) that carry a gate's value once its steps finish."""
    if kind is GateKind.AND:
        falses = tuple(dict.fromkeys(y_edge_species(p, gate, 0) for p in producers))
        return (y_species(gate, 1),), falses
    if kind is GateKind.OR:
        trues = tuple(dict.fromkeys(y_edge_species(p, gate, 1) for p in producers))
        return trues, (y_species(gate, 0),)
    return (y_species(gate, 1),), (y_species(gate, 0),)


def lower_conversion(
    true_species: Sequence[str],
    false_species: Sequence[str],
    wires: Sequence[tuple[int, int]],
    *,
    catalytic: bool = False,
) -> tuple[dict[str, int], list[RuleSpec]]:
    """Turn a gate's output species into x species on each outgoing wire.

    ``wires`` pairs a wire index with the number of x copies of each polarity to add.
    Output species delete the complement x species; with ``catalytic`` they survive.
    """
    additions: dict[str, int] = {}
    rules: list[RuleSpec] = []
    for wire, copies in wires:
        additions[x_species(wire, 1)] = copies
        additions[x_species(wire, 0)] = copies
        pairs = [(t, x_species(wire, 0)) for t in true_species]
        pairs += [(f, x_species(wire, 1)) for f in false_species]
        for keeper, target in pairs:
            rules.append(
                RuleSpec.catalytic(keeper, target) if catalytic else RuleSpec.void(keeper, target)
            )
    return additions, rules
