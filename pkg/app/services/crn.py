from __future__ import annotations

import re
from collections.abc import Iterable

from app.models.crn import Alphabet, Configuration, Rule, RuleClass, RuleFamily, RuleSpec
from app.services.errors import AlphabetMismatchError, RuleNotApplicableError

CANONICAL_SPECIES = re.compile(
    r"^(?:[xyab]\[\d+\][TF]|y\[\d+->\d+\][TF]|dx|dy)$"
)
# hand-written programs may use any token without whitespace, '+' or '='
GENERIC_SPECIES = re.compile(r"^[^\s+=,|:]+$")
_ARROW = re.compile(r"\s+->\s+")
_EMPTY = {".", "0", "∅"}


def is_canonical(name: str) -> bool:
    return CANONICAL_SPECIES.match(name) is not None


def _same_alphabet(config: Configuration, rule: Rule) -> None:
    if config.alphabet != rule.alphabet:
        raise AlphabetMismatchError("configuration and rule use different alphabets")


def classify_rule(rule: Rule) -> RuleClass:
    size = (sum(rule.reactants), sum(rule.products))
    delta = rule.application
    changed = any(delta)
    if changed and all(v <= 0 for v in delta):
        family = RuleFamily.CATALYTIC_VOID if size[1] else RuleFamily.TRUE_VOID
    elif changed and all(v >= 0 for v in delta):
        family = RuleFamily.AUTOGENESIS
    else:
        family = RuleFamily.OTHER
    return RuleClass(size, family)


def is_void_family(rules: Iterable[Rule]) -> bool:
    return all(
        classify_rule(rule).family in (RuleFamily.TRUE_VOID, RuleFamily.CATALYTIC_VOID)
        for rule in rules
    )


def applicable(config: Configuration, rule: Rule) -> bool:
    _same_alphabet(config, rule)
    return all(have >= need for have, need in zip(config.counts, rule.reactants))


def apply(config: Configuration, rule: Rule) -> Configuration:
    if not applicable(config, rule):
        raise RuleNotApplicableError(f"{format_rule(rule)} is not applicable to {config}")
    return Configuration(config.alphabet, tuple(c + d for c, d in zip(config.counts, rule.application)))


def is_terminal(config: Configuration, rules: Iterable[Rule]) -> bool:
    return not any(applicable(config, rule) for rule in rules)


def _side(names: tuple[str, ...]) -> str:
    if not names:
        return "."
    terms: list[str] = []
    for name in dict.fromkeys(names):
        hits = names.count(name)
        terms.append(name if hits == 1 else f"{hits} {name}")
    return " + ".join(terms)


def format_rule(rule: Rule | RuleSpec) -> str:
    spec = rule.spec() if isinstance(rule, Rule) else rule
    return f"{_side(spec.reactants)} -> {_side(spec.products)}"


def _parse_side(text: str) -> tuple[str, ...]:
    text = text.strip()
    if text in _EMPTY:
        return ()
    names: list[str] = []
    for term in text.split("+"):
        parts = term.split()
        if len(parts) == 2 and parts[0].isdigit():
            hits, name = int(parts[0]), parts[1]
        elif len(parts) == 1:
            hits, name = 1, parts[0]
        else:
            raise ValueError(f"malformed rule term {term.strip()!r}")
        if not GENERIC_SPECIES.match(name):
            raise ValueError(f"malformed species name {name!r}")
        names.extend([name] * hits)
    return tuple(names)


def parse_rule(text: str) -> RuleSpec:
    """Parse ``A + B -> .``, ``2 dx -> .`` or ``Y + X -> Y``."""
    sides = _ARROW.split(text.strip())
    if len(sides) != 2:
        raise ValueError(f"rule needs exactly one '->': {text!r}")
    reactants = _parse_side(sides[0])
    if not reactants:
        raise ValueError("a rule needs at least one reactant")
    return RuleSpec(reactants, _parse_side(sides[1]))


def bind_rules(alphabet: Alphabet, specs: Iterable[RuleSpec]) -> tuple[Rule, ...]:
    return tuple(dict.fromkeys(spec.bind(alphabet) for spec in specs))
