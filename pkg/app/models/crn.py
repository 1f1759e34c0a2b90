from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum


@dataclass(frozen=True)
class Alphabet:
    """Ordered, frozen species alphabet; ordinals are dense 0..len-1."""

    names: tuple[str, ...]
    _ordinals: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ordinals = {name: idx for idx, name in enumerate(self.names)}
        if len(ordinals) != len(self.names):
            duplicates = sorted(name for name, hits in Counter(self.names).items() if hits > 1)
            raise ValueError(f"duplicate species in alphabet: {', '.join(duplicates)}")
        object.__setattr__(self, "_ordinals", ordinals)

    @classmethod
    def of(cls, names: Iterable[str]) -> Alphabet:
        return cls(tuple(names))

    def ordinal(self, name: str) -> int:
        try:
            return self._ordinals[name]
        except KeyError:
            raise KeyError(f"unknown species {name!r}") from None

    def vector(self, counts: Mapping[str, int]) -> tuple[int, ...]:
        dense = [0] * len(self.names)
        for name, count in counts.items():
            dense[self.ordinal(name)] += count
        return tuple(dense)

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._ordinals

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)


@dataclass(frozen=True)
class Configuration:
    alphabet: Alphabet
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) != len(self.alphabet):
            raise ValueError("configuration length does not match its alphabet")
        if any(count < 0 for count in self.counts):
            raise ValueError("configuration counts must be non-negative")

    @classmethod
    def empty(cls, alphabet: Alphabet) -> Configuration:
        return cls(alphabet, (0,) * len(alphabet))

    @classmethod
    def of(cls, alphabet: Alphabet, counts: Mapping[str, int]) -> Configuration:
        return cls(alphabet, alphabet.vector(counts))

    @property
    def volume(self) -> int:
        return sum(self.counts)

    def count(self, name: str) -> int:
        return self.counts[self.alphabet.ordinal(name)]

    def sparse(self) -> dict[str, int]:
        return {name: count for name, count in zip(self.alphabet.names, self.counts) if count}

    def __add__(self, other: Configuration) -> Configuration:
        if other.alphabet != self.alphabet:
            raise ValueError("cannot add configurations over different alphabets")
        return Configuration(self.alphabet, tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __str__(self) -> str:
        body = ", ".join(f"{name}:{count}" for name, count in self.sparse().items())
        return "{" + body + "}"


class RuleFamily(str, Enum):
    TRUE_VOID = "TRUE_VOID"
    CATALYTIC_VOID = "CATALYTIC_VOID"
    AUTOGENESIS = "AUTOGENESIS"
    OTHER = "OTHER"


@dataclass(frozen=True)
class RuleClass:
    size: tuple[int, int]
    family: RuleFamily


@dataclass(frozen=True)
class RuleSpec:
    """Alphabet-free rule: reactant and product species names, repeats meaning multiplicity."""

    reactants: tuple[str, ...]
    products: tuple[str, ...] = ()

    @classmethod
    def void(cls, *reactants: str) -> RuleSpec:
        return cls(tuple(reactants), ())

    @classmethod
    def catalytic(cls, catalyst: str, target: str) -> RuleSpec:
        return cls((catalyst, target), (catalyst,))

    @property
    def species(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.reactants + self.products))

    def bind(self, alphabet: Alphabet) -> Rule:
        reactants = [0] * len(alphabet)
        products = [0] * len(alphabet)
        for name in self.reactants:
            reactants[alphabet.ordinal(name)] += 1
        for name in self.products:
            products[alphabet.ordinal(name)] += 1
        return Rule(alphabet, tuple(reactants), tuple(products))


@dataclass(frozen=True)
class Rule:
    alphabet: Alphabet
    reactants: tuple[int, ...]
    products: tuple[int, ...]
    application: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.reactants) != len(self.alphabet) or len(self.products) != len(self.alphabet):
            raise ValueError("rule vectors do not match the alphabet")
        if any(c < 0 for c in self.reactants) or any(c < 0 for c in self.products):
            raise ValueError("rule vectors must be non-negative")
        if sum(self.reactants) < 1:
            raise ValueError("a rule needs at least one reactant")
        object.__setattr__(
            self, "application", tuple(p - r for r, p in zip(self.reactants, self.products))
        )

    def spec(self) -> RuleSpec:
        names = self.alphabet.names
        reactants = tuple(n for n, c in zip(names, self.reactants) for _ in range(c))
        products = tuple(n for n, c in zip(names, self.products) for _ in range(c))
        return RuleSpec(reactants, products)
