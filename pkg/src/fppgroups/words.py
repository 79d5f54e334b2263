"""Words in a free group, stored as syllables ``(generator, exponent)``.

Letters are also available in a flat integer encoding used by the coset
machinery: generator ``g`` is letter ``2*g`` and its inverse is ``2*g + 1``,
so ``letter ^ 1`` is always the inverse letter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def letter(gen: int, sign: int = 1) -> int:
    return 2 * gen + (0 if sign > 0 else 1)


def letter_gen(x: int) -> int:
    return x >> 1


def letter_sign(x: int) -> int:
    return -1 if x & 1 else 1


def _reduce_syllables(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for g, e in pairs:
        g, e = int(g), int(e)
        if e == 0:
            continue
        if g < 0:
            raise ValueError(f"negative generator index {g}")
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


@dataclass(frozen=True)
class Word:
    """An element of a free group, always freely reduced.

    ``syllables`` is a tuple of ``(generator index, nonzero exponent)`` with
    no two adjacent syllables on the same generator.
    """

    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "syllables", _reduce_syllables(self.syllables))

    @classmethod
    def from_letters(cls, letters: Iterable[int]) -> "Word":
        return cls(tuple((x >> 1, -1 if x & 1 else 1) for x in letters))

    @classmethod
    def gen(cls, g: int, exponent: int = 1) -> "Word":
        return cls(((g, exponent),))

    def letters(self) -> list[int]:
        out = []
        for g, e in self.syllables:
            x = 2 * g + (1 if e < 0 else 0)
            out.extend([x] * abs(e))
        return out

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.syllables + other.syllables)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0 or not self.syllables:
            return Word()
        # w^k = u c^k u^-1 where c is the cyclic core of w
        u, core = self.cyclic_split()
        return u * Word(core.syllables * k) * u.inverse()

    def generators(self) -> set[int]:
        return {g for g, _ in self.syllables}

    def exponent_sums(self, rank: int) -> list[int]:
        v = [0] * rank
        for g, e in self.syllables:
            v[g] += e
        return v

    def cyclic_split(self) -> tuple["Word", "Word"]:
        """Return ``(u, c)`` with ``self == u * c * u**-1`` and ``c`` cyclically reduced."""
        ls = self.letters()
        i, j = 0, len(ls) - 1
        while i < j and ls[i] == ls[j] ^ 1:
            i += 1
            j -= 1
        return Word.from_letters(ls[:i]), Word.from_letters(ls[i:j + 1])

    def cyclically_reduced(self) -> "Word":
        return self.cyclic_split()[1]

    def rotations(self) -> list["Word"]:
        """All cyclic permutations of the (cyclically reduced) letter sequence."""
        ls = self.cyclically_reduced().letters()
        return [Word.from_letters(ls[i:] + ls[:i]) for i in range(len(ls))] or [Word()]

    def substitute(self, images: Sequence["Word"]) -> "Word":
        out: list[tuple[int, int]] = []
        for g, e in self.syllables:
            w = images[g] if e > 0 else images[g].inverse()
            out.extend(w.syllables * abs(e))
        return Word(tuple(out))

    def relabel(self, mapping: dict[int, int] | Sequence[int]) -> "Word":
        return Word(tuple((mapping[g], e) for g, e in self.syllables))

    def format(self, names: Sequence[str]) -> str:
        if not self.syllables:
            return "1"
        parts = []
        for g, e in self.syllables:
            parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
        return "*".join(parts)


def free_reduce(w: Word | Iterable[tuple[int, int]]) -> Word:
    """Freely reduced form of ``w``; accepts a Word or raw syllable pairs."""
    if isinstance(w, Word):
        return Word(w.syllables)
    return Word(tuple(w))


def commutator(u: Word, v: Word) -> Word:
    return u.inverse() * v.inverse() * u * v
