"""Freely reduced words in the generators a, b of the free group F(a, b)."""

import re
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .exceptions import WordSyntaxError


LETTERS = ("a", "A", "b", "B")

_TOKEN = re.compile(r"\s*(?:([aAbB])(?:\^(-?\d+))?|(1))")


def invert_letter(letter: str) -> str:
    return letter.swapcase()


def free_reduce(letters: Sequence[str]) -> Tuple[str, ...]:
    """Cancel adjacent inverse pairs."""
    stack: List[str] = []
    for x in letters:
        if stack and stack[-1] == invert_letter(x):
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


@dataclass(frozen=True)
class GroupWord:
    """
    A freely reduced word over {a, A, b, B}; uppercase letters are inverses.

    a and b stand for the first two boundary loops of the pair of pants.
    """

    letters: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for i, x in enumerate(self.letters):
            if x not in LETTERS:
                raise WordSyntaxError(f"unknown generator {x!r}", position=i)
        object.__setattr__(self, "letters", free_reduce(self.letters))

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        return parse_word(text)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def __pow__(self, n: int) -> "GroupWord":
        base = self if n >= 0 else self.inverse()
        return GroupWord(base.letters * abs(n))

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple(invert_letter(x) for x in reversed(self.letters)))

    def conjugate_by(self, w: "GroupWord") -> "GroupWord":
        """w * self * w^-1."""
        return w * self * w.inverse()

    def cyclic_reduce(self) -> "GroupWord":
        letters = self.letters
        start, end = 0, len(letters)
        while end - start > 1 and letters[start] == invert_letter(letters[end - 1]):
            start += 1
            end -= 1
        return GroupWord(letters[start:end])

    def exponent_sums(self) -> Tuple[int, int]:
        """Image in H_1 of the pants, Z^2 with basis [a], [b]."""
        sa = sum(1 if x == "a" else -1 for x in self.letters if x in "aA")
        sb = sum(1 if x == "b" else -1 for x in self.letters if x in "bB")
        return sa, sb

    def is_empty(self) -> bool:
        return not self.letters

    def __str__(self) -> str:
        return " ".join(self.letters) if self.letters else "1"


def parse_word(text: str) -> GroupWord:
    """
    Parse the ASCII word syntax.

    Letters a, b and their inverses A, B, optionally separated by spaces and
    optionally followed by an integer exponent (``a^3``, ``b^-2``); ``1``
    and the empty string denote the identity.
    """
    letters: List[str] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            offset = pos
            while offset < len(text) and text[offset].isspace():
                offset += 1
            raise WordSyntaxError(
                f"unexpected {text[offset]!r} at position {offset}", position=offset, text=text
            )
        letter, exponent = match.group(1), match.group(2)
        if letter:
            n = int(exponent) if exponent is not None else 1
            token = letter if n >= 0 else invert_letter(letter)
            letters.extend([token] * abs(n))
        pos = match.end()
    return GroupWord(tuple(letters))


def commutator(u: GroupWord, v: GroupWord) -> GroupWord:
    return u * v * u.inverse() * v.inverse()


def random_word(rng: np.random.Generator, length: int) -> GroupWord:
    """Uniform random freely reduced word of exactly the given length."""
    letters: List[str] = []
    while len(letters) < length:
        x = LETTERS[int(rng.integers(4))]
        if letters and letters[-1] == invert_letter(x):
            continue
        letters.append(x)
    return GroupWord(tuple(letters))


def reduced_words(max_length: int) -> Iterator[GroupWord]:
    """All freely reduced words up to the given length, shortest first."""
    layer: List[Tuple[str, ...]] = [()]
    yield GroupWord()
    for _ in range(max_length):
        nxt = []
        for w in layer:
            for x in LETTERS:
                if w and w[-1] == invert_letter(x):
                    continue
                nxt.append(w + (x,))
        for w in nxt:
            yield GroupWord(w)
        layer = nxt


def cyclic_class_key(w: GroupWord) -> Tuple[str, ...]:
    """Key shared by cyclic permutations and inverses of a cyclically reduced word."""
    c = w.cyclic_reduce().letters
    inv = w.cyclic_reduce().inverse().letters
    rotations = [c[i:] + c[:i] for i in range(len(c))] + [inv[i:] + inv[:i] for i in range(len(inv))]
    return min(rotations) if rotations else ()
