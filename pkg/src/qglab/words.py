"""Symmetric generator alphabets, words, parsing and free reduction.

Words are stored as tuples of alphabet indices, so equality and hashing are
index-wise; subword enumeration and chart parsing treat them as plain integer
sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

#: Hard cap on letters produced by a single ``g^k`` token.
MAX_EXPONENT = 10**6

INVERSE_SUFFIX = "⁻¹"  # superscript -1, used for default inverse names


class UnknownLetter(ValueError):
    """A token names a letter that is not in the alphabet."""


class MalformedExponent(ValueError):
    """An exponent is not a nonzero integer, or exceeds the token cap."""


@dataclass(frozen=True)
class GeneratorAlphabet:
    """A finite alphabet closed under formal inverses.

    ``involution[i]`` is the index of the inverse letter of letter ``i``; a
    letter may be its own inverse only if declared that way on construction.
    """

    letters: tuple[str, ...]
    involution: tuple[int, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for name in self.letters:
            if not name or any(ch.isspace() for ch in name) or "^" in name:
                raise ValueError(f"invalid letter name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate letter name {name!r}")
            seen.add(name)
        if len(self.involution) != len(self.letters):
            raise ValueError("involution must pair every letter")
        for i, j in enumerate(self.involution):
            if not (0 <= j < len(self.letters)) or self.involution[j] != i:
                raise ValueError("involution is not a self-inverse bijection")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.letters)})

    @classmethod
    def symmetric(
        cls,
        base: Sequence[str],
        self_inverse: Sequence[str] = (),
    ) -> "GeneratorAlphabet":
        """Build an alphabet from base letters, adding a formal inverse for each.

        Letters in ``self_inverse`` are declared to be their own inverses and
        get no companion letter.
        """
        letters: list[str] = []
        involution: list[int] = []
        for name in base:
            if name in self_inverse:
                letters.append(name)
                involution.append(len(involution))
            else:
                letters.append(name)
                letters.append(name + INVERSE_SUFFIX)
                k = len(involution)
                involution.extend([k + 1, k])
        return cls(tuple(letters), tuple(involution))

    def __len__(self) -> int:
        return len(self.letters)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownLetter(f"letter {name!r} not in alphabet") from None

    def inverse(self, i: int) -> int:
        return self.involution[i]

    def is_positive(self, i: int) -> bool:
        """True if letter ``i`` serializes under its own name."""
        return i <= self.involution[i]


@dataclass(frozen=True)
class Word:
    """A finite sequence of letters of a fixed alphabet."""

    alphabet: GeneratorAlphabet
    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        size = len(self.alphabet)
        for i in self.letters:
            if not 0 <= i < size:
                raise ValueError(f"letter index {i} out of range")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __add__(self, other: "Word") -> "Word":
        if other.alphabet != self.alphabet:
            raise ValueError("words over different alphabets")
        return Word(self.alphabet, self.letters + other.letters)

    def subword(self, start: int, end: int) -> "Word":
        return Word(self.alphabet, self.letters[start:end])

    def inverse(self) -> "Word":
        inv = self.alphabet.involution
        return Word(self.alphabet, tuple(inv[i] for i in reversed(self.letters)))

    def repeat(self, k: int) -> "Word":
        if k < 0:
            raise ValueError("repeat count must be nonnegative")
        return Word(self.alphabet, self.letters * k)

    def text(self) -> str:
        """Serialize to the word text format (run-length tokens)."""
        return serialize_word(self)

    def __str__(self) -> str:
        return self.text()


def empty_word(alphabet: GeneratorAlphabet) -> Word:
    return Word(alphabet, ())


def word_from_names(alphabet: GeneratorAlphabet, names: Sequence[str]) -> Word:
    return Word(alphabet, tuple(alphabet.index(s) for s in names))


def _expand_token(token: str, alphabet: GeneratorAlphabet) -> tuple[int, ...]:
    name, sep, exp = token.partition("^")
    if sep:
        try:
            k = int(exp)
        except ValueError:
            raise MalformedExponent(f"exponent {exp!r} in token {token!r}") from None
        if k == 0:
            raise MalformedExponent(f"zero exponent in token {token!r}")
        if abs(k) > MAX_EXPONENT:
            raise MalformedExponent(f"exponent {k} exceeds cap {MAX_EXPONENT}")
    else:
        k = 1
    i = alphabet.index(name)
    if k < 0:
        i = alphabet.inverse(i)
        k = -k
    return (i,) * k


def parse_word(text: str, alphabet: GeneratorAlphabet) -> Word:
    """Parse whitespace-separated ``g`` / ``g^k`` tokens into a word.

    ``g^-k`` expands to ``k`` copies of the inverse letter of ``g``.
    """
    letters: list[int] = []
    for token in text.split():
        letters.extend(_expand_token(token, alphabet))
    return Word(alphabet, tuple(letters))


def serialize_word(word: Word) -> str:
    """Render a word in the text format; inverse letters appear as ``g^-1``.

    Runs of equal letters compress to a single token, so the output
    round-trips through :func:`parse_word`.
    """
    alphabet = word.alphabet
    out: list[str] = []
    run_letter: int | None = None
    run_len = 0

    def flush() -> None:
        if run_letter is None:
            return
        if alphabet.is_positive(run_letter):
            name, k = alphabet.letters[run_letter], run_len
        else:
            name, k = alphabet.letters[alphabet.inverse(run_letter)], -run_len
        out.append(name if k == 1 else f"{name}^{k}")

    for i in word.letters:
        if i == run_letter:
            run_len += 1
        else:
            flush()
            run_letter, run_len = i, 1
    flush()
    return " ".join(out)


def free_reduce(word: Word) -> Word:
    """Cancel adjacent letter/inverse pairs until none remain.

    The result is the unique reduced word and represents the same group
    element in any model.
    """
    inv = word.alphabet.involution
    stack: list[int] = []
    for i in word.letters:
        if stack and stack[-1] == inv[i]:
            stack.pop()
        else:
            stack.append(i)
    return Word(word.alphabet, tuple(stack))


def subwords(word: Word) -> Iterator[tuple[int, int, Word]]:
    """Yield all nonempty contiguous subwords as (start, end, word)."""
    n = len(word)
    for start in range(n):
        for end in range(start + 1, n + 1):
            yield start, end, word.subword(start, end)
