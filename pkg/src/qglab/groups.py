"""Group element models: free abelian Z^r, discrete Heisenberg, and BS(m,n).

Each model evaluates words into immutable canonical elements and exposes the
small uniform surface (identity / letter action / multiply / inverse / encode)
that the metric engine builds on.  All exponent arithmetic is arbitrary
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Optional, Sequence

from .words import GeneratorAlphabet, Word, parse_word, serialize_word


class UnmappedLetter(KeyError):
    """A word uses a letter with no assigned element."""


class UnsupportedParameters(ValueError):
    """BS parameters outside the normalized range m >= 1 < |n|, |n| > m."""


class ParameterMismatch(ValueError):
    """Operands belong to BS models with different (m, n)."""


# ---------------------------------------------------------------------------
# Free abelian
# ---------------------------------------------------------------------------

#: Elements of Z^r are plain integer tuples.
AbelianVector = tuple[int, ...]


def _check_abelian_assignment(
    alphabet: GeneratorAlphabet, rank: int, assignment: Mapping[str, AbelianVector]
) -> dict[int, AbelianVector]:
    by_index: dict[int, AbelianVector] = {}
    for name, vec in assignment.items():
        if len(vec) != rank:
            raise ValueError(f"image of {name!r} has rank {len(vec)}, expected {rank}")
        by_index[alphabet.index(name)] = tuple(vec)
    for i, vec in by_index.items():
        j = alphabet.involution[i]
        other = by_index.get(j)
        if other is None or any(a != -b for a, b in zip(vec, other)):
            raise ValueError("assignment does not respect the involution")
    return by_index


def eval_abelian(
    word: Word, rank: int, assignment: Mapping[str, AbelianVector]
) -> AbelianVector:
    """Coordinatewise sum of the letter images."""
    images = _check_abelian_assignment(word.alphabet, rank, assignment)
    acc = [0] * rank
    for i in word.letters:
        try:
            vec = images[i]
        except KeyError:
            raise UnmappedLetter(word.alphabet.letters[i]) from None
        for k in range(rank):
            acc[k] += vec[k]
    return tuple(acc)


# ---------------------------------------------------------------------------
# Discrete Heisenberg
# ---------------------------------------------------------------------------


class HeisenbergTriple(NamedTuple):
    """Upper-triangular 3x3 unipotent integer matrix, stored as (x, y, z)."""

    x: int
    y: int
    z: int

    def __mul__(self, other: "HeisenbergTriple") -> "HeisenbergTriple":  # type: ignore[override]
        return HeisenbergTriple(
            self.x + other.x, self.y + other.y, self.z + other.z + self.x * other.y
        )

    def inverse(self) -> "HeisenbergTriple":
        return HeisenbergTriple(-self.x, -self.y, self.x * self.y - self.z)


HEISENBERG_IDENTITY = HeisenbergTriple(0, 0, 0)


def eval_heisenberg(
    word: Word, assignment: Mapping[str, HeisenbergTriple]
) -> HeisenbergTriple:
    """Left-to-right product of letter images under the Heisenberg law."""
    images: dict[int, HeisenbergTriple] = {}
    for name, g in assignment.items():
        images[word.alphabet.index(name)] = HeisenbergTriple(*g)
    for i, g in images.items():
        j = word.alphabet.involution[i]
        if j not in images or images[j] != g.inverse():
            raise ValueError("assignment does not respect the involution")
    acc = HEISENBERG_IDENTITY
    for i in word.letters:
        try:
            acc = acc * images[i]
        except KeyError:
            raise UnmappedLetter(word.alphabet.letters[i]) from None
    return acc


# ---------------------------------------------------------------------------
# Baumslag-Solitar BS(m, n)
# ---------------------------------------------------------------------------
#
# Presentation convention: the stable letter t conjugates a^m up to a^n,
#     t a^m t^-1 = a^n,
# the orientation in which the displacement identities of the word families
# hold letter-for-letter.  Rewriting pushes surplus a-powers rightward:
#     a^(dn) t    -> t a^(dm)      (residue before t in [0, |n|))
#     a^(dm) t^-1 -> t^-1 a^(dn)   (residue before t^-1 in [0, m))
# Pinches t a^(km) t^-1 and t^-1 a^(kn) t never survive: inside the residue
# ranges they reduce to the free cancellations t t^-1 / t^-1 t.

BS_LETTERS = ("a", "t")


def bs_alphabet() -> GeneratorAlphabet:
    return GeneratorAlphabet.symmetric(BS_LETTERS)


def _check_bs_params(m: int, n: int) -> None:
    if m < 1 or abs(n) <= m:
        raise UnsupportedParameters(f"need |n| > m >= 1, got (m, n) = ({m}, {n})")


class _BSAccumulator:
    """Mutable normal-form builder; absorbs generators left to right."""

    __slots__ = ("m", "n", "syllables", "tail")

    def __init__(self, m: int, n: int):
        self.m = m
        self.n = n
        self.syllables: list[tuple[int, int]] = []
        self.tail = 0

    def absorb_a(self, k: int) -> None:
        self.tail += k

    def absorb_t(self, sign: int) -> None:
        if sign > 0:
            modulus, out_scale = abs(self.n), self.m
        else:
            modulus, out_scale = self.m, self.n
        r = self.tail % modulus
        d = (self.tail - r) // (self.n if sign > 0 else self.m)
        if r == 0 and self.syllables and self.syllables[-1][1] == -sign:
            # t^-1 a^(dn) t or t a^(dm) t^-1 collapses onto the previous syllable
            e, _ = self.syllables.pop()
            self.tail = e + d * out_scale
        else:
            self.syllables.append((r, sign))
            self.tail = d * out_scale

    def absorb_powers(self, sign: int, count: int) -> None:
        for _ in range(count):
            self.absorb_t(sign)

    def freeze(self) -> "BSNormalForm":
        return BSNormalForm(self.m, self.n, tuple(self.syllables), self.tail)


@dataclass(frozen=True)
class BSNormalForm:
    """Canonical form w(a,t) a^N of a BS(m,n) element.

    ``syllables`` lists (a-exponent, t-sign) pairs; exponents sit in the
    residue range [0, |n|) before t and [0, m) before t^-1, and no Britton
    pinch survives.  Records compare equal exactly when they represent the
    same group element (validated empirically by the property suite).
    """

    m: int
    n: int
    syllables: tuple[tuple[int, int], ...]
    tail: int

    def __post_init__(self) -> None:
        _check_bs_params(self.m, self.n)
        prev_sign: Optional[int] = None
        for e, s in self.syllables:
            if s not in (1, -1):
                raise ValueError("t-sign must be +1 or -1")
            bound = abs(self.n) if s > 0 else self.m
            if not 0 <= e < bound:
                raise ValueError(f"a-exponent {e} outside residue range [0, {bound})")
            if prev_sign is not None and s == -prev_sign and e == 0:
                raise ValueError("syllables contain a Britton pinch")
            prev_sign = s

    @classmethod
    def identity(cls, m: int, n: int) -> "BSNormalForm":
        return cls(m, n, (), 0)

    def is_identity(self) -> bool:
        return not self.syllables and self.tail == 0

    def t_sum(self) -> int:
        return sum(s for _, s in self.syllables)

    def syllable_count(self) -> int:
        return len(self.syllables)

    def _accumulator(self) -> _BSAccumulator:
        acc = _BSAccumulator(self.m, self.n)
        acc.syllables = list(self.syllables)
        acc.tail = self.tail
        return acc

    def multiply(self, other: "BSNormalForm") -> "BSNormalForm":
        if (other.m, other.n) != (self.m, self.n):
            raise ParameterMismatch(
                f"cannot multiply BS({self.m},{self.n}) by BS({other.m},{other.n})"
            )
        acc = self._accumulator()
        for e, s in other.syllables:
            acc.absorb_a(e)
            acc.absorb_t(s)
        acc.absorb_a(other.tail)
        return acc.freeze()

    def inverse(self) -> "BSNormalForm":
        acc = _BSAccumulator(self.m, self.n)
        acc.absorb_a(-self.tail)
        for e, s in reversed(self.syllables):
            acc.absorb_t(-s)
            acc.absorb_a(-e)
        return acc.freeze()

    def encode(self) -> str:
        """Compact canonical encoding, used as a BFS key and in ball exports."""
        parts = [f"{e}{'t' if s > 0 else 'T'}" for e, s in self.syllables]
        parts.append(f"a{self.tail}")
        return "|".join(parts)

    def to_word(self, alphabet: Optional[GeneratorAlphabet] = None) -> Word:
        """Expand to the word text alphabet; round-trips through bs_normalize."""
        alphabet = alphabet or bs_alphabet()
        a = alphabet.index("a")
        t = alphabet.index("t")
        a_inv, t_inv = alphabet.inverse(a), alphabet.inverse(t)
        letters: list[int] = []
        for e, s in self.syllables:
            letters.extend([a] * e)
            letters.append(t if s > 0 else t_inv)
        if self.tail >= 0:
            letters.extend([a] * self.tail)
        else:
            letters.extend([a_inv] * (-self.tail))
        return Word(alphabet, tuple(letters))

    def serialize(self) -> str:
        return serialize_word(self.to_word())


def bs_normalize(word: Word, m: int, n: int) -> BSNormalForm:
    """Canonical form of a word over {a, t} and inverses in BS(m, n)."""
    _check_bs_params(m, n)
    alphabet = word.alphabet
    acc = _BSAccumulator(m, n)
    for i in word.letters:
        name = alphabet.letters[i]
        positive = alphabet.is_positive(i)
        base = name if positive else alphabet.letters[alphabet.inverse(i)]
        if base == "a":
            acc.absorb_a(1 if positive else -1)
        elif base == "t":
            acc.absorb_t(1 if positive else -1)
        else:
            raise UnmappedLetter(name)
    return acc.freeze()


def bs_multiply(g: BSNormalForm, h: BSNormalForm) -> BSNormalForm:
    return g.multiply(h)


def abelianize_bs(g: BSNormalForm) -> int:
    """Image under the homomorphism t -> 1, a -> 0 (signed t-count)."""
    return g.t_sum()


def bs_from_text(text: str, m: int, n: int) -> BSNormalForm:
    return bs_normalize(parse_word(text, bs_alphabet()), m, n)


# ---------------------------------------------------------------------------
# Model wrappers (shared surface for the metric engine)
# ---------------------------------------------------------------------------


class AbelianModel:
    """Z^r with an explicit involution-respecting letter assignment."""

    def __init__(
        self,
        alphabet: GeneratorAlphabet,
        rank: int,
        assignment: Mapping[str, AbelianVector],
        name: str = "abelian",
    ):
        self.alphabet = alphabet
        self.rank = rank
        self.name = name
        self._images = _check_abelian_assignment(alphabet, rank, assignment)
        # Exact distances are available in closed form only for the standard
        # basis assignment (L1 norm).
        basis = set()
        standard = len(self._images) == 2 * rank
        for vec in self._images.values():
            nonzero = [(k, v) for k, v in enumerate(vec) if v != 0]
            if len(nonzero) != 1 or abs(nonzero[0][1]) != 1:
                standard = False
                break
            basis.add(nonzero[0])
        self._standard = standard and len(basis) == 2 * rank

    def identity(self) -> AbelianVector:
        return (0,) * self.rank

    def letter_image(self, i: int) -> AbelianVector:
        try:
            return self._images[i]
        except KeyError:
            raise UnmappedLetter(self.alphabet.letters[i]) from None

    def apply_letter(self, g: AbelianVector, i: int) -> AbelianVector:
        vec = self.letter_image(i)
        return tuple(a + b for a, b in zip(g, vec))

    def multiply(self, g: AbelianVector, h: AbelianVector) -> AbelianVector:
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g: AbelianVector) -> AbelianVector:
        return tuple(-a for a in g)

    def eval_word(self, word: Word) -> AbelianVector:
        g = self.identity()
        for i in word.letters:
            g = self.apply_letter(g, i)
        return g

    def encode(self, g: AbelianVector) -> str:
        return ",".join(str(a) for a in g)

    def exact_distance(self, g: AbelianVector) -> Optional[int]:
        if self._standard:
            return sum(abs(a) for a in g)
        return None

    def analytic_lower_bound(self, g: AbelianVector) -> Optional[Fraction]:
        if self._standard:
            return Fraction(sum(abs(a) for a in g))
        return None


def z2_alphabet() -> GeneratorAlphabet:
    return GeneratorAlphabet.symmetric(("a", "b"))


def standard_abelian_assignment(
    alphabet: GeneratorAlphabet, base: Sequence[str]
) -> dict[str, AbelianVector]:
    """Map the i-th base letter to +e_i and its inverse letter to -e_i."""
    rank = len(base)
    assignment: dict[str, AbelianVector] = {}
    for k, name in enumerate(base):
        vec = tuple(1 if j == k else 0 for j in range(rank))
        i = alphabet.index(name)
        assignment[name] = vec
        assignment[alphabet.letters[alphabet.inverse(i)]] = tuple(-v for v in vec)
    return assignment


def z2_model() -> AbelianModel:
    """Z^2 with the standard generators a = (1,0), b = (0,1)."""
    alphabet = z2_alphabet()
    assignment = standard_abelian_assignment(alphabet, ("a", "b"))
    return AbelianModel(alphabet, 2, assignment, name="z2")


class HeisenbergModel:
    """Discrete Heisenberg group; default generators a -> x, b -> y."""

    def __init__(
        self,
        alphabet: Optional[GeneratorAlphabet] = None,
        assignment: Optional[Mapping[str, HeisenbergTriple]] = None,
        name: str = "heisenberg",
    ):
        self.alphabet = alphabet or GeneratorAlphabet.symmetric(("a", "b"))
        if assignment is None:
            x = HeisenbergTriple(1, 0, 0)
            y = HeisenbergTriple(0, 1, 0)
            assignment = {
                self.alphabet.letters[0]: x,
                self.alphabet.letters[1]: x.inverse(),
                self.alphabet.letters[2]: y,
                self.alphabet.letters[3]: y.inverse(),
            }
        self.name = name
        self._images: dict[int, HeisenbergTriple] = {}
        for key, g in assignment.items():
            self._images[self.alphabet.index(key)] = HeisenbergTriple(*g)
        for i, g in self._images.items():
            j = self.alphabet.involution[i]
            if j not in self._images or self._images[j] != g.inverse():
                raise ValueError("assignment does not respect the involution")

    def identity(self) -> HeisenbergTriple:
        return HEISENBERG_IDENTITY

    def apply_letter(self, g: HeisenbergTriple, i: int) -> HeisenbergTriple:
        try:
            return g * self._images[i]
        except KeyError:
            raise UnmappedLetter(self.alphabet.letters[i]) from None

    def multiply(self, g: HeisenbergTriple, h: HeisenbergTriple) -> HeisenbergTriple:
        return g * h

    def inverse(self, g: HeisenbergTriple) -> HeisenbergTriple:
        return g.inverse()

    def eval_word(self, word: Word) -> HeisenbergTriple:
        g = HEISENBERG_IDENTITY
        for i in word.letters:
            g = self.apply_letter(g, i)
        return g

    def encode(self, g: HeisenbergTriple) -> str:
        return f"{g.x},{g.y},{g.z}"

    def exact_distance(self, g: HeisenbergTriple) -> Optional[int]:
        return None

    def analytic_lower_bound(self, g: HeisenbergTriple) -> Optional[Fraction]:
        """Sound floor on word length: abelian taxicab and area growth.

        Any word evaluating to (x, y, z) has at least |x|+|y| letters, and the
        z-coordinate satisfies |z| <= (#a-steps)(#b-steps) <= (L/2)^2, so
        L >= 2 sqrt(|z|).
        """
        taxicab = abs(g.x) + abs(g.y)
        s = math.isqrt(4 * abs(g.z))
        if s * s < 4 * abs(g.z):
            s += 1
        return Fraction(max(taxicab, s))


class BSModel:
    """BS(m, n) acting on canonical normal forms."""

    def __init__(self, m: int, n: int, alphabet: Optional[GeneratorAlphabet] = None):
        _check_bs_params(m, n)
        self.m = m
        self.n = n
        self.alphabet = alphabet or bs_alphabet()
        self.name = f"bs({m},{n})"
        self._letter_kind: list[tuple[str, int]] = []
        for i, letter in enumerate(self.alphabet.letters):
            positive = self.alphabet.is_positive(i)
            base = letter if positive else self.alphabet.letters[self.alphabet.inverse(i)]
            if base not in ("a", "t"):
                raise ValueError("BS alphabet must consist of a, t and inverses")
            self._letter_kind.append((base, 1 if positive else -1))

    def identity(self) -> BSNormalForm:
        return BSNormalForm.identity(self.m, self.n)

    def apply_letter(self, g: BSNormalForm, i: int) -> BSNormalForm:
        base, sign = self._letter_kind[i]
        acc = g._accumulator()
        if base == "a":
            acc.absorb_a(sign)
        else:
            acc.absorb_t(sign)
        return acc.freeze()

    def multiply(self, g: BSNormalForm, h: BSNormalForm) -> BSNormalForm:
        return g.multiply(h)

    def inverse(self, g: BSNormalForm) -> BSNormalForm:
        return g.inverse()

    def eval_word(self, word: Word) -> BSNormalForm:
        return bs_normalize(word, self.m, self.n)

    def encode(self, g: BSNormalForm) -> str:
        return g.encode()

    def exact_distance(self, g: BSNormalForm) -> Optional[int]:
        return None

    def analytic_lower_bound(self, g: BSNormalForm) -> Optional[Fraction]:
        """Sound structural floors: every word for g carries at least
        |t-exponent-sum| stable letters, and Britton's lemma forces one
        t-letter per surviving syllable.  The metric engine layers the
        logarithmic normal-form bound on top for n > m >= 1."""
        bound = max(abs(g.t_sum()), g.syllable_count())
        if bound == 0 and not g.is_identity():
            bound = 1
        return Fraction(bound)
