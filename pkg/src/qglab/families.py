"""Explicit word families: the planar spiral, its nilpotent variant, power
commutators, and the sheet-walking BS(m,n) words with their exponent
sequences."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .groups import HeisenbergModel, bs_alphabet
from .words import GeneratorAlphabet, Word, word_from_names


class InvalidParameter(ValueError):
    """Family parameter outside the documented range."""


def _ab_alphabet() -> GeneratorAlphabet:
    return GeneratorAlphabet.symmetric(("a", "b"))


def _segments_to_word(
    alphabet: GeneratorAlphabet, segments: list[tuple[str, int]]
) -> Word:
    """Expand run-length segments (letter name, signed count) into a word."""
    letters: list[int] = []
    for name, count in segments:
        i = alphabet.index(name)
        if count < 0:
            i = alphabet.inverse(i)
            count = -count
        letters.extend([i] * count)
    return Word(alphabet, tuple(letters))


def spiral_z2(q: int, alphabet: Optional[GeneratorAlphabet] = None) -> Word:
    """The 7-segment planar spiral of length 9q; evaluates to (3q, 0) in Z^2."""
    if q < 1:
        raise InvalidParameter("spiral needs q >= 1")
    alphabet = alphabet or _ab_alphabet()
    return _segments_to_word(
        alphabet,
        [("b", -q), ("a", 2 * q), ("b", q), ("a", -q), ("b", q), ("a", 2 * q), ("b", -q)],
    )


def nilpotent_spiral(n: int, alphabet: Optional[GeneratorAlphabet] = None) -> Word:
    """Spiral with (n, n^2) exponents; length 2n^2 + 5n."""
    if n < 2:
        raise InvalidParameter("nilpotent spiral needs n >= 2")
    alphabet = alphabet or _ab_alphabet()
    nn = n * n
    return _segments_to_word(
        alphabet,
        [("b", -n), ("a", nn), ("b", n), ("a", -n), ("b", n), ("a", nn), ("b", -n)],
    )


def commutator_word(
    p: int, q: int, alphabet: Optional[GeneratorAlphabet] = None
) -> Word:
    """The commutator [a^p, b^q] = a^-p b^-q a^p b^q, of length 2p + 2q."""
    if p < 1 or q < 1:
        raise InvalidParameter("commutator needs p, q >= 1")
    alphabet = alphabet or _ab_alphabet()
    return _segments_to_word(alphabet, [("a", -p), ("b", -q), ("a", p), ("b", q)])


def verify_collecting_class2(p: int, q: int) -> bool:
    """Check b^q a^p = a^p b^q [b,a]^{pq} in the Heisenberg model.

    Higher commutators vanish in nilpotency class 2, so the collected form
    truncates to a single commutator power.
    """
    if not (1 <= p <= 50 and 1 <= q <= 50):
        raise InvalidParameter("exponents capped at 50")
    model = HeisenbergModel()
    alphabet = model.alphabet
    lhs = _segments_to_word(alphabet, [("b", q), ("a", p)])
    base_comm = word_from_names(
        alphabet,
        (
            alphabet.letters[alphabet.inverse(alphabet.index("b"))],
            alphabet.letters[alphabet.inverse(alphabet.index("a"))],
            "b",
            "a",
        ),
    )
    rhs = _segments_to_word(alphabet, [("a", p), ("b", q)]) + base_comm.repeat(p * q)
    return model.eval_word(lhs) == model.eval_word(rhs)


# ---------------------------------------------------------------------------
# BS(m, n) families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BSSequence:
    """Ceiling-recurrence exponent data for the sheet-walking words.

    d_0 = 0, d_1 = 1, d_{i+1} = ceil((n/m) d_i); y_i = m d_i, z_i = n d_i,
    x_i = y_{i+1} - z_i.  Then x_0 = m and 0 <= x_i < m for i >= 1.
    """

    m: int
    n: int
    d: tuple[int, ...]
    y: tuple[int, ...]
    z: tuple[int, ...]
    x: tuple[int, ...]


def bs_sequence(m: int, n: int, k: int) -> BSSequence:
    """Sequences through index k (so x has entries x_0 .. x_{k-1})."""
    if not (n > m >= 1):
        raise InvalidParameter("need n > m >= 1")
    if k < 1:
        raise InvalidParameter("need k >= 1")
    d = [0, 1]
    while len(d) <= k:
        q = Fraction(n * d[-1], m)
        d.append(int(-(-q.numerator // q.denominator)))  # ceiling
    y = tuple(m * di for di in d)
    z = tuple(n * di for di in d)
    x = tuple(y[i + 1] - z[i] for i in range(k))
    for i in range(1, k):
        if not 0 <= x[i] < m:
            raise AssertionError(f"x_{i} = {x[i]} outside [0, {m})")
    if x[0] != m:
        raise AssertionError(f"x_0 = {x[0]}, expected m = {m}")
    return BSSequence(m, n, tuple(d), y, z, x)


def bs_u(q: int, m: int, n: int, alphabet: Optional[GeneratorAlphabet] = None) -> Word:
    """u_q = a^{x_0} t^-1 a^{x_1} t^-1 ... a^{x_{q-1}} t^-1."""
    if q < 1:
        raise InvalidParameter("need q >= 1")
    seq = bs_sequence(m, n, q)
    alphabet = alphabet or bs_alphabet()
    segments: list[tuple[str, int]] = []
    for i in range(q):
        if seq.x[i]:
            segments.append(("a", seq.x[i]))
        segments.append(("t", -1))
    return _segments_to_word(alphabet, segments)


def bs_v(q: int, m: int, n: int, alphabet: Optional[GeneratorAlphabet] = None) -> Word:
    """v_q: the u_q pattern with all a-exponents negated."""
    if q < 1:
        raise InvalidParameter("need q >= 1")
    seq = bs_sequence(m, n, q)
    alphabet = alphabet or bs_alphabet()
    segments: list[tuple[str, int]] = []
    for i in range(q):
        if seq.x[i]:
            segments.append(("a", -seq.x[i]))
        segments.append(("t", -1))
    return _segments_to_word(alphabet, segments)


def bs_w_left(q: int, m: int, n: int, alphabet=None) -> Word:
    """Left arm a^-1 t^{2q} v_{2q} a v_{2q}^-1; equals t^{2q} in BS(m,n)."""
    alphabet = alphabet or bs_alphabet()
    v = bs_v(2 * q, m, n, alphabet)
    return (
        _segments_to_word(alphabet, [("a", -1), ("t", 2 * q)])
        + v
        + _segments_to_word(alphabet, [("a", 1)])
        + v.inverse()
    )


def bs_w_right(q: int, m: int, n: int, alphabet=None) -> Word:
    """Right arm a t^{2q} u_{2q} a^-1 u_{2q}^-1; equals t^{2q} in BS(m,n)."""
    alphabet = alphabet or bs_alphabet()
    u = bs_u(2 * q, m, n, alphabet)
    return (
        _segments_to_word(alphabet, [("a", 1), ("t", 2 * q)])
        + u
        + _segments_to_word(alphabet, [("a", -1)])
        + u.inverse()
    )


def bs_w(q: int, m: int, n: int, alphabet: Optional[GeneratorAlphabet] = None) -> Word:
    """The full word (left arm) t^-q (right arm); evaluates to t^{3q}."""
    if q < 1:
        raise InvalidParameter("need q >= 1")
    alphabet = alphabet or bs_alphabet()
    middle = _segments_to_word(alphabet, [("t", -q)])
    return bs_w_left(q, m, n, alphabet) + middle + bs_w_right(q, m, n, alphabet)


def _double_t(word: Word) -> Word:
    """Substitute t -> t^2 letterwise, doubling the t-letter count exactly."""
    alphabet = word.alphabet
    out: list[int] = []
    for i in word.letters:
        positive = alphabet.is_positive(i)
        base = alphabet.letters[i] if positive else alphabet.letters[alphabet.inverse(i)]
        out.extend([i, i] if base == "t" else [i])
    return Word(alphabet, tuple(out))


def bs_w_negative(
    q: int, m: int, n: int, alphabet: Optional[GeneratorAlphabet] = None
) -> Word:
    """Variant for n < 0: build w_q for (m, n^2/m) and replace t by t^2.

    t^2 conjugates a^m to a^{n^2/m}, so the doubled word walks the same sheet
    pattern inside BS(m, n); it evaluates to t^{6q}.  Requires m | n.
    """
    if q < 1:
        raise InvalidParameter("need q >= 1")
    if n >= 0:
        raise InvalidParameter("negative-n variant needs n < 0")
    if n % m != 0:
        raise InvalidParameter("t -> t^2 substitution needs m | n")
    n_eff = n * n // m
    return _double_t(bs_w(q, m, n_eff, alphabet))
