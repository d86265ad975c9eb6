"""Closure constructions for context-free languages: intersection with
regular languages, inverse block homomorphisms, and the quasigeodesic
constant transforms for block replacement."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .grammar import Grammar, GrammarError, to_cnf
from .metric import BudgetExceeded
from .words import GeneratorAlphabet, Word


class InvalidParameter(ValueError):
    """Constant transform input outside its documented range."""


# ---------------------------------------------------------------------------
# Finite automata (over alphabet letters)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NFA:
    """Nondeterministic automaton; transitions keyed by (state, letter name)."""

    alphabet: GeneratorAlphabet
    states: tuple[str, ...]
    transitions: tuple[tuple[str, str, str], ...]  # (state, letter, state)
    initial: tuple[str, ...]
    accepting: tuple[str, ...]

    def __post_init__(self) -> None:
        declared = set(self.states)
        for p, letter, q in self.transitions:
            if p not in declared or q not in declared:
                raise ValueError("transition uses an undeclared state")
            self.alphabet.index(letter)
        for s in self.initial + self.accepting:
            if s not in declared:
                raise ValueError("undeclared initial/accepting state")

    def accepts(self, word: Word) -> bool:
        current = set(self.initial)
        step: dict[tuple[str, str], set[str]] = {}
        for p, letter, q in self.transitions:
            step.setdefault((p, letter), set()).add(q)
        for i in word.letters:
            letter = word.alphabet.letters[i]
            current = set().union(
            *(step.get((p, letter), set()) for p in current)
            ) if current else set()
        return bool(current & set(self.accepting))


@dataclass(frozen=True)
class DFA:
    """Deterministic automaton; missing transitions are rejecting."""

    alphabet: GeneratorAlphabet
    states: tuple[str, ...]
    transitions: Mapping[tuple[str, str], str]
    initial: str
    accepting: frozenset[str]

    def run(self, word: Word) -> Optional[str]:
        state = self.initial
        for i in word.letters:
            state = self.transitions.get((state, word.alphabet.letters[i]))
            if state is None:
                return None
        return state

    def accepts(self, word: Word) -> bool:
        state = self.run(word)
        return state is not None and state in self.accepting


def determinize(nfa: NFA, state_budget: int = 4096) -> DFA:
    """Subset construction; aborts with BudgetExceeded on blowup."""
    step: dict[tuple[str, str], set[str]] = {}
    for p, letter, q in nfa.transitions:
        step.setdefault((p, letter), set()).add(q)
    start = frozenset(nfa.initial)
    names: dict[frozenset, str] = {start: "d0"}
    queue = [start]
    transitions: dict[tuple[str, str], str] = {}
    while queue:
        subset = queue.pop()
        for letter in nfa.alphabet.letters:
            target = frozenset().union(
                *(step.get((p, letter), set()) for p in subset)
            ) if subset else frozenset()
            if not target:
                continue
            if target not in names:
                if len(names) >= state_budget:
                    raise BudgetExceeded(
                        f"determinization exceeded {state_budget} states",
                        frontier=len(queue),
                    )
                names[target] = f"d{len(names)}"
                queue.append(target)
            transitions[(names[subset], letter)] = names[target]
    accepting = frozenset(
        name for subset, name in names.items() if subset & set(nfa.accepting)
    )
    return DFA(nfa.alphabet, tuple(names.values()), transitions, "d0", accepting)


def sigma_star_automaton(alphabet: GeneratorAlphabet) -> DFA:
    transitions = {("q", letter): "q" for letter in alphabet.letters}
    return DFA(alphabet, ("q",), transitions, "q", frozenset({"q"}))


def empty_automaton(alphabet: GeneratorAlphabet) -> DFA:
    return DFA(alphabet, ("q",), {}, "q", frozenset())


# ---------------------------------------------------------------------------
# Intersection with a regular language (triple construction)
# ---------------------------------------------------------------------------


def intersect_regular(g: Grammar, automaton: NFA | DFA, state_budget: int = 4096) -> Grammar:
    """Grammar for L(g) intersected with the automaton's language.

    Runs on the CNF of g; nonterminals are (state, symbol, state) triples.
    The result is a general grammar (convert again for CYK use).
    """
    dfa = automaton if isinstance(automaton, DFA) else determinize(automaton, state_budget)
    cnf = to_cnf(g)
    accepts_empty = cnf.accepts_empty and dfa.initial in dfa.accepting
    if not cnf.productions:
        return Grammar(("S0",), g.alphabet, (), "S0", accepts_empty)
    nts = set(cnf.nonterminals)

    def triple(p: str, sym: str, q: str) -> str:
        return f"[{p},{sym},{q}]"

    states = dfa.states
    productions: list[tuple[str, tuple[str, ...]]] = []
    declared: list[str] = ["S0"]
    for p in states:
        for q in states:
            for a in cnf.nonterminals:
                declared.append(triple(p, a, q))
    for idx, (head, body) in enumerate(cnf.productions):
        if len(body) == 1:
            letter = body[0]
            for p in states:
                q = dfa.transitions.get((p, letter))
                if q is not None:
                    productions.append((triple(p, head, q), (letter,)))
        else:
            b, c = body
            for p in states:
                for r in states:
                    for q in states:
                        productions.append(
                            (triple(p, head, q), (triple(p, b, r), triple(r, c, q)))
                        )
    for f in sorted(dfa.accepting):
        productions.append(("S0", (triple(dfa.initial, cnf.start, f),)))
    return Grammar(tuple(declared), g.alphabet, tuple(productions), "S0", accepts_empty)


def language_is_empty(g: Grammar) -> bool:
    """True when the grammar derives no word at all (empty word included)."""
    if g.accepts_empty:
        return False
    nts = set(g.nonterminals)
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            if head not in productive and all(
                s in productive or s not in nts for s in body
            ):
                productive.add(head)
                changed = True
    return g.start not in productive


# ---------------------------------------------------------------------------
# Block homomorphisms and their inverse images
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockHomomorphism:
    """Monoid map T* -> S* sending each letter to a fixed nonempty block.

    Inverse letters must map to the reversed inverse block, so images of
    inverse words are inverses of images.
    """

    source: GeneratorAlphabet
    target: GeneratorAlphabet
    blocks: Mapping[str, Word]

    def __post_init__(self) -> None:
        for i, name in enumerate(self.source.letters):
            block = self.blocks.get(name)
            if block is None:
                raise ValueError(f"no block for letter {name!r}")
            if len(block) == 0:
                raise ValueError(f"empty block for letter {name!r}")
            if block.alphabet != self.target:
                raise ValueError("block over the wrong alphabet")
            partner = self.blocks[self.source.letters[self.source.involution[i]]]
            if partner.letters != block.inverse().letters:
                raise ValueError("inverse letter must map to the inverse block")

    @property
    def max_block_length(self) -> int:
        return max(len(b) for b in self.blocks.values())

    def apply(self, word: Word) -> Word:
        if word.alphabet != self.source:
            raise ValueError("word over the wrong alphabet")
        letters: list[int] = []
        for i in word.letters:
            letters.extend(self.blocks[self.source.letters[i]].letters)
        return Word(self.target, tuple(letters))

    def block_language_automaton(self) -> NFA:
        """NFA for (w_{t_1} | ... | w_{t_k})*: all block concatenations."""
        states = ["hub"]
        transitions: list[tuple[str, str, str]] = []
        for name in self.source.letters:
            block = self.blocks[name]
            prev = "hub"
            for pos, i in enumerate(block.letters):
                letter = self.target.letters[i]
                if pos == len(block) - 1:
                    nxt = "hub"
                else:
                    nxt = f"{name}:{pos}"
                    states.append(nxt)
                transitions.append((prev, letter, nxt))
                prev = nxt
        return NFA(
            self.target,
            tuple(states),
            tuple(transitions),
            ("hub",),
            ("hub",),
        )


def inverse_hom(g: Grammar, h: BlockHomomorphism) -> Grammar:
    """Grammar over T for h^{-1}(L(g) ∩ R), R the block-concatenation language.

    Every image h(w) lies in R by construction, so membership reduces to
    h(w) ∈ L(g).  Nonterminal [x|A|y] derives u exactly when A derives
    x·h(u)·y in g, with x a proper block suffix (or empty) and y a proper
    block prefix (or empty).  Splits falling strictly inside a context are
    resolved by a precomputed "A derives this block factor" predicate, and
    splits inside an image block emit the source letter being crossed.
    """
    cnf = to_cnf(g)
    T = h.source
    accepts_empty = cnf.accepts_empty
    if not cnf.productions:
        return Grammar(("S0",), T, (), "S0", accepts_empty)
    target_letters = h.target.letters
    blocks = {
        name: tuple(target_letters[i] for i in h.blocks[name].letters)
        for name in T.letters
    }

    # Context strings: proper suffixes / prefixes of blocks, plus the empty one.
    suffixes: list[tuple[str, ...]] = [()]
    prefixes: list[tuple[str, ...]] = [()]
    for block in blocks.values():
        for cut in range(1, len(block)):
            if block[cut:] not in suffixes:
                suffixes.append(block[cut:])
            if block[:cut] not in prefixes:
                prefixes.append(block[:cut])

    # derives[A, f] for every factor f of every block (contexts split inside
    # blocks only, so factors are the only pure-terminal yields that matter).
    derives: set[tuple[str, tuple[str, ...]]] = set()
    factors: set[tuple[str, ...]] = set()
    for block in blocks.values():
        for i in range(len(block)):
            for j in range(i + 1, len(block) + 1):
                factors.add(block[i:j])
    for f in factors:
        word = Word(h.target, tuple(h.target.index(s) for s in f))
        table = cyk_all(cnf, word)
        for a in table.get((0, len(f)), ()):
            derives.add((a, f))

    def name_of(x: tuple[str, ...], a: str, y: tuple[str, ...]) -> str:
        return f"[{'.'.join(x)}|{a}|{'.'.join(y)}]"

    declared = ["S0"]
    for x in suffixes:
        for a in cnf.nonterminals:
            for y in prefixes:
                declared.append(name_of(x, a, y))

    productions: list[tuple[str, tuple[str, ...]]] = [
        ("S0", (name_of((), cnf.start, ()),))
    ]
    inner_splits = [
        (block[:cut], name, block[cut:])
        for name, block in blocks.items()
        for cut in range(1, len(block))
    ]

    for head, body in cnf.productions:
        if len(body) == 1:
            letter = body[0]
            # A -> c reads a lone context letter, or a whole 1-letter block.
            if (letter,) in suffixes:
                productions.append((name_of((letter,), head, ()), ()))
            if (letter,) in prefixes:
                productions.append((name_of((), head, (letter,)), ()))
            for name, block in blocks.items():
                if block == (letter,):
                    productions.append((name_of((), head, ()), (name,)))
        else:
            b, c = body
            for x in suffixes:
                for y in prefixes:
                    head_name = name_of(x, head, y)
                    # Split at a block boundary (covers the x / h(u) / y seams).
                    productions.append(
                        (head_name, (name_of(x, b, ()), name_of((), c, y)))
                    )
                    # Split inside the block of an emitted letter.
                    for p, t_letter, s in inner_splits:
                        productions.append(
                            (head_name, (name_of(x, b, p), t_letter, name_of(s, c, y)))
                        )
                    # Split strictly inside the suffix context x.
                    for cut in range(1, len(x)):
                        if (b, x[:cut]) in derives:
                            productions.append((head_name, (name_of(x[cut:], c, y),)))
                    # Split strictly inside the prefix context y.
                    for cut in range(1, len(y)):
                        if (c, y[cut:]) in derives:
                            productions.append((head_name, (name_of(x, b, y[:cut]),)))
    return Grammar(tuple(declared), T, tuple(productions), "S0", accepts_empty)


# ---------------------------------------------------------------------------
# Quasigeodesic constants under block replacement
# ---------------------------------------------------------------------------


def forward_constants(
    A: Fraction | int,
    B: Fraction | int,
    max_block: int,
    lam: Fraction | int,
    eps: Fraction | int,
) -> tuple[Fraction, Fraction]:
    """Constants certified for images of (lam, eps)-quasigeodesics.

    Lambda = A * lam * max_block; E = 2(Lambda + 1) max_block + Lambda B
    + max_block * eps.
    """
    A, B, lam, eps = Fraction(A), Fraction(B), Fraction(lam), Fraction(eps)
    if A < 1 or B < 0 or max_block < 1 or lam < 1 or eps < 0:
        raise InvalidParameter("need A, lam >= 1, B, eps >= 0, max_block >= 1")
    big_lam = A * lam * max_block
    big_eps = 2 * (big_lam + 1) * max_block + big_lam * B + max_block * eps
    return big_lam, big_eps


def reverse_constants(
    A: Fraction | int,
    B: Fraction | int,
    big_lam: Fraction | int,
    big_eps: Fraction | int,
) -> tuple[Fraction, Fraction]:
    """Constants pulled back through the block map: lam = A Lambda,
    eps = Lambda B + E."""
    A, B = Fraction(A), Fraction(B)
    big_lam, big_eps = Fraction(big_lam), Fraction(big_eps)
    if A < 1 or B < 0 or big_lam < 1 or big_eps < 0:
        raise InvalidParameter("need A, Lambda >= 1 and B, E >= 0")
    return A * big_lam, big_lam * B + big_eps
