"""Context-free grammars over generator alphabets: the line-based file
format, Chomsky normal form conversion, and CYK membership with parse trees.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .words import GeneratorAlphabet, Word, serialize_word


class GrammarError(ValueError):
    """Malformed grammar text or inconsistent symbol usage."""


class EmptyLanguage(Warning):
    """The start symbol derives no terminal word."""


@dataclass(frozen=True)
class Grammar:
    """Productions over declared nonterminals and alphabet letters.

    Body symbols name either a declared nonterminal or a letter of the
    terminal alphabet; empty bodies encode EPSILON.  ``accepts_empty`` tracks
    the empty word separately once a grammar is in CNF (CNF productions are
    ``A -> B C`` or ``A -> a`` only).
    """

    nonterminals: tuple[str, ...]
    alphabet: GeneratorAlphabet
    productions: tuple[tuple[str, tuple[str, ...]], ...]
    start: str
    accepts_empty: bool = False

    def __post_init__(self) -> None:
        declared = set(self.nonterminals)
        if len(declared) != len(self.nonterminals):
            raise GrammarError("duplicate nonterminal")
        if self.start not in declared:
            raise GrammarError(f"start symbol {self.start!r} not declared")
        letters = set(self.alphabet.letters)
        for head, body in self.productions:
            if head not in declared:
                raise GrammarError(f"production head {head!r} not declared")
            for sym in body:
                if sym not in declared and sym not in letters:
                    raise GrammarError(f"unknown symbol {sym!r} in production")

    def is_terminal(self, sym: str) -> bool:
        return sym not in set(self.nonterminals)

    def is_cnf(self) -> bool:
        nts = set(self.nonterminals)
        for _, body in self.productions:
            if len(body) == 2 and all(s in nts for s in body):
                continue
            if len(body) == 1 and body[0] not in nts:
                continue
            return False
        return True

    def to_text(self) -> str:
        """Canonical serialization in the grammar file format."""
        by_head: dict[str, list[str]] = {}
        order: list[str] = []
        for head, body in self.productions:
            if head not in by_head:
                by_head[head] = []
                order.append(head)
            rendered = " ".join(_terminal_token(self, s) for s in body) or "EPSILON"
            by_head[head].append(rendered)
        if self.start in order:
            order.remove(self.start)
        order.insert(0, self.start)
        lines = [
            f"{head} -> {' | '.join(by_head[head])}" for head in order if by_head.get(head)
        ]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        payload = self.to_text() + f"empty={self.accepts_empty}\n"
        return hashlib.sha256(payload.encode()).hexdigest()


def _terminal_token(g: Grammar, sym: str) -> str:
    """Render terminals in ASCII token form (inverse letters as ``g^-1``)."""
    if not g.is_terminal(sym):
        return sym
    i = g.alphabet.index(sym)
    if g.alphabet.is_positive(i):
        return sym
    return f"{g.alphabet.letters[g.alphabet.inverse(i)]}^-1"


def _resolve_terminal(token: str, alphabet: GeneratorAlphabet) -> Optional[str]:
    """Map a grammar token to a letter name, accepting ``g^-1`` spellings."""
    if token in alphabet.letters:
        return token
    name, sep, exp = token.partition("^")
    if sep and name in alphabet.letters and exp in ("-1", "1"):
        i = alphabet.index(name)
        if exp == "-1":
            i = alphabet.inverse(i)
        return alphabet.letters[i]
    return None


def parse_grammar(text: str, alphabet: GeneratorAlphabet) -> Grammar:
    """Parse the line-based format: ``Head -> sym sym ... | alt``.

    ``#`` starts a comment, EPSILON denotes the empty body, and the start
    symbol is the first head.  Terminals must match alphabet tokens.
    """
    raw_rules: list[tuple[str, list[str]]] = []
    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise GrammarError(f"missing '->' in line {raw_line!r}")
        head, rhs = line.split("->", 1)
        head = head.strip()
        if not head or " " in head:
            raise GrammarError(f"bad head in line {raw_line!r}")
        for alt in rhs.split("|"):
            symbols = alt.split()
            if symbols == ["EPSILON"]:
                raw_rules.append((head, []))
            elif "EPSILON" in symbols:
                raise GrammarError("EPSILON must stand alone in an alternative")
            else:
                raw_rules.append((head, symbols))
    if not raw_rules:
        raise GrammarError("grammar has no productions")
    heads = []
    for head, _ in raw_rules:
        if head not in heads:
            heads.append(head)
    head_set = set(heads)
    productions = []
    for head, symbols in raw_rules:
        body = []
        for sym in symbols:
            if sym in head_set:
                body.append(sym)
            else:
                letter = _resolve_terminal(sym, alphabet)
                if letter is None:
                    raise GrammarError(f"symbol {sym!r} is neither a head nor a terminal")
                body.append(letter)
        productions.append((head, tuple(body)))
    return Grammar(tuple(heads), alphabet, tuple(productions), heads[0])


def sigma_star_grammar(alphabet: GeneratorAlphabet) -> Grammar:
    """CNF grammar for all words over the alphabet (empty word via flag)."""
    prods = [("S", (letter,)) for letter in alphabet.letters]
    prods.append(("S", ("S", "S")))
    return Grammar(("S",), alphabet, tuple(prods), "S", accepts_empty=True)


def ogden_constant(g: Grammar) -> int:
    """Safe marked-position threshold for CNF grammars: 2^(|N| + 2)."""
    return 2 ** (len(g.nonterminals) + 2)


# ---------------------------------------------------------------------------
# Chomsky normal form
# ---------------------------------------------------------------------------


class _Names:
    def __init__(self, taken: Iterable[str]):
        self.taken = set(taken)

    def fresh(self, base: str) -> str:
        name = base
        k = 0
        while name in self.taken:
            k += 1
            name = f"{base}{k}"
        self.taken.add(name)
        return name


def _prune(g: Grammar) -> Optional[Grammar]:
    """Drop unproductive and unreachable symbols; None if start is dead."""
    nt_set = set(g.nonterminals)
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            if head not in productive and all(
                s in productive or s not in nt_set for s in body
            ):
                productive.add(head)
                changed = True
    if g.start not in productive:
        return None
    prods = [
        (h, b)
        for h, b in g.productions
        if h in productive and all(s in productive or s not in nt_set for s in b)
    ]
    reachable = {g.start}
    changed = True
    while changed:
        changed = False
        for head, body in prods:
            if head in reachable:
                for s in body:
                    if s in nt_set and s not in reachable:
                        reachable.add(s)
                        changed = True
    prods = [(h, b) for h, b in prods if h in reachable]
    live = tuple(a for a in g.nonterminals if a in reachable)
    return Grammar(live, g.alphabet, tuple(prods), g.start, g.accepts_empty)


def to_cnf(g: Grammar) -> Grammar:
    """Weakly equivalent CNF grammar; the empty word moves to the flag.

    Unreachable and unproductive symbols are pruned, so the Ogden constant of
    the result reflects only the live grammar.  Warns EmptyLanguage when the
    start symbol is unproductive.
    """
    pruned = _prune(g)
    if pruned is None:
        warnings.warn(f"start symbol {g.start!r} derives nothing", EmptyLanguage)
        return Grammar((g.start,), g.alphabet, (), g.start, g.accepts_empty)
    g = pruned
    nts = list(g.nonterminals)
    names = _Names(list(nts) + list(g.alphabet.letters))
    prods: list[tuple[str, tuple[str, ...]]] = list(g.productions)

    # TERM: wrap terminals inside long bodies.
    wrappers: dict[str, str] = {}
    out: list[tuple[str, tuple[str, ...]]] = []
    for head, body in prods:
        if len(body) >= 2:
            resolved = []
            for sym in body:
                if g.is_terminal(sym):
                    if sym not in wrappers:
                        wrappers[sym] = names.fresh(f"T[{sym}]")
                        nts.append(wrappers[sym])
                    resolved.append(wrappers[sym])
                else:
                    resolved.append(sym)
            out.append((head, tuple(resolved)))
        else:
            out.append((head, body))
    for letter, wrapper in wrappers.items():
        out.append((wrapper, (letter,)))
    prods = out

    # BIN: binarize long bodies.
    out = []
    for head, body in prods:
        while len(body) > 2:
            helper = names.fresh(f"B[{head}]")
            nts.append(helper)
            out.append((head, (body[0], helper)))
            head, body = helper, body[1:]
        out.append((head, body))
    prods = out

    # DEL: eliminate nullable symbols, tracking the empty word.
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for head, body in prods:
            if head not in nullable and all(s in nullable for s in body):
                nullable.add(head)
                changed = True
    accepts_empty = g.accepts_empty or g.start in nullable
    seen: set[tuple[str, tuple[str, ...]]] = set()
    out = []
    for head, body in prods:
        variants = [()]
        for sym in body:
            if sym in nullable:
                variants = [v + (sym,) for v in variants] + [v for v in variants]
            else:
                variants = [v + (sym,) for v in variants]
        for v in variants:
            if v and (head, v) not in seen:
                seen.add((head, v))
                out.append((head, v))
    prods = out

    # UNIT: close unit chains A -> B via the unit graph.
    nt_set = set(nts)
    unit_edges: dict[str, list[str]] = {}
    real_bodies: dict[str, list[tuple[str, ...]]] = {}
    for head, body in prods:
        if len(body) == 1 and body[0] in nt_set:
            unit_edges.setdefault(head, []).append(body[0])
        else:
            real_bodies.setdefault(head, []).append(body)
    out = []
    seen = set()
    for a in nts:
        closure = [a]
        visited = {a}
        k = 0
        while k < len(closure):
            for nxt in unit_edges.get(closure[k], ()):
                if nxt not in visited:
                    visited.add(nxt)
                    closure.append(nxt)
            k += 1
        for b in closure:
            for body in real_bodies.get(b, ()):
                if (a, body) not in seen:
                    seen.add((a, body))
                    out.append((a, body))
    prods = out

    # PRUNE: the DEL/UNIT steps can orphan helpers.
    candidate = Grammar(tuple(nts), g.alphabet, tuple(prods), g.start, accepts_empty)
    final = _prune(candidate)
    if final is None:
        warnings.warn(f"start symbol {g.start!r} derives nothing", EmptyLanguage)
        return Grammar((g.start,), g.alphabet, (), g.start, accepts_empty)
    return final


# ---------------------------------------------------------------------------
# CYK
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParseTree:
    """Derivation tree node; leaves carry the alphabet letter they read."""

    symbol: str
    start: int
    end: int
    production: Optional[int] = None
    children: tuple["ParseTree", ...] = ()
    letter: Optional[int] = None

    def yield_letters(self) -> tuple[int, ...]:
        if self.letter is not None:
            return (self.letter,)
        out: tuple[int, ...] = ()
        for child in self.children:
            out += child.yield_letters()
        return out

    def depth(self) -> int:
        if not self.children:
            return 1
        return 1 + max(c.depth() for c in self.children)

    def fingerprint(self) -> str:
        def render(node: "ParseTree") -> str:
            if node.letter is not None:
                return f"({node.symbol}:{node.letter})"
            inner = "".join(render(c) for c in node.children)
            return f"({node.symbol}@{node.production}{inner})"

        return hashlib.sha1(render(self).encode()).hexdigest()


def _split_productions(g: Grammar):
    nts = set(g.nonterminals)
    terminal_rules: list[tuple[int, str, str]] = []
    binary_rules: list[tuple[int, str, str, str]] = []
    for idx, (head, body) in enumerate(g.productions):
        if len(body) == 1 and body[0] not in nts:
            terminal_rules.append((idx, head, body[0]))
        elif len(body) == 2 and body[0] in nts and body[1] in nts:
            binary_rules.append((idx, head, body[0], body[1]))
        else:
            raise GrammarError("grammar is not in CNF")
    return terminal_rules, binary_rules


def cyk_member(g: Grammar, word: Word) -> bool:
    """Membership only; split-major inner loop for speed."""
    n = len(word)
    if n == 0:
        return g.accepts_empty
    terminal_rules, binary_rules = _split_productions(g)
    letters = [word.alphabet.letters[i] for i in word.letters]
    table: dict[tuple[int, int], set[str]] = {}
    for i, letter in enumerate(letters):
        cell = {head for _, head, term in terminal_rules if term == letter}
        table[(i, i + 1)] = cell
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            cell: set[str] = set()
            for k in range(i + 1, j):
                left = table[(i, k)]
                right = table[(k, j)]
                if not left or not right:
                    continue
                for _, head, b, c in binary_rules:
                    if head not in cell and b in left and c in right:
                        cell.add(head)
            table[(i, j)] = cell
    return g.start in table[(0, n)]


def cyk_all(g: Grammar, word: Word) -> dict[tuple[int, int], set[str]]:
    """Full CYK table: every nonterminal deriving each span of the word."""
    n = len(word)
    terminal_rules, binary_rules = _split_productions(g)
    letters = [word.alphabet.letters[i] for i in word.letters]
    table: dict[tuple[int, int], set[str]] = {}
    for i, letter in enumerate(letters):
        table[(i, i + 1)] = {head for _, head, term in terminal_rules if term == letter}
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            cell: set[str] = set()
            for k in range(i + 1, j):
                left, right = table[(i, k)], table[(k, j)]
                if not left or not right:
                    continue
                for _, head, b, c in binary_rules:
                    if head not in cell and b in left and c in right:
                        cell.add(head)
            table[(i, j)] = cell
    return table


def cyk(g: Grammar, word: Word) -> Optional[ParseTree]:
    """Parse tree if the word is in the language, else None.

    Tie-breaking is deterministic: the lowest production index wins, then the
    leftmost split.
    """
    n = len(word)
    if n == 0:
        return ParseTree(g.start, 0, 0) if g.accepts_empty else None
    terminal_rules, binary_rules = _split_productions(g)
    letters = [word.alphabet.letters[i] for i in word.letters]
    back: dict[tuple[int, int], dict[str, tuple]] = {}
    for i, letter in enumerate(letters):
        cell: dict[str, tuple] = {}
        for idx, head, term in terminal_rules:
            if term == letter and head not in cell:
                cell[head] = ("term", idx)
        back[(i, i + 1)] = cell
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            cell = {}
            for idx, head, b, c in binary_rules:
                if head in cell:
                    continue
                for k in range(i + 1, j):
                    if b in back[(i, k)] and c in back[(k, j)]:
                        cell[head] = ("split", idx, k, b, c)
                        break
            back[(i, j)] = cell
    if g.start not in back[(0, n)]:
        return None

    def build(symbol: str, i: int, j: int) -> ParseTree:
        entry = back[(i, j)][symbol]
        if entry[0] == "term":
            leaf = ParseTree(
                letters[i], i, j, letter=word.letters[i]
            )
            return ParseTree(symbol, i, j, production=entry[1], children=(leaf,))
        _, idx, k, b, c = entry
        return ParseTree(
            symbol, i, j, production=idx, children=(build(b, i, k), build(c, k, j))
        )

    return build(g.start, 0, n)
