"""Marked-position pumping decompositions extracted from CYK parse trees and
verified post hoc, so every returned decomposition is certified per instance.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .grammar import Grammar, ParseTree, cyk, cyk_member, ogden_constant
from .words import Word


class NotInLanguage(ValueError):
    """The word to decompose is not in the grammar's language."""


class InsufficientMarks(ValueError):
    """Fewer marks than the safe constant, and no decomposition was found."""


class ExtractionFailed(RuntimeError):
    """No verified decomposition despite enough marks; an implementation bug."""


@dataclass(frozen=True)
class OgdenDecomposition:
    """A five-part split w = u x z y v with marked-position bookkeeping.

    The four conditions certified on construction: xzy carries at most p
    marks, z carries at least one, u and x (or y and v) both carry marks, and
    the pumped words u x^i z y^i v stay in the language for i in 0..4.
    """

    u: Word
    x: Word
    z: Word
    y: Word
    v: Word
    marks: frozenset[int]
    threshold: int

    def word(self) -> Word:
        return self.u + self.x + self.z + self.y + self.v

    def bounds(self) -> tuple[int, int, int, int]:
        """Start offsets of x, z, y, v inside the original word."""
        a = len(self.u)
        b = a + len(self.x)
        c = b + len(self.z)
        d = c + len(self.y)
        return a, b, c, d

    def pump(self, i: int) -> Word:
        if i < 0:
            raise ValueError("pump count must be nonnegative")
        return self.u + self.x.repeat(i) + self.z + self.y.repeat(i) + self.v

    def left_case(self) -> bool:
        """True when u and x carry the marks (else y and v do)."""
        a, b, _, _ = self.bounds()
        return any(m < a for m in self.marks) and any(a <= m < b for m in self.marks)


def _marks_in(sorted_marks: list[int], start: int, end: int) -> int:
    return bisect_left(sorted_marks, end) - bisect_left(sorted_marks, start)


def _collect_nodes(tree: ParseTree) -> list[ParseTree]:
    """All nonterminal nodes, deterministic preorder."""
    out: list[ParseTree] = []
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.letter is not None:
            continue
        out.append(node)
        stack.extend(reversed(node.children))
    return out


def _marked_path(tree: ParseTree, sorted_marks: list[int]) -> list[ParseTree]:
    """Root-to-leaf path descending toward marked positions.

    At a node whose both children contain marks, the heavier child wins
    (ties break left); otherwise the unique marked child is taken.
    """
    path = [tree]
    node = tree
    while node.children:
        internal = [c for c in node.children if c.letter is None]
        if not internal:
            break
        best = None
        best_count = -1
        for child in internal:
            count = _marks_in(sorted_marks, child.start, child.end)
            if count > best_count:
                best = child
                best_count = count
        if best is None or best_count <= 0:
            break
        path.append(best)
        node = best
    return path


def _bullets_hold(
    deco_spans: tuple[int, int, int, int],
    n: int,
    sorted_marks: list[int],
    threshold: int,
) -> bool:
    a, b, c, d = deco_spans
    if _marks_in(sorted_marks, a, d) > threshold:  # xzy
        return False
    if _marks_in(sorted_marks, b, c) < 1:  # z
        return False
    left = _marks_in(sorted_marks, 0, a) >= 1 and _marks_in(sorted_marks, a, b) >= 1
    right = _marks_in(sorted_marks, c, d) >= 1 and _marks_in(sorted_marks, d, n) >= 1
    return left or right


def _candidate_pairs(
    path: list[ParseTree], all_nodes: list[ParseTree]
) -> Iterator[tuple[ParseTree, ParseTree]]:
    """Same-label ancestor/descendant pairs: path pairs deepest-first, then a
    deterministic sweep over the whole tree."""
    seen: set[tuple[int, int, int, int]] = set()
    for j in range(len(path) - 1, 0, -1):
        for i in range(j - 1, -1, -1):
            n1, n2 = path[i], path[j]
            if n1.symbol == n2.symbol:
                key = (n1.start, n1.end, n2.start, n2.end)
                if key not in seen:
                    seen.add(key)
                    yield n1, n2
    by_span = sorted(all_nodes, key=lambda t: (t.end - t.start, t.start))
    for n2 in by_span:
        for n1 in by_span:
            if n1.end - n1.start <= n2.end - n2.start:
                continue
            if n1.symbol != n2.symbol:
                continue
            if not (n1.start <= n2.start and n2.end <= n1.end):
                continue
            key = (n1.start, n1.end, n2.start, n2.end)
            if key not in seen:
                seen.add(key)
                yield n1, n2


def ogden_decompose(
    g: Grammar, w: Word, marks: Iterable[int], *, pump_checks: int = 4
) -> OgdenDecomposition:
    """Extract a verified decomposition of w with the given marked positions.

    Requires a CNF grammar.  With at least ``ogden_constant(g)`` marks a
    failure to extract signals a bug (ExtractionFailed); below that threshold
    extraction is attempted anyway and failure raises InsufficientMarks.
    """
    mark_set = frozenset(marks)
    n = len(w)
    if any(not 0 <= m < n for m in mark_set):
        raise ValueError("marks out of range")
    if not mark_set:
        raise InsufficientMarks("at least one marked position is required")
    tree = cyk(g, w)
    if tree is None:
        raise NotInLanguage(f"word of length {n} not generated by the grammar")
    threshold = ogden_constant(g)
    sorted_marks = sorted(mark_set)
    path = _marked_path(tree, sorted_marks)
    nodes = _collect_nodes(tree)

    for n1, n2 in _candidate_pairs(path, nodes):
        spans = (n1.start, n2.start, n2.end, n1.end)
        if not _bullets_hold(spans, n, sorted_marks, threshold):
            continue
        a, b, c, d = spans
        deco = OgdenDecomposition(
            w.subword(0, a),
            w.subword(a, b),
            w.subword(b, c),
            w.subword(c, d),
            w.subword(d, n),
            mark_set,
            threshold,
        )
        if all(cyk_member(g, deco.pump(i)) for i in range(pump_checks + 1)):
            return deco
    if len(mark_set) < threshold:
        raise InsufficientMarks(
            f"{len(mark_set)} marks < safe constant {threshold}; no decomposition found"
        )
    raise ExtractionFailed(
        f"no verified decomposition with {len(mark_set)} marks >= {threshold}"
    )
