"""Word-metric computation: exact BFS balls, bidirectional distance queries,
growth counts, and the certified analytic lower bounds for BS(m, n)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .groups import BSNormalForm
from .words import Word

#: Denominator grid for conservatively rounded analytic bounds.
ROUND_DENOM = 2**20

DEFAULT_NODE_BUDGET = 5_000_000


class BudgetExceeded(RuntimeError):
    """A search hit its node budget; reports the frontier size at failure."""

    def __init__(self, message: str, frontier: int = 0):
        super().__init__(message)
        self.frontier = frontier


@dataclass(frozen=True)
class DistanceBound:
    """A certified distance value: exact, or a sound one-sided bound."""

    kind: str  # "exact" | "lower" | "upper"
    value: Fraction
    provenance: str  # "bfs" | "bidirectional" | "bs-analytic" | "word-length"

    def __post_init__(self) -> None:
        if self.kind not in ("exact", "lower", "upper"):
            raise ValueError(f"bad bound kind {self.kind!r}")
        if self.value < 0:
            raise ValueError("distance bounds are nonnegative")


@dataclass
class Ball:
    """All elements within ``radius`` of the identity, with exact distances."""

    radius: int
    table: dict[str, int]

    def __len__(self) -> int:
        return len(self.table)

    def sphere_sizes(self) -> list[int]:
        counts = [0] * (self.radius + 1)
        for d in self.table.values():
            counts[d] += 1
        return counts

    def export_lines(self) -> list[str]:
        """Line format ``<encoding> <distance>``, sorted by encoding."""
        return [f"{enc} {d}" for enc, d in sorted(self.table.items())]


def _bfs_elements(model, radius: int, node_budget: int) -> dict:
    """Element-keyed exact distance table for the ball of given radius."""
    dist = {model.identity(): 0}
    frontier = [model.identity()]
    letters = range(len(model.alphabet))
    for layer in range(radius):
        nxt = []
        for g in frontier:
            for i in letters:
                h = model.apply_letter(g, i)
                if h not in dist:
                    dist[h] = layer + 1
                    nxt.append(h)
                    if len(dist) > node_budget:
                        raise BudgetExceeded(
                            f"ball exceeded node budget {node_budget} at radius "
                            f"{layer + 1}",
                            frontier=len(nxt),
                        )
        frontier = nxt
        if not frontier:
            break
    return dist


def bfs_ball(model, radius: int, node_budget: int = DEFAULT_NODE_BUDGET) -> Ball:
    """Exact ball via breadth-first search over canonical elements."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    dist = _bfs_elements(model, radius, node_budget)
    return Ball(radius, {model.encode(g): d for g, d in dist.items()})


def growth_counts(
    model, radius: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> list[int]:
    """Sphere sizes |S(r)| for r = 0..radius."""
    return bfs_ball(model, radius, node_budget).sphere_sizes()


# ---------------------------------------------------------------------------
# BS(m, n) analytic lower bounds
# ---------------------------------------------------------------------------


def _round_down(value: float) -> Fraction:
    """Conservative rounding: snap down to the 2^-20 grid, minus one ulp."""
    return Fraction(math.floor(value * ROUND_DENOM) - 1, ROUND_DENOM)


def bs_lower_bound(g: BSNormalForm) -> DistanceBound:
    """Normal-form length bound d(g) >= (|w| + log_{n/m}(|N|+1))/(n+1) - D.

    D = log_{n/m}(mn/(n-m)).  Sound for n > m >= 1; the logarithm is computed
    in floating point and rounded down so the bound is never inflated.
    """
    m, n = g.m, g.n
    if n <= m:
        raise ValueError("analytic bound requires n > m >= 1")
    ratio = math.log(n / m)
    syllable_letters = sum(e for e, _ in g.syllables) + len(g.syllables)
    raw = (syllable_letters + math.log(abs(g.tail) + 1) / ratio) / (n + 1)
    raw -= math.log(m * n / (n - m)) / ratio
    value = max(Fraction(0), _round_down(raw))
    return DistanceBound("lower", value, "bs-analytic")


def bs_prefix_lower_bound(
    n_prime: int, syllable_word: Word | Sequence[tuple[int, int]], m: int, n: int
) -> DistanceBound:
    """Lower bound for elements presented as a^N' w(a,t) with w in syllable form.

    d >= |w|/(n(n+1)) + log_{n/m}(1 + (m/n)^T |N'|)/(n+1) - D1 where T counts
    the t-letters of w.  The printed constant pairs a negative logarithm with
    this orientation, so |log(n/m)| is used; soundness is checked against BFS.
    """
    if n <= m or m < 1:
        raise ValueError("prefix bound requires n > m >= 1")
    if isinstance(syllable_word, Word):
        sylls = _parse_syllables(syllable_word, m, n)
    else:
        sylls = list(syllable_word)
    length = sum(e for e, _ in sylls) + len(sylls)
    t_count = len(sylls)
    ratio = math.log(n / m)
    raw = length / (n * (n + 1))
    raw += math.log1p((m / n) ** t_count * abs(n_prime)) / ratio / (n + 1)
    raw -= math.log(n * m / (n - m)) / ratio
    raw -= math.log1p(n * n / (n - m)) / ratio / (n + 1)
    value = max(Fraction(0), _round_down(raw))
    return DistanceBound("lower", value, "bs-analytic")


def _parse_syllables(word: Word, m: int, n: int) -> list[tuple[int, int]]:
    """Read a word as a^{e1} t^{s1} ... with residues in the canonical ranges."""
    alphabet = word.alphabet
    sylls: list[tuple[int, int]] = []
    run = 0
    for i in word.letters:
        positive = alphabet.is_positive(i)
        base = alphabet.letters[i] if positive else alphabet.letters[alphabet.inverse(i)]
        if base == "a":
            if not positive:
                raise ValueError("syllable words carry nonnegative a-powers")
            run += 1
        elif base == "t":
            sign = 1 if positive else -1
            bound = n if sign > 0 else m
            if not 0 <= run < bound:
                raise ValueError(f"a-power {run} outside syllable range [0, {bound})")
            sylls.append((run, sign))
            run = 0
        else:
            raise ValueError(f"unexpected letter {alphabet.letters[i]!r}")
    if run:
        raise ValueError("syllable words must end with a t-letter")
    return sylls


# ---------------------------------------------------------------------------
# Distance queries
# ---------------------------------------------------------------------------


@dataclass
class _SideBall:
    """One side of a bidirectional search; grows layer by layer."""

    dist: dict
    frontier: list
    radius: int = 0


class MetricCache:
    """Memoized distance oracle for one model instance.

    Maintains a shared identity-side ball that grows on demand, a per-element
    memo of exact distances, and the model's analytic lower bounds.  All
    queries are pure given fixed budgets.
    """

    def __init__(
        self,
        model,
        *,
        identity_ball_nodes: int = 400_000,
        query_nodes: int = 120_000,
        radius_cap: int = 64,
    ):
        self.model = model
        self.identity_ball_nodes = identity_ball_nodes
        self.query_nodes = query_nodes
        self.radius_cap = radius_cap
        self._letters = range(len(model.alphabet))
        self._id_side = _SideBall({model.identity(): 0}, [model.identity()])
        self._exact: dict = {model.identity(): 0}
        self._search_floor: dict = {}

    # -- identity side -----------------------------------------------------

    def _grow_identity(self) -> bool:
        """Advance the shared identity ball by one layer; False when capped."""
        side = self._id_side
        if not side.frontier or len(side.dist) >= self.identity_ball_nodes:
            return False
        model = self.model
        nxt = []
        new_radius = side.radius + 1
        for g in side.frontier:
            for i in self._letters:
                h = model.apply_letter(g, i)
                if h not in side.dist:
                    side.dist[h] = new_radius
                    nxt.append(h)
        side.frontier = nxt
        side.radius = new_radius
        return True

    def identity_distances(self, radius: int) -> dict:
        """Exact distances for the full identity ball of the given radius."""
        while self._id_side.radius < radius:
            if not self._grow_identity():
                raise BudgetExceeded(
                    f"identity ball capped at {len(self._id_side.dist)} nodes "
                    f"(radius {self._id_side.radius})",
                    frontier=len(self._id_side.frontier),
                )
        return self._id_side.dist

    # -- bounds --------------------------------------------------------------

    def lower_bound(self, g) -> Fraction:
        """Best sound lower bound available without search."""
        cached = self._exact.get(g)
        if cached is not None:
            return Fraction(cached)
        best = Fraction(0)
        analytic = self.model.analytic_lower_bound(g)
        if analytic is not None and analytic > best:
            best = analytic
        if isinstance(g, BSNormalForm) and g.n > g.m >= 1:
            be = bs_lower_bound(g).value
            if be > best:
                best = be
        return best

    def word_length_upper(self, g) -> Optional[int]:
        """Trivial upper bound from a known spelling of g, where one exists."""
        if isinstance(g, BSNormalForm):
            return sum(e for e, _ in g.syllables) + len(g.syllables) + abs(g.tail)
        if isinstance(g, tuple) and self.model.exact_distance is not None:
            exact = self.model.exact_distance(g)
            if exact is not None:
                return exact
        return None

    # -- exact search --------------------------------------------------------

    def exact_distance(self, g, radius_cap: Optional[int] = None) -> Optional[int]:
        """Exact distance via memo, closed form, squeeze, or bidirectional
        search; None when the budget or cap is exhausted first."""
        cached = self._exact.get(g)
        if cached is not None:
            return cached
        closed = self.model.exact_distance(g)
        if closed is not None:
            self._exact[g] = closed
            return closed
        lower = self.lower_bound(g)
        upper = self.word_length_upper(g)
        if upper is not None and lower == upper:
            self._exact[g] = upper
            return upper
        d, reach = self._bidirectional(
            g, self.radius_cap if radius_cap is None else radius_cap
        )
        if d is not None:
            self._exact[g] = d
        elif reach + 1 > self.lower_bound(g):
            # A fully expanded reach of r proves d(g) > r; remember it.
            self._search_floor[g] = reach + 1
        return d

    def search_floor(self, g) -> int:
        return self._search_floor.get(g, 0)

    def _bidirectional(self, g, radius_cap: int) -> tuple[Optional[int], int]:
        """Returns (exact distance or None, certified search reach).

        ``reach`` is the sum of the fully expanded radii of the two sides;
        when the result is None, d(g) > reach is certain.
        """
        model = self.model
        id_side = self._id_side
        if g in id_side.dist:
            return id_side.dist[g], id_side.radius
        q_side = _SideBall({g: 0}, [g])
        best: Optional[int] = None
        while True:
            reach = id_side.radius + q_side.radius
            if best is not None and best <= reach + 1:
                return best, reach
            if reach >= radius_cap:
                return (best, reach) if best is not None else (None, reach)
            # Expand the cheaper side; the identity side is shared, so growing
            # it pays off across queries.
            grow_query = (
                len(q_side.frontier) <= len(id_side.frontier) or not id_side.frontier
            )
            if grow_query and len(q_side.dist) < self.query_nodes and q_side.frontier:
                nxt = []
                r = q_side.radius + 1
                for h in q_side.frontier:
                    for i in self._letters:
                        h2 = model.apply_letter(h, i)
                        if h2 not in q_side.dist:
                            q_side.dist[h2] = r
                            nxt.append(h2)
                            d_id = id_side.dist.get(h2)
                            if d_id is not None:
                                total = d_id + r
                                if best is None or total < best:
                                    best = total
                q_side.frontier = nxt
                q_side.radius = r
                continue
            if (
                len(id_side.dist) < self.identity_ball_nodes
                and id_side.frontier
                and self._grow_identity()
            ):
                r = id_side.radius
                for h in id_side.frontier:
                    d_q = q_side.dist.get(h)
                    if d_q is not None:
                        total = d_q + r
                        if best is None or total < best:
                            best = total
                continue
            # Both sides are capped by node budgets; only fully expanded
            # layers certify anything.
            return best, reach


def distance(
    model,
    g,
    radius_cap: int = 24,
    *,
    cache: Optional[MetricCache] = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> DistanceBound:
    """Exact distance by meet-in-the-middle search when it completes within
    the radius cap; otherwise a sound lower bound (the certified reach + 1,
    which is radius_cap + 1 when the caps, not the budgets, bind)."""
    cache = cache or MetricCache(model, query_nodes=node_budget)
    d = cache.exact_distance(g, radius_cap=radius_cap)
    if d is not None:
        return DistanceBound("exact", Fraction(d), "bidirectional")
    floor = max(Fraction(cache.search_floor(g)), cache.lower_bound(g))
    return DistanceBound("lower", floor, "bidirectional")
