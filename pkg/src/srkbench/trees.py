"""Colored rooted trees behind the additive-noise order conditions.

The tree set T_add over colors {0, 1, .., m} is built recursively: the
empty tree and the stochastic leaves of colors 1..m belong to it, and any
multiset of members attached to a root of color 0 belongs to it.  For
additive noise, stochastic nodes never carry subtrees.  Expansions of a
test functional range over f-rooted trees, whose root is a distinguished
marker holding a multiset of T_add members.

    order rho:    stochastic node 1/2, deterministic node 1 plus children,
                  f-root contributes 0
    density:      product over children with a 1/r! factor for each group
                  of r equal children

Trees are kept in a canonical form (children sorted under a fixed total
order), so structural equality is isomorphism with colors.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

EMPTY_COLOR = -2
F_COLOR = -1
DET_COLOR = 0


@dataclass(frozen=True)
class ColoredTree:
    """A canonical colored rooted tree.

    ``color`` is EMPTY_COLOR, F_COLOR, 0 for deterministic nodes, or a
    stochastic color in 1..m.  Children are sorted at construction.
    """

    color: int
    children: tuple = field(default=())

    def __post_init__(self):
        children = tuple(self.children)
        if self.color == EMPTY_COLOR and children:
            raise ValueError("the empty tree has no children")
        if self.color > DET_COLOR and children:
            raise ValueError("stochastic nodes are leaves in the additive-noise tree set")
        for child in children:
            if child.color in (EMPTY_COLOR, F_COLOR):
                raise ValueError("children must be nonempty members of the tree set")
        object.__setattr__(self, "children", tuple(sorted(children, key=sort_key)))


def sort_key(t: ColoredTree):
    return (t.color, len(t.children), tuple(sort_key(ch) for ch in t.children))


EMPTY = ColoredTree(EMPTY_COLOR)


def leaf(color: int) -> ColoredTree:
    """A stochastic leaf of the given color (1..m), or the bare
    deterministic node for color 0."""
    if color < 0:
        raise ValueError("leaf color must be nonnegative")
    return ColoredTree(color)


def det(children=()) -> ColoredTree:
    """A deterministic node holding a multiset of subtrees."""
    return ColoredTree(DET_COLOR, tuple(children))


def f_root(children=()) -> ColoredTree:
    """An f-rooted tree holding a multiset of subtrees."""
    return ColoredTree(F_COLOR, tuple(children))


def rho(t: ColoredTree) -> Fraction:
    """Tree order: 1/2 per stochastic node, 1 per deterministic node."""
    if t.color == EMPTY_COLOR:
        return Fraction(0)
    if t.color > DET_COLOR:
        return Fraction(1, 2)
    base = Fraction(0) if t.color == F_COLOR else Fraction(1)
    return base + sum((rho(ch) for ch in t.children), Fraction(0))


def density(t: ColoredTree) -> Fraction:
    """Combinatorial weight: child product with repetition factorials."""
    if t.color == EMPTY_COLOR or not t.children:
        return Fraction(1)
    out = Fraction(1)
    for child, count in Counter(t.children).items():
        out *= density(child) ** count / math.factorial(count)
    return out


def format_tree(t: ColoredTree) -> str:
    """Nested-bracket rendering: leaves as *c, nodes as [..]_c, f-roots as
    [..]_f, the empty tree as {}."""
    if t.color == EMPTY_COLOR:
        return "{}"
    if not t.children and t.color != F_COLOR:
        return f"*{t.color}"
    inner = ",".join(format_tree(ch) for ch in t.children)
    suffix = "f" if t.color == F_COLOR else str(t.color)
    return f"[{inner}]_{suffix}"


def _half_units(order) -> int:
    q = Fraction(order)
    if q < 0:
        raise ValueError("order bound must be nonnegative")
    return math.floor(2 * q)


def _trees_by_du(max_du: int, m: int):
    """Nonempty trees grouped by doubled order du = 2 rho, for du <= max_du."""
    by_du: dict[int, list[ColoredTree]] = {}
    if max_du >= 1:
        by_du[1] = [leaf(l) for l in range(1, m + 1)]
    for du in range(2, max_du + 1):
        pool = [(t, w) for w in sorted(by_du) for t in by_du[w]]
        trees = [det(ms) for ms in _child_multisets(pool, du - 2)]
        by_du[du] = trees
    return by_du


def _child_multisets(pool, total: int):
    """All multisets over (tree, weight) pool with weights summing to total.

    The pool must be sorted by ascending weight; selection is by
    nondecreasing pool index, so each multiset appears exactly once.
    """
    out = []
    acc = []

    def rec(start, remaining):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for i in range(start, len(pool)):
            t, w = pool[i]
            if w > remaining:
                break
            acc.append(t)
            rec(i, remaining - w)
            acc.pop()

    rec(0, total)
    return out


def enumerate_tadd(max_order, m: int):
    """All trees of the additive-noise set with rho <= max_order.

    Includes the empty tree; output is duplicate-free and sorted by
    (order, canonical key).
    """
    if m < 0:
        raise ValueError("noise dimension must be nonnegative")
    max_du = _half_units(max_order)
    by_du = _trees_by_du(max_du, m)
    trees = [EMPTY] + [t for du in sorted(by_du) for t in by_du[du]]
    return sorted(trees, key=lambda t: (rho(t), sort_key(t)))


def stochastic_color_counts(t: ColoredTree) -> Counter:
    """Multiplicity of each stochastic color among the nodes of ``t``."""
    counts = Counter()
    if t.color > DET_COLOR:
        counts[t.color] += 1
    for child in t.children:
        counts.update(stochastic_color_counts(child))
    return counts


def _is_connected_by_colors(children) -> bool:
    """Whether the children cannot be split into two groups with disjoint
    stochastic color sets.

    Children sharing a color are linked; the split exists exactly when the
    resulting graph is disconnected (children without stochastic nodes are
    isolated vertices).
    """
    k = len(children)
    if k <= 1:
        return True
    colors = [frozenset(stochastic_color_counts(ch)) for ch in children]
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(k):
            if j not in seen and colors[i] & colors[j]:
                seen.add(j)
                frontier.append(j)
    return len(seen) == k


def relevant_f_trees(p: int, m: int):
    """The f-rooted trees of integer order p that generate order conditions.

    These are the trees with an even number of stochastic nodes of every
    color that cannot be decomposed into two f-trees with disjoint
    stochastic colors (trees failing either test contribute nothing new to
    the local error comparison).
    """
    if p not in (1, 2, 3):
        raise ValueError("order p must be 1, 2 or 3")
    if m < 1:
        raise ValueError("noise dimension must be at least 1")
    by_du = _trees_by_du(2 * p, m)
    pool = [(t, w) for w in sorted(by_du) for t in by_du[w]]
    out = []
    for ms in _child_multisets(pool, 2 * p):
        u = f_root(ms)
        counts = stochastic_color_counts(u)
        if any(c % 2 for c in counts.values()):
            continue
        if not _is_connected_by_colors(u.children):
            continue
        out.append(u)
    return sorted(out, key=sort_key)


def shape_family(t: ColoredTree) -> ColoredTree:
    """Collapse all stochastic colors to 1, giving the color-blind shape."""
    color = 1 if t.color > DET_COLOR else t.color
    return ColoredTree(color, tuple(shape_family(ch) for ch in t.children))


def shape_families(ts):
    """Group trees by color-blind shape."""
    groups: dict[ColoredTree, list[ColoredTree]] = {}
    for t in ts:
        groups.setdefault(shape_family(t), []).append(t)
    return groups


@dataclass(frozen=True)
class RelevantFamily:
    """Catalogue entry for one relevant-tree shape.

    ``mean_coeff_equal`` is the coefficient of h^p in the expectation of
    the exact-solution elementary weight when all color variables
    coincide; ``mean_coeff_distinct`` applies when two distinct colors are
    involved (None for single-variable shapes).  ``condition`` is the
    stochastic order condition the shape induces on scheme coefficients
    (None when the equality holds by the moment assumptions alone).
    """

    shape: ColoredTree
    order: int
    mean_coeff_equal: Fraction
    mean_coeff_distinct: Fraction | None
    condition: int | None


def _F(a, b=None):
    return Fraction(a, b) if b else Fraction(a)


RELEVANT_FAMILIES: tuple[RelevantFamily, ...] = (
    # order 1
    RelevantFamily(f_root([leaf(1)] * 2), 1, _F(1), None, None),
    RelevantFamily(f_root([det()]), 1, _F(1), None, 1),
    # order 2
    RelevantFamily(f_root([leaf(1)] * 4), 2, _F(3), None, None),
    RelevantFamily(f_root([det([det()])]), 2, _F(1, 2), None, 2),
    RelevantFamily(f_root([det([leaf(1)] * 2)]), 2, _F(1, 2), None, 3),
    RelevantFamily(f_root([leaf(1), det([leaf(1)])]), 2, _F(1, 2), None, 4),
    # order 3
    RelevantFamily(f_root([leaf(1)] * 6), 3, _F(15), None, None),
    RelevantFamily(f_root([det([det([det()])])]), 3, _F(1, 6), None, 5),
    RelevantFamily(f_root([det([det(), det()])]), 3, _F(1, 3), None, 6),
    RelevantFamily(f_root([det([det([leaf(1)] * 2)])]), 3, _F(1, 6), None, 7),
    RelevantFamily(f_root([det([leaf(1), det([leaf(1)])])]), 3, _F(1, 6), None, 8),
    RelevantFamily(f_root([leaf(1), det([det([leaf(1)])])]), 3, _F(1, 6), None, 9),
    RelevantFamily(f_root([det([det(), leaf(1), leaf(1)])]), 3, _F(1, 3), None, 10),
    RelevantFamily(f_root([leaf(1), det([det(), leaf(1)])]), 3, _F(1, 3), None, 11),
    RelevantFamily(f_root([det([leaf(1)] * 4)]), 3, _F(1), _F(1, 3), 12),
    RelevantFamily(f_root([leaf(1), det([leaf(1)] * 3)]), 3, _F(1), _F(1, 3), 13),
    RelevantFamily(f_root([leaf(1), leaf(1), det([leaf(1)] * 2)]), 3, _F(7, 6), _F(1, 3), 14),
    RelevantFamily(f_root([leaf(1)] * 3 + [det([leaf(1)])]), 3, _F(3, 2), None, 4),
    RelevantFamily(f_root([det([leaf(1)]), det([leaf(1)])]), 3, _F(1, 3), None, 15),
)


def brute_force_count(max_order, m: int) -> int:
    """Size of the enumerated tree set via fixed-point closure.

    Independent of the weight-partition generator above: starting from the
    leaves, repeatedly attach every combination of known trees (with
    repetition) to a deterministic root, keeping those within the order
    bound, until no new tree appears.
    """
    bound = Fraction(max_order)
    known = {EMPTY}
    if bound >= Fraction(1, 2):
        known.update(leaf(l) for l in range(1, m + 1))
    max_children = max(0, math.floor((bound - 1) * 2))
    while True:
        # children of an admissible root each have order <= bound - 1
        candidates = [t for t in known
                      if t is not EMPTY and rho(t) <= bound - 1]
        new = set()
        if bound >= 1:
            new.add(det())
        for k in range(1, max_children + 1):
            for combo in itertools.combinations_with_replacement(candidates, k):
                t = det(combo)
                if rho(t) <= bound:
                    new.add(t)
        if new <= known:
            return len(known | new)
        known |= new
