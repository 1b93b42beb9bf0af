"""Colored rooted trees: order and density recursions, enumeration against a
brute-force closure, and the relevant-tree catalogue."""

import itertools
from fractions import Fraction

import pytest

from srkbench import tableau
from srkbench.trees import (EMPTY, RELEVANT_FAMILIES, ColoredTree,
                            brute_force_count, density, det, enumerate_tadd,
                            f_root, format_tree, leaf, relevant_f_trees, rho,
                            shape_families, shape_family,
                            stochastic_color_counts)

F = Fraction


def test_rho_examples():
    assert rho(EMPTY) == 0
    assert rho(leaf(1)) == F(1, 2)
    assert rho(det()) == 1
    assert rho(f_root([leaf(1), leaf(1)])) == 1
    assert rho(f_root([det([leaf(1)]), det([leaf(1)])])) == 3
    assert rho(det([det([det()])])) == 3


def test_rho_additive_over_deterministic_nodes():
    for t in enumerate_tadd(3, 2):
        if t.color == 0 and t.children:
            assert rho(t) == 1 + sum(rho(c) for c in t.children)


def test_density_examples():
    assert density(EMPTY) == 1
    assert density(leaf(2)) == 1
    assert density(det()) == 1
    assert density(det([det(), det()])) == F(1, 2)
    assert density(det([leaf(1), leaf(2)])) == 1
    assert density(f_root([leaf(1)] * 4)) == F(1, 24)
    # nested repetition: two equal children, each with its own density 1/2
    inner = det([det(), det()])
    assert density(det([inner, inner])) == F(1, 2) * F(1, 2) ** 2


def test_canonical_children_order():
    a = det([leaf(2), leaf(1), det()])
    b = det([det(), leaf(1), leaf(2)])
    assert a == b
    assert hash(a) == hash(b)


def test_stochastic_nodes_cannot_hold_children():
    with pytest.raises(ValueError):
        ColoredTree(1, (leaf(1),))
    with pytest.raises(ValueError):
        det([EMPTY])
    with pytest.raises(ValueError):
        det([f_root([leaf(1)])])


def test_format_tree():
    assert format_tree(EMPTY) == "{}"
    assert format_tree(leaf(2)) == "*2"
    assert format_tree(det()) == "*0"
    # children sort deterministic-first under the canonical key
    assert format_tree(f_root([leaf(1), det([leaf(1)])])) == "[[*1]_0,*1]_f"


def test_enumerate_small_cases():
    assert enumerate_tadd(1, 1) == [EMPTY, leaf(1), det()]
    assert enumerate_tadd(F(1, 2), 2) == [EMPTY, leaf(1), leaf(2)]
    assert enumerate_tadd(0, 3) == [EMPTY]


def test_enumerate_no_duplicates():
    for m in (1, 2):
        ts = enumerate_tadd(3, m)
        assert len(set(ts)) == len(ts)
        assert all(rho(t) <= 3 for t in ts)


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("bound", [1, F(3, 2), 2, F(5, 2), 3])
def test_enumeration_matches_brute_force(m, bound):
    assert len(enumerate_tadd(bound, m)) == brute_force_count(bound, m)


def test_enumeration_counts_monotone():
    counts_order = [len(enumerate_tadd(q, 2)) for q in (1, 2, 3)]
    assert counts_order == sorted(counts_order)
    counts_m = [len(enumerate_tadd(3, m)) for m in (1, 2, 3)]
    assert counts_m == sorted(counts_m)


def is_decomposable(u):
    """Subset-enumeration oracle for the splitting test.

    True when some nonempty proper subset of the children has stochastic
    colors disjoint from the rest.
    """
    kids = u.children
    if len(kids) <= 1:
        return False
    colors = [set(stochastic_color_counts(k)) for k in kids]
    idx = range(len(kids))
    for r in range(1, len(kids)):
        for subset in itertools.combinations(idx, r):
            inside = set().union(*(colors[i] for i in subset))
            outside = set().union(*(colors[i] for i in idx
                                    if i not in subset))
            if not inside & outside:
                return True
    return False


@pytest.mark.parametrize("p,m,n_families", [
    (1, 1, 2), (2, 1, 4), (3, 1, 13), (1, 2, 2), (2, 2, 4), (3, 2, 13),
])
def test_relevant_tree_family_counts(p, m, n_families):
    ts = relevant_f_trees(p, m)
    assert len(shape_families(ts)) == n_families


def test_relevant_trees_properties():
    for p, m in [(1, 2), (2, 2), (3, 2)]:
        ts = relevant_f_trees(p, m)
        for u in ts:
            assert rho(u) == p
            counts = stochastic_color_counts(u)
            assert all(v % 2 == 0 for v in counts.values())
            assert not is_decomposable(u)


def all_f_trees_of_order(p, m):
    """Independent generator of f-rooted trees of order exactly p.

    Groups candidate children by doubled order, iterates over the integer
    partitions of 2p, and takes combinations with replacement inside each
    group; the production code instead recurses over a weight-sorted pool.
    """
    by_weight = {}
    for t in enumerate_tadd(p, m):
        if t is EMPTY:
            continue
        by_weight.setdefault(int(2 * rho(t)), []).append(t)

    def partitions(total, max_part):
        if total == 0:
            yield ()
            return
        for part in range(min(total, max_part), 0, -1):
            for rest in partitions(total - part, part):
                yield (part,) + rest

    for partition in partitions(2 * p, 2 * p):
        counts = {w: partition.count(w) for w in set(partition)}
        if any(w not in by_weight for w in counts):
            continue
        pools = [itertools.combinations_with_replacement(by_weight[w], k)
                 for w, k in sorted(counts.items())]
        for groups in itertools.product(*pools):
            yield f_root([t for group in groups for t in group])


def test_relevant_trees_against_partition_oracle():
    # regenerate the set independently: filter ALL f-rooted trees of the
    # right order by evenness and the subset-enumeration splitting oracle
    for p, m in [(1, 1), (2, 1), (3, 1), (2, 2), (3, 2)]:
        found = set()
        for u in all_f_trees_of_order(p, m):
            assert rho(u) == p
            if any(v % 2 for v in stochastic_color_counts(u).values()):
                continue
            if is_decomposable(u):
                continue
            found.add(u)
        assert found == set(relevant_f_trees(p, m)), (p, m)


def test_relevant_rejects_bad_arguments():
    with pytest.raises(ValueError):
        relevant_f_trees(4, 1)
    with pytest.raises(ValueError):
        relevant_f_trees(2, 0)


def test_m1_relevant_trees_are_one_per_family():
    for p in (1, 2, 3):
        ts = relevant_f_trees(p, 1)
        fams = shape_families(ts)
        assert len(ts) == len(fams)


def test_shape_family_idempotent_and_color_blind():
    u = f_root([leaf(2), leaf(2), det([leaf(1), leaf(1)])])
    fam = shape_family(u)
    assert shape_family(fam) == fam
    v = f_root([leaf(1), leaf(1), det([leaf(2), leaf(2)])])
    assert shape_family(v) == fam


def test_catalogue_matches_enumeration():
    for p in (1, 2, 3):
        expected = {f.shape for f in RELEVANT_FAMILIES if f.order == p}
        for m in (1, 2):
            got = set(shape_families(relevant_f_trees(p, m)))
            assert got == expected, (p, m)


def test_catalogue_counts_by_order():
    by_order = {p: [f for f in RELEVANT_FAMILIES if f.order == p]
                for p in (1, 2, 3)}
    assert [len(by_order[p]) for p in (1, 2, 3)] == [2, 4, 13]


def test_catalogue_expectations_pin_condition_rhs():
    """The scheme-side expectation must equal the catalogued solution-side
    coefficient, which for most shapes is literally the condition RHS."""
    rhs = tableau.STOCHASTIC_RHS
    for fam in RELEVANT_FAMILIES:
        if fam.condition is None:
            continue
        if fam.condition in range(1, 12):
            if fam.order == 3 and fam.condition == 4:
                # [j,j,j,[j]_0]_f: expectation 3h^3/2 against 3 alpha.b1
                assert fam.mean_coeff_equal == 3 * rhs[4]
            else:
                assert fam.mean_coeff_equal == rhs[fam.condition], fam
        elif fam.condition in (12, 13, 14):
            # distinct-color case carries the condition; the equal-color
            # case follows from it (and condition 3 for shape 14)
            assert fam.mean_coeff_distinct == rhs[fam.condition], fam
        elif fam.condition == 15:
            # (alpha.b1)^2 + (alpha.b2)^2 = 1/3 with alpha.b1 = 1/2 fixed
            # by condition 4 leaves (alpha.b2)^2 = 1/12
            assert fam.mean_coeff_equal == F(1, 4) + rhs[15]


def test_relevant_trees_all_orders_integral():
    # half-order f-trees exist but never pass the evenness filter
    for u in relevant_f_trees(3, 2):
        assert rho(u).denominator == 1
