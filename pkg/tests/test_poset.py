"""Order-core tests: construction, closures, directed sets, ideals,
products, way-below, and corpus generation, against naive oracles."""
import pytest
from hypothesis import given, settings, strategies as st

from scottlab.errors import (
    BadPartitionError,
    CycleError,
    DuplicateLabelError,
    EmptySetError,
    NotDirectedError,
    SizeTooLargeError,
    UnknownLabelError,
)
from scottlab.poset import (
    FinPoset,
    antichain,
    bits,
    build_poset,
    canonical_key,
    chain,
    cofinal_part,
    compact_elements,
    corpus,
    corpus_exhaustive,
    diamond,
    down_sets,
    enumerate_ideals,
    ideal_masks,
    mask_of,
    product,
    random_poset,
    upper_sets,
    way_below,
)


# --- independent oracles ----------------------------------------------------

def naive_closure(labels, pairs):
    """Reflexive-transitive closure on pair sets, by repeated expansion."""
    rel = {(a, a) for a in labels} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return rel


def naive_directed_lower_sets(P):
    """All ideals by brute force over all subsets."""
    out = []
    for mask in range(1, 1 << P.n):
        members = [i for i in range(P.n) if mask >> i & 1]
        lower = True
        for i in members:
            for j in range(P.n):
                if P.le(j, i) and not mask >> j & 1:
                    lower = False
        directed = all(
            any(P.le(a, c) and P.le(b, c) for c in members)
            for a in members for b in members)
        if lower and directed:
            out.append(mask)
    return sorted(out)


def naive_way_below(P, a_mask, b_mask):
    """Quantify over every directed subset, literally."""
    up_a = P.up_closure(a_mask)
    up_b = P.up_closure(b_mask)
    for d in range(1, 1 << P.n):
        members = [i for i in range(P.n) if d >> i & 1]
        if not all(any(P.le(x, c) and P.le(y, c) for c in members)
                   for x in members for y in members):
            continue
        sup = max(members, key=lambda i: sum(P.le(j, i) for j in members))
        if not all(P.le(j, sup) for j in members):
            continue  # directed finite sets have a max; anything else is not directed
        if up_b >> sup & 1 and d & up_a == 0:
            return False
    return True


# --- construction -----------------------------------------------------------

def test_build_two_chain():
    P = build_poset(["a", "b"], [("a", "b")])
    assert P.le(0, 1) and not P.le(1, 0)


def test_build_singleton():
    P = build_poset(["a"], [])
    assert P.n == 1 and P.le(0, 0)


def test_build_transitive_closure_matches_naive():
    labels = ["a", "b", "c"]
    pairs = [("a", "b"), ("b", "c")]
    P = build_poset(labels, pairs)
    rel = naive_closure(labels, pairs)
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            assert P.le(i, j) == ((a, b) in rel)
    assert P.le(0, 2)  # derived by closure


def test_build_rejects_duplicates_and_unknowns():
    with pytest.raises(DuplicateLabelError):
        build_poset(["a", "a"], [])
    with pytest.raises(UnknownLabelError):
        build_poset(["a"], [("a", "z")])


def test_build_reports_cycle_witness():
    with pytest.raises(CycleError) as err:
        build_poset(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
    assert len(err.value.cycle) == 2
    assert set(err.value.cycle) <= {"a", "b", "c"}


# --- closures ---------------------------------------------------------------

def test_up_closure_three_chain():
    P = chain(3)
    assert P.up_closure(0b010) == 0b110
    assert P.down_closure(0b010) == 0b011


def test_closure_of_empty_is_empty():
    assert chain(3).up_closure(0) == 0


def test_up_closure_antichain_is_identity():
    P = antichain(2)
    assert P.up_closure(0b01) == 0b01


@given(st.integers(2, 6), st.data())
@settings(max_examples=60, deadline=None)
def test_closure_laws_random(n, data):
    import random
    P = random_poset(n, random.Random(data.draw(st.integers(0, 10_000))))
    a = data.draw(st.integers(0, P.full_mask))
    up = P.up_closure(a)
    down = P.down_closure(a)
    assert P.up_closure(up) == up
    assert up & a == a and down & a == a
    assert (up & down) & a == a  # the hull contains A


# --- directed sets ----------------------------------------------------------

def test_is_directed_cases():
    assert chain(3).is_directed(0b101)  # {a, c} in a chain
    assert not antichain(2).is_directed(0b11)
    assert not chain(3).is_directed(0)


def test_directed_sup_examples():
    assert chain(3).directed_sup(0b011) == 1
    D = diamond()
    assert D.directed_sup(0b0011) == 1  # {bot, x} -> x
    with pytest.raises(NotDirectedError):
        antichain(2).directed_sup(0b11)


def test_every_directed_subset_has_its_max_as_sup():
    for P in corpus_exhaustive(4):
        for mask in range(1, 1 << P.n):
            if P.is_directed(mask):
                s = P.directed_sup(mask)
                assert mask >> s & 1
                assert all(P.le(i, s) for i in bits(mask))


# --- ideals -----------------------------------------------------------------

def test_ideal_counts():
    assert len(enumerate_ideals(chain(3))) == 3
    assert len(enumerate_ideals(antichain(2))) == 2
    assert len(enumerate_ideals(build_poset(["a"], []))) == 1


def test_ideals_match_brute_force_up_to_five():
    for size in range(1, 6):
        for P in corpus_exhaustive(size):
            assert ideal_masks(P) and sorted(ideal_masks(P)) == naive_directed_lower_sets(P)
            assert all(d.principal for d in enumerate_ideals(P))


def test_ideal_count_multiplicative_on_products():
    for size_p in range(1, 4):
        for size_q in range(1, 4):
            for P in corpus_exhaustive(size_p)[:3]:
                for Q in corpus_exhaustive(size_q)[:3]:
                    R = product(P, Q)
                    assert len(enumerate_ideals(R)) == (
                        len(enumerate_ideals(P)) * len(enumerate_ideals(Q)))


# --- products ---------------------------------------------------------------

def test_product_of_chains_is_diamond():
    R = product(chain(2), chain(2))
    assert canonical_key(R) == canonical_key(diamond())


def test_product_with_singleton_is_isomorphic():
    P = diamond()
    R = product(P, build_poset(["u"], []))
    assert canonical_key(R) == canonical_key(P)


def test_product_of_antichains():
    R = product(antichain(2), antichain(2))
    assert canonical_key(R) == canonical_key(antichain(4))


def test_product_componentwise_order_oracle():
    P, Q = chain(2), chain(3)
    R = product(P, Q)
    for i in range(P.n):
        for j in range(Q.n):
            for k in range(P.n):
                for l in range(Q.n):
                    assert R.le(i * Q.n + j, k * Q.n + l) == (P.le(i, k) and Q.le(j, l))


# --- cofinal parts ----------------------------------------------------------

def test_cofinal_part_four_chain():
    P = chain(4)
    assert cofinal_part(P, 0b1111, [0b0101, 0b1010]) == 1


def test_cofinal_part_singleton():
    P = chain(2)
    assert cofinal_part(P, 0b01, [0b01]) == 0


def test_cofinal_part_diamond():
    D = diamond()
    # D = {bot, x, top}, parts {bot}, {x, top}
    assert cofinal_part(D, 0b1011, [0b0001, 0b1010]) == 1


def test_cofinal_part_postcondition():
    for P in corpus_exhaustive(4):
        for mask in range(1, 1 << P.n):
            if not P.is_directed(mask) or mask.bit_count() < 2:
                continue
            lo = mask & -mask
            parts = [lo, mask & ~lo]
            m = cofinal_part(P, mask, parts)
            assert P.down_closure(parts[m]) & mask == mask
            assert P.down_closure(parts[m]) == P.down_closure(mask)


def test_cofinal_part_errors():
    P = chain(3)
    with pytest.raises(BadPartitionError):
        cofinal_part(P, 0b011, [])
    with pytest.raises(BadPartitionError):
        cofinal_part(P, 0b011, [0b001])  # union is not D
    with pytest.raises(BadPartitionError):
        cofinal_part(P, 0b011, [0b011, 0])


# --- way-below and compact elements -----------------------------------------

def test_way_below_reflexive_points():
    for P in (chain(3), diamond(), antichain(3)):
        for x in range(P.n):
            assert way_below(P, 1 << x, 1 << x)


def test_way_below_antichain_counterexample():
    assert not way_below(antichain(2), 0b01, 0b10)


def test_way_below_rejects_empty():
    with pytest.raises(EmptySetError):
        way_below(chain(2), 0, 0b01)
    with pytest.raises(EmptySetError):
        way_below(chain(2), 0b01, 0)


def test_way_below_matches_naive_and_shortcut_up_to_five():
    for size in range(1, 6):
        for P in corpus_exhaustive(size):
            for x in range(P.n):
                for y in range(P.n):
                    got = way_below(P, 1 << x, 1 << y)
                    assert got == naive_way_below(P, 1 << x, 1 << y)
                    assert got == (P.up[y] & ~P.up[x] == 0)


def test_compact_elements_is_everything():
    for P in corpus_exhaustive(4):
        assert compact_elements(P) == P.full_mask


# --- corpus -----------------------------------------------------------------

def test_exhaustive_counts():
    expected = {1: 1, 2: 2, 3: 5, 4: 16, 5: 63, 6: 318}
    for size, count in expected.items():
        assert len(corpus_exhaustive(size)) == count


@pytest.mark.slow
def test_exhaustive_count_seven():
    assert len(corpus_exhaustive(7)) == 2045


def test_exhaustive_representatives_pairwise_nonisomorphic():
    keys = [canonical_key(P) for P in corpus_exhaustive(4)]
    assert len(keys) == len(set(keys))


def test_exhaustive_cap():
    with pytest.raises(SizeTooLargeError):
        corpus(8, "exhaustive")


def test_random_corpus_reproducible():
    a = corpus(5, "random", seed=11, count=5)
    b = corpus(5, "random", seed=11, count=5)
    assert [P.up for P in a] == [P.up for P in b]
    assert all(P.n == 5 for P in a)


@given(st.integers(1, 6), st.integers(0, 99))
@settings(max_examples=40, deadline=None)
def test_random_posets_are_valid(n, seed):
    import random
    P = random_poset(n, random.Random(seed))
    # construction validates reflexivity, antisymmetry, transitivity
    assert P.n == n
    assert sorted(upper_sets(P)) == sorted(P.full_mask & ~d for d in down_sets(P))
