"""Topo-engine tests: intrinsic topologies, irreducibility, sobriety,
well-filteredness, compactness classes, Smyth power space, Rudin searches,
and product comparison."""
import pytest

from scottlab.errors import (
    EmptyFamilyError,
    EmptySetError,
    HypothesisFailedError,
    NotSaturatedError,
    NotT0Error,
)
from scottlab.poset import antichain, bits, build_poset, chain, corpus_exhaustive, diamond
from scottlab.topology import (
    FinSpace,
    classify_compactness,
    classify_space,
    compact_saturated,
    compare_product_topologies,
    derive_topology,
    irreducible_closed_sets,
    is_coherent,
    is_compact_subset,
    is_irreducible,
    is_sober,
    is_well_filtered,
    kfamily_sup,
    rudin_classical,
    rudin_minimal,
    smyth_order_poset,
    smyth_power_space,
    specialization_order,
)

SIERPINSKI = derive_topology(chain(2), "scott")
DISCRETE2 = derive_topology(antichain(2), "scott")
DIAMOND_SCOTT = derive_topology(diamond(), "scott")


# --- deriving topologies ------------------------------------------------------

def test_sierpinski_opens():
    assert SIERPINSKI.opens == (0, 0b10, 0b11)


def test_lower_topology_of_two_chain():
    X = derive_topology(chain(2), "lower")
    assert X.opens == (0, 0b01, 0b11)


def test_singleton_space():
    X = derive_topology(build_poset(["p"], []), "scott")
    assert X.opens == (0, 1)


def test_upper_topology_specialization():
    for P in corpus_exhaustive(4):
        X = derive_topology(P, "upper")
        assert specialization_order(X).up == P.up


def test_lawson_topology_is_discrete():
    for P in corpus_exhaustive(4)[:8]:
        X = derive_topology(P, "lawson")
        assert len(X.opens) == 1 << P.n


def test_scott_equals_alexandroff_on_finite():
    for P in corpus_exhaustive(4):
        assert derive_topology(P, "scott").opens == derive_topology(P, "alexandroff").opens


# --- specialization ----------------------------------------------------------

def test_specialization_of_sierpinski_is_two_chain():
    assert specialization_order(SIERPINSKI).up == chain(2).up


def test_specialization_of_discrete_is_antichain():
    assert specialization_order(DISCRETE2).up == antichain(2).up


def test_alexandroff_roundtrip():
    for size in range(1, 6):
        for P in corpus_exhaustive(size):
            X = derive_topology(P, "alexandroff")
            Q = specialization_order(X)
            assert Q.up == P.up and Q.labels == P.labels


def test_non_t0_space_rejected_with_witness():
    with pytest.raises(NotT0Error) as err:
        FinSpace(("a", "b"), (0, 0b11))
    assert set(err.value.pair) == {"a", "b"}


# --- irreducibility and sobriety ----------------------------------------------

def test_directed_sets_are_irreducible():
    for P in corpus_exhaustive(4):
        X = derive_topology(P, "scott")
        for mask in range(1, 1 << P.n):
            if P.is_directed(mask):
                assert is_irreducible(X, mask)


def test_two_point_antichain_not_irreducible():
    assert not is_irreducible(DISCRETE2, 0b11)


def test_singleton_irreducible_and_empty_not():
    assert is_irreducible(SIERPINSKI, 0b01)
    assert not is_irreducible(SIERPINSKI, 0)


def test_irreducible_closed_sets_of_sierpinski():
    assert sorted(irreducible_closed_sets(SIERPINSKI)) == [0b01, 0b11]


def test_irreducible_closed_sets_of_discrete():
    assert sorted(irreducible_closed_sets(DISCRETE2)) == [0b01, 0b10]


def test_irreducible_closed_sets_of_diamond_are_principal_downsets():
    D = diamond()
    assert sorted(irreducible_closed_sets(DIAMOND_SCOTT)) == sorted(D.down)


def test_irreducible_closed_are_exactly_point_closures():
    for size in range(1, 6):
        for P in corpus_exhaustive(size):
            X = derive_topology(P, "scott")
            assert sorted(irreducible_closed_sets(X)) == sorted(set(P.down))


def test_scott_spaces_sober_up_to_five():
    for size in range(1, 6):
        for P in corpus_exhaustive(size):
            assert is_sober(derive_topology(P, "scott")).holds


def test_image_of_irreducible_is_irreducible():
    import itertools
    for P in corpus_exhaustive(3):
        for Q in corpus_exhaustive(3):
            X = derive_topology(P, "scott")
            Y = derive_topology(Q, "scott")
            for f in itertools.product(range(Q.n), repeat=P.n):
                if not all(Q.le(f[a], f[b]) for a in range(P.n) for b in bits(P.up[a])):
                    continue  # not monotone
                for mask in range(1, 1 << P.n):
                    if not is_irreducible(X, mask):
                        continue
                    img = 0
                    for i in bits(mask):
                        img |= 1 << f[i]
                    assert is_irreducible(Y, img)


# --- well-filteredness, coherence ----------------------------------------------

def test_well_filtered_on_corpus():
    for size in range(1, 6):
        for P in corpus_exhaustive(size):
            assert is_well_filtered(derive_topology(P, "scott")).holds


def test_filtered_families_keep_compact_intersections():
    # intersections of filtered subfamilies stay nonempty compact saturated
    for P in corpus_exhaustive(4):
        X = derive_topology(P, "scott")
        fam = compact_saturated(X)
        for sub in range(1, 1 << min(len(fam), 10)):
            members = [fam[i] for i in bits(sub)]
            filtered = all(any(c & ~(a & b) == 0 for c in members)
                           for a in members for b in members)
            if filtered:
                inter = X.full_mask
                for m in members:
                    inter &= m
                assert inter in fam


def test_coherent_on_corpus():
    for P in corpus_exhaustive(4):
        assert is_coherent(derive_topology(P, "scott"))
    assert is_coherent(SIERPINSKI)
    assert is_coherent(derive_topology(build_poset(["p"], []), "scott"))


def test_down_closure_of_any_subset_is_scott_closed():
    # every subset of a finite space is compact; its down-set must be closed
    for P in corpus_exhaustive(4):
        X = derive_topology(P, "scott")
        for mask in range(1, 1 << P.n):
            assert X.is_closed(P.down_closure(mask))


# --- compact saturated family, classification -----------------------------------

def test_compact_saturated_files():
    assert sorted(compact_saturated(SIERPINSKI)) == [0b10, 0b11]
    assert sorted(compact_saturated(DISCRETE2)) == [0b01, 0b10, 0b11]
    X1 = derive_topology(build_poset(["p"], []), "scott")
    assert compact_saturated(X1) == [1]


def test_classify_compactness_principal_filters():
    for P in corpus_exhaustive(4)[:6]:
        X = derive_topology(P, "scott")
        for x in range(P.n):
            flags = classify_compactness(X, P.up[x])
            assert flags["supercompact"] and flags["strongly_compact"]


def test_classify_compactness_discrete_pair():
    flags = classify_compactness(DISCRETE2, 0b11)
    assert not flags["supercompact"]
    assert flags["strongly_compact"]


def test_classify_compactness_full_sierpinski():
    assert classify_compactness(SIERPINSKI, 0b11)["supercompact"]


def test_classify_compactness_rejects_bad_input():
    with pytest.raises(EmptySetError):
        classify_compactness(SIERPINSKI, 0)
    with pytest.raises(NotSaturatedError):
        classify_compactness(SIERPINSKI, 0b01)  # {0} is not an upper set


def test_classify_space_flags_all_true_on_finite():
    for P in corpus_exhaustive(4):
        flags = classify_space(derive_topology(P, "scott"))
        assert all(flags.values()), flags


def test_alexandroff_space_is_c_space_and_locally_finite():
    for P in corpus_exhaustive(3):
        flags = classify_space(derive_topology(P, "alexandroff"))
        assert flags["c_space"] and flags["locally_finite"]


# --- Smyth power space ----------------------------------------------------------

def test_smyth_of_sierpinski():
    PS = smyth_power_space(SIERPINSKI)
    assert PS.n == 2
    assert len(PS.opens) == 3  # a two-point chain again


def test_smyth_of_discrete_two_points():
    PS = smyth_power_space(DISCRETE2)
    assert PS.n == 3
    assert set(PS.labels) == {"{a0}", "{a1}", "{a0,a1}"}


def test_smyth_of_singleton():
    X = derive_topology(build_poset(["p"], []), "scott")
    assert smyth_power_space(X).n == 1


def test_smyth_specialization_is_smyth_order():
    for P in corpus_exhaustive(4)[:8]:
        X = derive_topology(P, "scott")
        PS = smyth_power_space(X)
        expected, _ = smyth_order_poset(X)
        assert specialization_order(PS).up == expected.up


def test_smyth_sober_iff_base_sober():
    for P in corpus_exhaustive(4):
        X = derive_topology(P, "scott")
        assert is_sober(X).holds == is_sober(smyth_power_space(X)).holds


def test_smyth_intersection_conditions():
    # families of compact saturated sets, irreducible in the power space:
    # an intersection inside an open forces a member inside it
    for P in corpus_exhaustive(3):
        X = derive_topology(P, "scott")
        PS = smyth_power_space(X)
        fam = compact_saturated(X)
        for sub in range(1, 1 << len(fam)):
            a_mask = sub
            if not is_irreducible(PS, a_mask, cross_check=False):
                continue
            members = [fam[i] for i in bits(sub)]
            inter = X.full_mask
            for m in members:
                inter &= m
            for u in X.opens:
                if inter & ~u == 0:
                    assert any(m & ~u == 0 for m in members)
    # and the closed variant
    for P in corpus_exhaustive(3):
        X = derive_topology(P, "scott")
        PS = smyth_power_space(X)
        fam = compact_saturated(X)
        for c in irreducible_closed_sets(PS):
            members = [fam[i] for i in bits(c)]
            inter = X.full_mask
            for m in members:
                inter &= m
            for u in X.opens:
                if inter & ~u == 0:
                    assert any(m & ~u == 0 for m in members)


# --- sups in the Smyth order ------------------------------------------------------

def test_kfamily_sup_singleton():
    assert kfamily_sup(SIERPINSKI, [0b10]) == 0b10


def test_kfamily_sup_disjoint_is_none():
    assert kfamily_sup(DISCRETE2, [0b01, 0b10]) is None


def test_kfamily_sup_is_intersection():
    assert kfamily_sup(SIERPINSKI, [0b10, 0b11]) == 0b10


def test_kfamily_sup_empty_family_rejected():
    with pytest.raises(EmptyFamilyError):
        kfamily_sup(SIERPINSKI, [])


def test_kfamily_sup_against_brute_force_on_corpus():
    from itertools import combinations
    for P in corpus_exhaustive(4)[:8]:
        X = derive_topology(P, "scott")
        fam = compact_saturated(X)
        for k in (1, 2, 3):
            for members in combinations(fam, min(k, len(fam))):
                got = kfamily_sup(X, list(members))
                inter = X.full_mask
                for m in members:
                    inter &= m
                assert got == (inter if inter else None)


# --- Rudin searches ------------------------------------------------------------

def test_rudin_minimal_forced_case():
    # the family {whole space}; C = closure of the bottom point
    assert rudin_minimal(SIERPINSKI, [0b11], 0b01) == 0b01


def test_rudin_minimal_diamond():
    D = diamond()
    r = rudin_minimal(DIAMOND_SCOTT, [D.up[1], D.up[3]], DIAMOND_SCOTT.full_mask)
    assert DIAMOND_SCOTT.is_closed(r)
    assert r & D.up[1] and r & D.up[3]
    # brute-force minimality among closed meeting sets
    for c in DIAMOND_SCOTT.closeds:
        if c != r and c & ~r == 0:
            assert not (c & D.up[1] and c & D.up[3])


def test_rudin_minimal_rejects_broken_hypotheses():
    with pytest.raises(HypothesisFailedError):
        rudin_minimal(DISCRETE2, [0b01, 0b10], 0b11)  # family not irreducible
    with pytest.raises(HypothesisFailedError):
        rudin_minimal(SIERPINSKI, [0b10], 0b01)  # C misses the member


def test_rudin_classical_four_chain():
    P = chain(4)
    d = rudin_classical(P, P.down[2], [0b0001, 0b0010])
    assert P.is_directed(d)
    assert d & ~P.down[2] == 0
    for g in (0b0001, 0b0010):
        assert P.down_closure(d) & P.up_closure(g)


def test_rudin_classical_diamond_top():
    D = diamond()
    d = rudin_classical(D, D.full_mask, [0b1000])
    assert P_meets := (D.down_closure(d) & 0b1000)


def test_rudin_classical_on_corpus():
    for P in corpus_exhaustive(4):
        c_mask = P.full_mask
        gens = [1 << P.topo_order[-1]]
        d = rudin_classical(P, c_mask, gens)
        assert P.is_directed(d)
        assert all(P.down_closure(d) & P.up_closure(g) for g in gens)


# --- product comparison -----------------------------------------------------------

def test_product_two_chains_six_opens():
    r = compare_product_topologies(chain(2), chain(2))
    assert r.equal and r.scott_opens == 6


def test_product_with_singleton():
    P = diamond()
    one = build_poset(["u"], [])
    r = compare_product_topologies(one, P)
    assert r.equal
    from scottlab.poset import upper_sets
    assert r.scott_opens == len(upper_sets(P))


def test_product_equality_on_pairs_up_to_three():
    for P in corpus_exhaustive(3):
        for Q in corpus_exhaustive(3):
            assert compare_product_topologies(P, Q).equal


def test_product_large_mode_principal():
    # force the sampled route with a low enumeration cap
    P = antichain(4)
    r = compare_product_topologies(P, P, enum_limit=100)
    assert r.equal and r.mode == "principal+sampled"
