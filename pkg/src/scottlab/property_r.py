"""Property R on finite posets and its symbolic failure witnesses.

A space has property R when every intersection of finitely-generated upper
sets inside an open admits a finite subintersection inside it; equivalently
the Scott-closed sets are exactly the compact saturated sets of the lower
topology.  Finite posets always have it, so the positive side is an engine
self-test over dual computation routes, and the negative side is exercised
through symbolic witnesses with pointwise exclusion certificates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from .errors import (
    MalformedWitnessError,
    NotScottOpenError,
    SizeTooLargeError,
    ensure,
)
from .families import EMPTY, Family, SetExpr, UpSet
from .poset import FinPoset, bits, down_sets, product, upper_sets
from .report import Verdict
from .topology import (
    FinSpace,
    compare_product_topologies,
    derive_topology,
    irreducible_closed_sets,
    is_coherent,
    is_compact_subset,
    is_sober,
    is_well_filtered,
    specialization_order,
)

Q_SIZE_CAP = 14


# ---------------------------------------------------------------------------
# the lattice of lower-closed sets

@dataclass(frozen=True)
class QLattice:
    """All intersections of finitely-generated upper sets (with the empty and
    full set), ordered by reverse inclusion."""

    base: FinPoset
    elements: tuple[int, ...]
    poset: FinPoset

    def index(self, mask: int) -> int:
        return self.elements.index(mask)


def build_q_lattice(P: FinPoset, size_cap: int = Q_SIZE_CAP) -> QLattice:
    if P.n > size_cap:
        raise SizeTooLargeError(f"lattice construction capped at {size_cap} elements")
    gens = _fin_upper_gens(P)
    elems = {0, P.full_mask}
    elems.update(gens)
    frontier = list(gens)
    while frontier:
        a = frontier.pop()
        for b in list(elems):
            c = a & b
            if c not in elems:
                elems.add(c)
                frontier.append(c)
    ordered = sorted(elems, key=lambda m: (m.bit_count(), m))
    labels = tuple(f"C{i}" for i in range(len(ordered)))
    rows = []
    for a in ordered:
        row = 0
        for j, b in enumerate(ordered):
            if b & ~a == 0:  # a <= b in Q iff b is a subset of a
                row |= 1 << j
        rows.append(row)
    lattice = QLattice(P, tuple(ordered), FinPoset(labels, tuple(rows)))
    for a in ordered:
        for b in ordered:
            ensure(a & b in elems, "lattice must be closed under intersection")
    return lattice


def _fin_upper_gens(P: FinPoset) -> list[int]:
    """The finitely-generated upper sets: up-closures of nonempty antichains
    (an up-closure only depends on the generating set's minimal elements)."""
    out = set()
    for mask in range(1, 1 << P.n):
        if P.minimal(mask) == mask:
            out.add(P.up_closure(mask))
    return sorted(out)


def m_map(P: FinPoset, q: QLattice | None = None):
    """(x, y) -> the meet of their principal filters, as a lattice element."""
    q = q or build_q_lattice(P)

    def m(x: int, y: int) -> int:
        return q.index(P.up[x] & P.up[y])

    return m


def check_m_continuity(P: FinPoset, exhaustive_limit: int = 16,
                       samples: int = 2000, seed: int = 0) -> Verdict:
    """Monotonicity plus preservation of directed sups on the product, by an
    exhaustive sweep when the product is small and a seeded sample beyond."""
    R = product(P, P)
    nq = P.n

    def mval(k: int) -> int:
        return P.up[k // nq] & P.up[k % nq]

    for a in range(R.n):
        for b in bits(R.up[a]):
            if mval(b) & ~mval(a):
                return Verdict("m-monotone", False, witness=(R.labels[a], R.labels[b]))

    def sup_identity(mask: int) -> bool:
        top = R.has_max(mask)
        if top is None:
            return True  # not directed
        inter = P.full_mask
        for k in bits(mask):
            inter &= mval(k)
        return mval(top) == inter

    if R.n <= exhaustive_limit:
        for mask in range(1, 1 << R.n):
            if R.is_directed(mask) and not sup_identity(mask):
                return Verdict("m-continuous", False, witness=mask,
                               bounds={"mode": "exhaustive"})
        return Verdict("m-continuous", True, bounds={"mode": "exhaustive"})
    rng = random.Random(seed)
    for _ in range(samples):
        t = rng.randrange(R.n)
        mask = 1 << t
        for i in bits(R.down[t]):
            if rng.random() < 0.5:
                mask |= 1 << i
        ensure(R.is_directed(mask), "subsets below a point are directed")
        if not sup_identity(mask):
            return Verdict("m-continuous", False, witness=mask,
                           bounds={"mode": "sampled", "samples": samples})
    return Verdict("m-continuous", True, bounds={"mode": "sampled", "samples": samples})


def is_scott_open_mask(P: FinPoset, u_mask: int, directed_limit: int = 12) -> bool:
    if not P.is_upper(u_mask):
        return False
    if P.n <= directed_limit:
        for d in range(1, 1 << P.n):
            if P.is_directed(d):
                m = P.has_max(d)
                if u_mask >> m & 1 and d & u_mask == 0:
                    return False
    return True


def phi(P: FinPoset, u_mask: int, q: QLattice | None = None) -> tuple[int, Verdict]:
    """The lattice elements inside the open set, and whether that family is
    Scott open in the lattice order."""
    if not is_scott_open_mask(P, u_mask):
        raise NotScottOpenError("the argument is not Scott open")
    q = q or build_q_lattice(P)
    out = 0
    for i, c in enumerate(q.elements):
        if c & ~u_mask == 0:
            out |= 1 << i
    holds = is_scott_open_mask(q.poset, out)
    return out, Verdict("phi-scott-open", holds,
                        witness=None if holds else out)


# ---------------------------------------------------------------------------
# property R decision routes

def _scott_closed_family(P: FinPoset) -> list[int]:
    full = P.full_mask
    return sorted(full & ~u for u in upper_sets(P))


def _omega_compact_saturated_family(P: FinPoset) -> list[int]:
    """Compact saturated subsets of the lower topology, computed honestly:
    saturation as an intersection of opens, compactness by bounded covers."""
    Xw = derive_topology(P, "lower")
    out = []
    candidates = range(1 << P.n) if P.n <= 12 else down_sets(P)
    for mask in candidates:
        sat = Xw.full_mask
        ok = True
        for u in Xw.opens:
            if mask & ~u == 0:
                sat &= u
        if sat != mask:
            continue
        if not is_compact_subset(Xw, mask, samples=2).holds:
            continue
        out.append(mask)
    return sorted(out)


def has_property_r(P: FinPoset) -> Verdict:
    """Dual computation: the lower topology's compact saturated sets versus
    the Scott-closed sets, and the intersection-of-upper-sets definition."""
    closed = _scott_closed_family(P)
    ksat = _omega_compact_saturated_family(P)
    route_a = closed == ksat
    witness = None
    if not route_a:
        diff = set(closed).symmetric_difference(ksat)
        witness = [P.labels_of_mask(m) for m in sorted(diff)][:3]
    route_b = _definitional_check(P)
    ensure(route_a == route_b.holds, "property R routes disagree")
    return Verdict("property-R", route_a and route_b.holds, witness=witness,
                   bounds=route_b.bounds)


def _definitional_check(P: FinPoset, family_limit: int = 12, samples: int = 200,
                        seed: int = 0) -> Verdict:
    gens = _fin_upper_gens(P)
    scotts = upper_sets(P)

    def check_family(members: list[int]) -> bool:
        inter = P.full_mask
        for g in members:
            inter &= g
        for u in scotts:
            if inter & ~u == 0:
                # a finite subfamily with intersection inside the open;
                # greedy shrink from the full (finite) family
                keep = list(members)
                for g in list(keep):
                    trial = [x for x in keep if x != g]
                    ti = P.full_mask
                    for x in trial:
                        ti &= x
                    if ti & ~u == 0:
                        keep = trial
                ki = P.full_mask
                for x in keep:
                    ki &= x
                if ki & ~u:
                    return False
        return True

    if len(gens) <= family_limit:
        for sub in range(1, 1 << len(gens)):
            if not check_family([gens[i] for i in bits(sub)]):
                return Verdict("property-R-definition", False,
                               bounds={"mode": "exhaustive"})
        return Verdict("property-R-definition", True, bounds={"mode": "exhaustive"})
    rng = random.Random(seed)
    for _ in range(samples):
        members = [g for g in gens if rng.random() < 0.4] or [gens[0]]
        if not check_family(members):
            return Verdict("property-R-definition", False,
                           bounds={"mode": "sampled", "samples": samples})
    return Verdict("property-R-definition", True,
                   bounds={"mode": "sampled", "samples": samples})


def property_r_conditions(P: FinPoset) -> dict:
    """The four equivalent formulations, each computed independently."""
    X = derive_topology(P, "scott")
    # (1) finitely-generated upper-set families
    c1 = _definitional_check(P).holds
    # (2) point-filter families
    c2 = True
    scotts = upper_sets(P)
    if P.n <= 12:
        for sub in range(1, 1 << P.n):
            if not _shrinks_into_opens(P, [P.up[i] for i in bits(sub)], scotts):
                c2 = False
    # (3) lower-topology compact saturated = Scott closed
    c3 = _scott_closed_family(P) == _omega_compact_saturated_family(P)
    # (4) Scott-closed sets are Scott compact
    c4 = all(is_compact_subset(X, c, samples=2).holds for c in _scott_closed_family(P))
    return {"definition": c1, "point_filters": c2, "lower_compact_saturated": c3,
            "scott_closed_compact": c4}


def _shrinks_into_opens(P: FinPoset, members: list[int], scotts) -> bool:
    inter = P.full_mask
    for g in members:
        inter &= g
    for u in scotts:
        if inter & ~u == 0:
            ki = P.full_mask
            for x in members:
                ki &= x
            if ki & ~u:
                return False
    return True


# ---------------------------------------------------------------------------
# the implication ladder and sobriety pipeline

def implication_chain_check(P: FinPoset) -> dict:
    """The five step-down conditions from Lawson compactness to directed
    completeness, each computed on its own, with the ladder asserted."""
    lawson = derive_topology(P, "lawson")
    scott = derive_topology(P, "scott")
    c1 = is_compact_subset(lawson, P.full_mask, samples=4).holds
    c2 = all(is_compact_subset(lawson, P.up[x], samples=2).holds for x in range(P.n))
    c3 = has_property_r(P).holds
    c4 = _filtered_family_condition(P)
    c5 = _is_dcpo(P)
    conds = [c1, c2, c3, c4, c5]
    for a, b in zip(conds, conds[1:]):
        ensure(not a or b, "implication ladder violated")
    # compactness of the Lawson space also decomposes into Scott compactness,
    # compact finite filter meets, and property R
    filters_compact = all(
        is_compact_subset(scott, inter, samples=2).holds
        for inter in _finite_filter_meets(P))
    decomposition = (is_compact_subset(scott, P.full_mask, samples=4).holds
                     and filters_compact and c3)
    ensure(c1 == decomposition, "Lawson compactness decomposition disagrees")
    return {"lawson_compact": c1, "lawson_upper_semicompact": c2, "property_r": c3,
            "filtered_families": c4, "dcpo": c5, "decomposition_agrees": True}


def _finite_filter_meets(P: FinPoset) -> list[int]:
    out = set()
    for mask in range(1, 1 << P.n):
        inter = P.full_mask
        for i in bits(mask):
            inter &= P.up[i]
        out.add(inter)
    return sorted(out)


def _filtered_family_condition(P: FinPoset, family_limit: int = 10) -> bool:
    """Filtered families of finitely-generated upper sets landing in an open
    have a single member inside it."""
    gens = _fin_upper_gens(P)
    scotts = upper_sets(P)
    if len(gens) > family_limit:
        gens = gens[:family_limit]

    for sub in range(1, 1 << len(gens)):
        members = [gens[i] for i in bits(sub)]
        filtered = all(
            any(c & ~(a & b) == 0 for c in members) for a in members for b in members)
        if not filtered:
            continue
        inter = P.full_mask
        for g in members:
            inter &= g
        for u in scotts:
            if inter & ~u == 0 and not any(g & ~u == 0 for g in members):
                return False
    return True


def _is_dcpo(P: FinPoset, limit: int = 12) -> bool:
    if P.n > limit:
        return True  # finite posets are directed complete
    for d in range(1, 1 << P.n):
        if P.is_directed(d) and P.has_max(d) is None:
            return False
    return True


def wf_coherent_implies_r(P: FinPoset) -> Verdict:
    X = derive_topology(P, "scott")
    hypothesis = is_well_filtered(X).holds and is_coherent(X)
    conclusion = has_property_r(P).holds
    holds = (not hypothesis) or conclusion
    return Verdict("wf-coherent-implies-R", holds,
                   witness=None if holds else P.labels)


def sober_pipeline(P: FinPoset) -> dict:
    """Premises and conclusion of the sobriety criterion, plus a replay of
    its mechanics: every irreducible closed set is directed with its sup as
    the generic point."""
    X = derive_topology(P, "scott")
    r = has_property_r(P).holds
    prod = compare_product_topologies(P, P).equal
    sober = is_sober(X).holds
    ensure((not (r and prod)) or sober, "sobriety criterion violated")
    directed_ok = True
    for c in irreducible_closed_sets(X):
        if not P.is_directed(c):
            directed_ok = False
            break
        top = P.directed_sup(c)
        if not (c >> top & 1 and P.down[top] == c):
            directed_ok = False
            break
    return {"property_r": r, "product_equality": prod, "sober": sober,
            "irreducible_closed_directed": directed_ok}


def omega_star_compact_check(X: FinSpace) -> Verdict:
    """Every closed set compact in the lower topology of the specialization
    order; agreement with property R asserted."""
    P = specialization_order(X)
    Xw = derive_topology(P, "lower")
    ok = all(is_compact_subset(Xw, c, samples=2).holds for c in X.closeds)
    ensure(ok == has_property_r(P).holds, "lower-compactness must match property R")
    return Verdict("omega-star-compact", ok)


# ---------------------------------------------------------------------------
# symbolic failure witnesses

POINT_RULES = {
    "johnstone-diag": lambda f, i: (i, i),
    "jia-diag": lambda f, i: (1, i, i),
}

EXCLUSION_RULES = ("max-coordinate",)


@dataclass
class RWitness:
    """An indexed family of points and an open set with a pointwise
    certificate that the intersection of the point filters lies inside the
    open set."""

    family: Family
    points: str | tuple = "johnstone-diag"
    open_u: SetExpr = EMPTY
    exclusion: str | dict = "max-coordinate"

    def point(self, i: int):
        if isinstance(self.points, str):
            return POINT_RULES[self.points](self.family, i)
        return self.points[i - 1]

    def n_points(self, depth: int) -> int:
        if isinstance(self.points, str):
            return depth
        return len(self.points)

    def exclusion_index(self, e) -> int:
        if isinstance(self.exclusion, dict):
            return self.exclusion[e]
        if self.exclusion == "max-coordinate":
            return self.family.elem_horizon(e) + 1
        raise MalformedWitnessError(f"unknown exclusion rule {self.exclusion!r}")


def verify_r_failure(witness: RWitness, max_subfamily: int = 5, depth: int = 12) -> dict:
    """Certify a property-R failure: the full intersection lies inside the
    open set (pointwise exclusion), while every small subfamily's
    intersection pokes out of it."""
    f = witness.family
    n = witness.n_points(depth)
    pts = [witness.point(i) for i in range(1, n + 1)]
    for p in pts:
        f.check(p)
    bounded = not isinstance(witness.points, str)

    for e in f.elements_at_depth(depth):
        if witness.open_u.member(f, e):
            continue
        i = witness.exclusion_index(e)
        if i < 1 or (bounded and i > n):
            raise MalformedWitnessError(
                f"no excluding point for {f.format_elem(e)}: index {i} is out of range")
        if f._leq(witness.point(i), e):
            raise MalformedWitnessError(
                f"{f.format_elem(e)} is above point {i}; the exclusion certificate fails")

    escapes = 0
    for size in range(1, max_subfamily + 1):
        for combo in combinations(range(1, n + 1), size):
            found = None
            for e in f.elements_at_depth(depth):
                if witness.open_u.member(f, e):
                    continue
                if all(f._leq(witness.point(i), e) for i in combo):
                    found = e
                    break
            if found is None:
                return {"certified": False,
                        "witness": {"subfamily": combo,
                                    "reason": "its intersection stays inside the open set"},
                        "bounds": {"max_subfamily": max_subfamily, "depth": depth}}
            escapes += 1
    return {"certified": True, "subfamilies_checked": escapes,
            "bounds": {"max_subfamily": max_subfamily, "depth": depth}}
