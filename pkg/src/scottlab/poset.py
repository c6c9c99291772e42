"""Finite partial orders on labelled elements.

The relation is stored as bit-packed rows: ``up[i]`` is the bitmask of all
``j`` with ``i <= j`` and ``down[i]`` the mask of all ``j <= i``.  Subsets of
a poset are plain ints used as bitmasks over element indices.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Iterable, Iterator

from .errors import (
    BadPartitionError,
    CycleError,
    DuplicateLabelError,
    EmptySetError,
    NotDirectedError,
    SizeTooLargeError,
    UnknownLabelError,
    ensure,
)

EXHAUSTIVE_SIZE_CAP = 7


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class FinPoset:
    labels: tuple[str, ...]
    up: tuple[int, ...]

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise DuplicateLabelError("labels must be pairwise distinct")
        full = (1 << n) - 1
        for i, row in enumerate(self.up):
            if row & ~full:
                raise ValueError("relation row exceeds element count")
            if not row >> i & 1:
                raise ValueError(f"relation not reflexive at {self.labels[i]!r}")
        for i in range(n):
            for j in bits(self.up[i]):
                if i != j and self.up[j] >> i & 1:
                    raise CycleError((self.labels[i], self.labels[j]))
                if self.up[j] & ~self.up[i]:
                    raise ValueError("relation not transitive")

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def down(self) -> tuple[int, ...]:
        cols = [0] * self.n
        for i, row in enumerate(self.up):
            for j in bits(row):
                cols[j] |= 1 << i
        return tuple(cols)

    @cached_property
    def topo_order(self) -> tuple[int, ...]:
        """A linear extension: lower elements come first."""
        return tuple(sorted(range(self.n), key=lambda i: (self.down[i].bit_count(), i)))

    def le(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def lt(self, i: int, j: int) -> bool:
        return i != j and self.le(i, j)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabelError(f"unknown element {label!r}") from None

    def mask_of_labels(self, names: Iterable[str]) -> int:
        return mask_of(self.index(a) for a in names)

    def labels_of_mask(self, mask: int) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in bits(mask))

    def up_closure(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.up[i]
        return out

    def down_closure(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.down[i]
        return out

    def is_upper(self, mask: int) -> bool:
        return self.up_closure(mask) == mask

    def is_lower(self, mask: int) -> bool:
        return self.down_closure(mask) == mask

    def maximal(self, mask: int) -> int:
        """Maximal elements of the subset ``mask``."""
        out = 0
        for i in bits(mask):
            if self.up[i] & mask == 1 << i:
                out |= 1 << i
        return out

    def minimal(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            if self.down[i] & mask == 1 << i:
                out |= 1 << i
        return out

    def is_directed(self, mask: int) -> bool:
        """Nonempty and every two members have an upper bound inside."""
        if mask == 0:
            return False
        members = list(bits(mask))
        for a in members:
            for b in members:
                if not self.up[a] & self.up[b] & mask:
                    return False
        return True

    def has_max(self, mask: int) -> int | None:
        """The greatest element of ``mask`` if it exists, else None."""
        for i in bits(mask):
            if mask & ~self.down[i] == 0:
                return i
        return None

    def directed_sup(self, mask: int) -> int:
        """Least upper bound of a directed subset (its maximum, doubly computed)."""
        if not self.is_directed(mask):
            raise NotDirectedError("subset is not directed")
        top = self.has_max(mask)
        # independent route: brute-force least upper bound
        ubs = [u for u in range(self.n) if mask & ~self.down[u] == 0]
        least = [u for u in ubs if all(self.le(u, v) for v in ubs)]
        ensure(top is not None and least == [top], "directed subset must have its maximum as sup")
        return top

    def dual(self) -> FinPoset:
        return FinPoset(self.labels, self.down)

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs (i, j): i < j with nothing strictly between."""
        out = []
        for i in range(self.n):
            over = self.up[i] & ~(1 << i)
            for j in bits(over):
                between = over & self.down[j] & ~(1 << j)
                if between == 0:
                    out.append((i, j))
        return out

    def relation_pairs(self) -> list[tuple[str, str]]:
        return [
            (self.labels[i], self.labels[j])
            for i in range(self.n)
            for j in bits(self.up[i])
        ]


def build_poset(labels: Iterable[str], pairs: Iterable[tuple[str, str]]) -> FinPoset:
    """Reflexive-transitive closure of ``pairs``; raises CycleError if not antisymmetric."""
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise DuplicateLabelError("labels must be pairwise distinct")
    idx = {a: i for i, a in enumerate(labels)}
    n = len(labels)
    rows = [1 << i for i in range(n)]
    for a, b in pairs:
        if a not in idx or b not in idx:
            raise UnknownLabelError(f"pair ({a!r}, {b!r}) references an unknown label")
        rows[idx[a]] |= 1 << idx[b]
    # Warshall over bit rows
    for k in range(n):
        rk = rows[k]
        for i in range(n):
            if rows[i] >> k & 1:
                rows[i] |= rk
    for i in range(n):
        for j in bits(rows[i]):
            if i != j and rows[j] >> i & 1:
                raise CycleError((labels[i], labels[j]))
    return FinPoset(labels, tuple(rows))


def chain(n: int, prefix: str = "c") -> FinPoset:
    labels = tuple(f"{prefix}{i}" for i in range(n))
    return build_poset(labels, [(labels[i], labels[i + 1]) for i in range(n - 1)])


def antichain(n: int, prefix: str = "a") -> FinPoset:
    return build_poset(tuple(f"{prefix}{i}" for i in range(n)), [])


def diamond() -> FinPoset:
    return build_poset(("bot", "x", "y", "top"),
                       [("bot", "x"), ("bot", "y"), ("x", "top"), ("y", "top")])


# ---------------------------------------------------------------------------
# ideals

@dataclass(frozen=True)
class IdealDescriptor:
    """Principal(element) or NonPrincipal(directed generator set without maximum)."""

    element: int | None = None
    generators: int | None = None

    @property
    def principal(self) -> bool:
        return self.element is not None


def down_sets(P: FinPoset) -> Iterator[int]:
    """All lower sets, by DFS over a linear extension (lowers decided first;
    an element may join only when all its strict lowers already have)."""
    order = P.topo_order

    def rec(pos: int, acc: int) -> Iterator[int]:
        if pos == len(order):
            yield acc
            return
        e = order[pos]
        down_e = P.down[e] & ~(1 << e)
        if down_e & ~acc == 0:
            yield from rec(pos + 1, acc | 1 << e)
        yield from rec(pos + 1, acc)

    yield from rec(0, 0)


def upper_sets(P: FinPoset, limit: int | None = None) -> list[int]:
    """All upper sets.  ``limit`` caps the count (SizeTooLargeError beyond)."""
    full = P.full_mask
    out = []
    for d in down_sets(P):
        out.append(full & ~d)
        if limit is not None and len(out) > limit:
            raise SizeTooLargeError(f"more than {limit} upper sets")
    return out


def enumerate_ideals(P: FinPoset, verify_limit: int = 12) -> list[IdealDescriptor]:
    """All ideals (directed lower sets).  On a finite poset all are principal;
    cross-checked by brute force when the poset is small enough."""
    out = [IdealDescriptor(element=i) for i in range(P.n)]
    if P.n <= verify_limit:
        found = sorted(d for d in down_sets(P) if P.is_directed(d))
        expected = sorted(P.down[i] for i in range(P.n))
        ensure(found == expected, "finite poset has a non-principal ideal")
    return out


def ideal_masks(P: FinPoset) -> list[int]:
    """The ideals as subset masks (brute force over lower sets)."""
    return [d for d in down_sets(P) if P.is_directed(d)]


# ---------------------------------------------------------------------------
# order algebra

def product(P: FinPoset, Q: FinPoset) -> FinPoset:
    """Componentwise order on pairs; labels "(p,q)"."""
    labels = tuple(f"({a},{b})" for a in P.labels for b in Q.labels)
    nq = Q.n
    rows = []
    for i in range(P.n):
        for j in range(Q.n):
            row = 0
            for k in bits(P.up[i]):
                for l in bits(Q.up[j]):
                    row |= 1 << (k * nq + l)
            rows.append(row)
    R = FinPoset(labels, tuple(rows))
    ensure(R.n == P.n * Q.n, "product size mismatch")
    return R


def product_index(Q: FinPoset, i: int, j: int) -> int:
    return i * Q.n + j


def cofinal_part(P: FinPoset, d_mask: int, parts: list[int]) -> int:
    """Smallest index m with parts[m] cofinal in the directed set (down-closure covers it)."""
    if not P.is_directed(d_mask):
        raise NotDirectedError("D must be directed")
    if not parts:
        raise BadPartitionError("parts must be nonempty")
    union = 0
    for p in parts:
        if p == 0:
            raise BadPartitionError("parts must be nonempty sets")
        union |= p
    if union != d_mask:
        raise BadPartitionError("parts must union to D")
    for m, p in enumerate(parts):
        if d_mask & ~P.down_closure(p) == 0:
            return m
    ensure(False, "a directed set always has a cofinal part")  # pragma: no cover
    raise AssertionError  # pragma: no cover


def way_below(P: FinPoset, a_mask: int, b_mask: int, brute_limit: int = 12) -> bool:
    """A way-below B: every directed set whose sup lands in the up-set of B
    meets the up-set of A.  Brute force, cross-checked against the finite-case
    shortcut (up-set of B inside up-set of A)."""
    if a_mask == 0 or b_mask == 0:
        raise EmptySetError("way-below is defined for nonempty subsets")
    up_a = P.up_closure(a_mask)
    up_b = P.up_closure(b_mask)
    shortcut = up_b & ~up_a == 0
    if P.n <= brute_limit:
        brute = True
        for d in range(1, 1 << P.n):
            if not P.is_directed(d):
                continue
            sup = P.has_max(d)
            if up_b >> sup & 1 and d & up_a == 0:
                brute = False
                break
        ensure(brute == shortcut, "way-below brute force disagrees with finite shortcut")
        return brute
    return shortcut


def compact_elements(P: FinPoset) -> int:
    """Mask of elements way below themselves; all of P on a finite poset (checked)."""
    out = 0
    for i in range(P.n):
        if way_below(P, 1 << i, 1 << i):
            out |= 1 << i
    ensure(out == P.full_mask, "every element of a finite poset is compact")
    return out


# ---------------------------------------------------------------------------
# corpus generation

def _invariant_classes(P: FinPoset) -> list[list[int]]:
    """Partition of elements by an isomorphism-invariant key (one WL round)."""
    base = [(P.down[i].bit_count(), P.up[i].bit_count()) for i in range(P.n)]
    refined = []
    for i in range(P.n):
        below = tuple(sorted(base[j] for j in bits(P.down[i]) if j != i))
        above = tuple(sorted(base[j] for j in bits(P.up[i]) if j != i))
        refined.append((base[i], below, above))
    classes: dict = {}
    for i, key in enumerate(refined):
        classes.setdefault(key, []).append(i)
    return [classes[k] for k in sorted(classes)]


def canonical_key(P: FinPoset) -> tuple[int, ...]:
    """Minimum relation matrix over all invariant-respecting relabellings."""
    classes = _invariant_classes(P)
    best: tuple[int, ...] | None = None
    # positions are assigned class-block by class-block
    slots: list[int] = []
    for cls in classes:
        slots.extend(range(len(slots), len(slots) + len(cls)))
    for perm_parts in _class_perms(classes):
        pos = [0] * P.n
        k = 0
        for part in perm_parts:
            for i in part:
                pos[i] = slots[k]
                k += 1
        rows = [0] * P.n
        for i in range(P.n):
            for j in bits(P.up[i]):
                rows[pos[i]] |= 1 << pos[j]
        key = tuple(rows)
        if best is None or key < best:
            best = key
    assert best is not None
    return best


def _class_perms(classes: list[list[int]]) -> Iterator[list[tuple[int, ...]]]:
    if not classes:
        yield []
        return
    head, rest = classes[0], classes[1:]
    for p in permutations(head):
        for tail in _class_perms(rest):
            yield [p] + tail


def _extensions(P: FinPoset) -> Iterator[FinPoset]:
    """All posets obtained by adding one new maximal element above a lower set."""
    labels = tuple(f"e{i}" for i in range(P.n + 1))
    new = P.n
    for d in down_sets(P):
        rows = list(P.up)
        rows.append(1 << new)
        for i in bits(d):
            rows[i] |= 1 << new
        yield FinPoset(labels, tuple(rows))


_EXHAUSTIVE_CACHE: dict[int, list[FinPoset]] = {}

# number of posets on n unlabelled elements, used as a self-check
POSET_COUNTS = {1: 1, 2: 2, 3: 5, 4: 16, 5: 63, 6: 318, 7: 2045}


def corpus_exhaustive(size: int, size_cap: int = EXHAUSTIVE_SIZE_CAP) -> list[FinPoset]:
    """One representative per isomorphism class, for sizes up to the cap."""
    if size < 1:
        raise SizeTooLargeError("size must be >= 1")
    if size > size_cap:
        raise SizeTooLargeError(f"exhaustive corpus capped at size {size_cap}")
    if size in _EXHAUSTIVE_CACHE:
        return _EXHAUSTIVE_CACHE[size]
    if size == 1:
        result = [FinPoset(("e0",), (1,))]
    else:
        seen: dict[tuple[int, ...], FinPoset] = {}
        for Q in corpus_exhaustive(size - 1, size_cap):
            for R in _extensions(Q):
                key = canonical_key(R)
                if key not in seen:
                    seen[key] = R
        result = list(seen.values())
    if size in POSET_COUNTS:
        ensure(len(result) == POSET_COUNTS[size],
               f"poset count mismatch at size {size}: {len(result)}")
    _EXHAUSTIVE_CACHE[size] = result
    return result


def random_poset(size: int, rng: random.Random) -> FinPoset:
    """A random order: closure of a random DAG on a shuffled element sequence."""
    labels = tuple(f"e{i}" for i in range(size))
    order = list(range(size))
    rng.shuffle(order)
    p = rng.uniform(0.2, 0.8)
    pairs = []
    for a in range(size):
        for b in range(a + 1, size):
            if rng.random() < p:
                pairs.append((labels[order[a]], labels[order[b]]))
    return build_poset(labels, pairs)


def corpus(size: int, mode: str, seed: int = 0, count: int = 100,
           size_cap: int = EXHAUSTIVE_SIZE_CAP) -> list[FinPoset]:
    if mode == "exhaustive":
        return corpus_exhaustive(size, size_cap)
    if mode == "random":
        rng = random.Random(seed)
        return [random_poset(size, rng) for _ in range(count)]
    raise ValueError(f"unknown corpus mode {mode!r}")
