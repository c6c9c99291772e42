"""The named countable posets: decidable order rules, finite truncations,
a small set-description language, directed-set classification, ideal
descriptors, chain extraction, and openness/compactness oracles.

Element codes are family-specific tuples with ``INF`` marking the infinite
last coordinate where applicable.  All natural-number coordinates start at 1.

Bounded verdicts use a sweep window derived from the expression's *horizon*:
the largest finite coordinate named by any atom.  Atom membership is constant
in any coordinate ranging beyond the horizon (the only non-constant regions
are the parity regions on maximal elements, which are periodic with period
two, and consecutive-column windows cover both parities), so a sweep over a
window exceeding the horizon decides quantifiers over all columns and
heights.  Every report records its window.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import islice

from .errors import (
    EmptySetError,
    ForeignCodeError,
    HypothesisFailedError,
    NoRuleError,
    NotDirectedError,
    NotSaturatedError,
    NoUpperBoundError,
    ensure,
)
from .poset import FinPoset, bits, mask_of
from .report import Verdict

INF = math.inf

BOT = "bot"
TOP = "top"


# ---------------------------------------------------------------------------
# set-description language

class SetExpr:
    """Expression tree for pointwise-decidable subsets of a family."""

    def member(self, fam: "Family", e) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class UpSet(SetExpr):
    elem: object

    def member(self, fam, e):
        return fam.leq(self.elem, e)


@dataclass(frozen=True)
class DownSet(SetExpr):
    elem: object

    def member(self, fam, e):
        return fam.leq(e, self.elem)


@dataclass(frozen=True)
class Region(SetExpr):
    name: str

    def member(self, fam, e):
        return fam.region_member(self.name, e)


@dataclass(frozen=True)
class FiniteSet(SetExpr):
    elems: tuple

    def member(self, fam, e):
        return e in self.elems


@dataclass(frozen=True)
class Union(SetExpr):
    parts: tuple

    def member(self, fam, e):
        return any(p.member(fam, e) for p in self.parts)


@dataclass(frozen=True)
class Inter(SetExpr):
    parts: tuple

    def member(self, fam, e):
        return all(p.member(fam, e) for p in self.parts)


@dataclass(frozen=True)
class Complement(SetExpr):
    part: SetExpr

    def member(self, fam, e):
        return not self.part.member(fam, e)


FULL = Region("all")
EMPTY = Complement(FULL)


def union(*parts) -> SetExpr:
    return Union(tuple(parts))


def inter(*parts) -> SetExpr:
    return Inter(tuple(parts))


def member(fam: "Family", expr: SetExpr, e) -> bool:
    if not fam.contains(e):
        raise ForeignCodeError(f"{e!r} is not an element of {fam.name}")
    return expr.member(fam, e)


def expr_horizon(fam: "Family", expr: SetExpr) -> int:
    """Largest finite coordinate mentioned by the expression's atoms."""
    out = 1
    stack = [expr]
    while stack:
        s = stack.pop()
        if isinstance(s, (Union, Inter)):
            stack.extend(s.parts)
        elif isinstance(s, Complement):
            stack.append(s.part)
        elif isinstance(s, (UpSet, DownSet)):
            out = max(out, fam.elem_horizon(s.elem))
        elif isinstance(s, FiniteSet):
            for e in s.elems:
                out = max(out, fam.elem_horizon(e))
        elif isinstance(s, Region):
            out = max(out, fam.region_horizon(s.name))
    return out


# ---------------------------------------------------------------------------
# families

class Family:
    """A countable poset with a decidable order and a column rule table.

    Columns are the non-principal ideals: each is generated by a canonical
    strictly ascending chain ``column_elem(col, 1) < column_elem(col, 2) <
    ...``; ``column_sup`` gives the least upper bound of the column when the
    order rule forces one.
    """

    name: str = ""

    def contains(self, e) -> bool:
        raise NotImplementedError

    def check(self, e):
        if not self.contains(e):
            raise ForeignCodeError(f"{e!r} is not an element of {self.name}")

    def leq(self, a, b) -> bool:
        self.check(a)
        self.check(b)
        return self._leq(a, b)

    def _leq(self, a, b) -> bool:
        raise NotImplementedError

    def elements_at_depth(self, k: int) -> list:
        raise NotImplementedError

    def columns_within(self, bound: int) -> list:
        """Column ids whose coordinates are at most the bound."""
        raise NotImplementedError

    def column_elem(self, col, m: int):
        raise NotImplementedError

    def column_sup(self, col):
        """Least upper bound of the column per the rule table (None: no sup)."""
        raise NotImplementedError

    def column_of(self, e):
        """The column a chain-level element belongs to, else None."""
        return None

    def sup_columns_of(self, e) -> list:
        """Columns whose rule-table sup is exactly this element."""
        return []

    def column_index(self, col) -> int:
        """1-based position of the column in the canonical enumeration;
        stable under growing truncation depth."""
        raise NotImplementedError

    def column_by_index(self, n: int):
        raise NotImplementedError

    def ups_within(self, e, bound: int) -> list:
        """All elements >= e with coordinates at most the bound."""
        raise NotImplementedError

    def region_member(self, name: str, e) -> bool:
        if name == "all":
            return True
        raise NoRuleError(f"{self.name} has no region {name!r}")

    def region_horizon(self, name: str) -> int:
        ints = [int(p) for p in name.split(":")[1:] if p.lstrip("-").isdigit()]
        return max([1] + ints)

    def elem_horizon(self, e) -> int:
        raise NotImplementedError

    def format_elem(self, e) -> str:
        raise NotImplementedError

    def parse_elem(self, s: str):
        raise NotImplementedError

    # shared helpers -------------------------------------------------------

    def _parse_tuple(self, s: str, arity: int):
        s = s.strip()
        if not (s.startswith("(") and s.endswith(")")):
            raise ForeignCodeError(f"cannot parse {s!r}")
        parts = [p.strip() for p in s[1:-1].split(",")]
        if len(parts) != arity:
            raise ForeignCodeError(f"cannot parse {s!r}")
        out = []
        for p in parts:
            if p in ("inf", "infinity", "oo"):
                out.append(INF)
            else:
                out.append(int(p))
        return tuple(out)

    def _fmt_coord(self, c) -> str:
        return "inf" if c == INF else str(int(c))


def _is_nat(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= 1


class Johnstone(Family):
    """Pairs (j, k) with k possibly infinite; (j,k) <= (m,n) iff the columns
    agree and the heights compare, or n is infinite and k <= m."""

    name = "johnstone"

    def contains(self, e):
        return (isinstance(e, tuple) and len(e) == 2 and _is_nat(e[0])
                and (_is_nat(e[1]) or e[1] == INF))

    def _leq(self, a, b):
        (j, k), (m, n) = a, b
        return (j == m and k <= n) or (n == INF and k <= m)

    def elements_at_depth(self, k):
        out = []
        for n in range(1, k + 1):
            out.extend((n, m) for m in range(1, k + 1))
            out.append((n, INF))
        return out

    def columns_within(self, bound):
        return list(range(1, bound + 1))

    def column_elem(self, col, m):
        return (col, m)

    def column_sup(self, col):
        return (col, INF)

    def column_of(self, e):
        return e[0] if e[1] != INF else None

    def sup_columns_of(self, e):
        return [e[0]] if e[1] == INF else []

    def column_index(self, col):
        return col

    def column_by_index(self, n):
        return n

    def ups_within(self, e, bound):
        j, k = e
        if k == INF:
            return [e]
        out = [(j, m) for m in range(k, bound + 1)]
        out.append((j, INF))
        out.extend((m, INF) for m in range(k, bound + 1) if m != j)
        return out

    def region_member(self, name, e):
        if name == "all":
            return True
        if name == "jmax":
            return e[1] == INF
        if name == "jmax-even":
            return e[1] == INF and e[0] % 2 == 0
        if name == "jmax-odd":
            return e[1] == INF and e[0] % 2 == 1
        if name.startswith("col:"):
            return e[0] == int(name[4:]) and e[1] != INF
        raise NoRuleError(f"{self.name} has no region {name!r}")

    def elem_horizon(self, e):
        return max(c for c in (e[0], e[1]) if c != INF)

    def format_elem(self, e):
        return f"({self._fmt_coord(e[0])},{self._fmt_coord(e[1])})"

    def parse_elem(self, s):
        e = self._parse_tuple(s, 2)
        self.check(e)
        return e


class JohnstonePlusX(Johnstone):
    """The pair family together with a finite discrete block of extra points."""

    def __init__(self, x_count: int):
        if x_count < 0:
            raise ValueError("x_count must be nonnegative")
        self.x_count = x_count
        self.name = f"johnstone+x:{x_count}"

    def _is_x(self, e):
        return (isinstance(e, tuple) and len(e) == 2 and e[0] == "x"
                and isinstance(e[1], int) and 1 <= e[1] <= self.x_count)

    def contains(self, e):
        return self._is_x(e) or super().contains(e)

    def _leq(self, a, b):
        ax, bx = self._is_x(a), self._is_x(b)
        if ax or bx:
            return a == b
        return super()._leq(a, b)

    def elements_at_depth(self, k):
        return super().elements_at_depth(k) + [("x", i) for i in range(1, self.x_count + 1)]

    def column_of(self, e):
        if self._is_x(e):
            return None
        return super().column_of(e)

    def ups_within(self, e, bound):
        if self._is_x(e):
            return [e]
        return super().ups_within(e, bound)

    def region_member(self, name, e):
        if name == "xpart":
            return self._is_x(e)
        if self._is_x(e):
            return name == "all"
        return super().region_member(name, e)

    def elem_horizon(self, e):
        if self._is_x(e):
            return 1
        return super().elem_horizon(e)

    def format_elem(self, e):
        if self._is_x(e):
            return f"x{e[1]}"
        return super().format_elem(e)

    def parse_elem(self, s):
        s = s.strip()
        if s.startswith("x") and s[1:].isdigit():
            e = ("x", int(s[1:]))
            self.check(e)
            return e
        return super().parse_elem(s)


class Jia(Family):
    """Triples (i, j, k) with k possibly infinite; comparabilities run inside
    a column or step to the next block's infinite level."""

    name = "jia"

    def contains(self, e):
        return (isinstance(e, tuple) and len(e) == 3 and _is_nat(e[0]) and _is_nat(e[1])
                and (_is_nat(e[2]) or e[2] == INF))

    def _leq(self, a, b):
        (i1, j1, k1), (i2, j2, k2) = a, b
        if i1 == i2 and j1 == j2 and k1 <= k2:
            return True
        return i2 == i1 + 1 and k1 <= j2 and k2 == INF

    def elements_at_depth(self, k):
        out = []
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                out.extend((i, j, m) for m in range(1, k + 1))
                out.append((i, j, INF))
        return out

    def columns_within(self, bound):
        return [(i, j) for i in range(1, bound + 1) for j in range(1, bound + 1)]

    def column_elem(self, col, m):
        return (col[0], col[1], m)

    def column_sup(self, col):
        return (col[0], col[1], INF)

    def column_of(self, e):
        return (e[0], e[1]) if e[2] != INF else None

    def sup_columns_of(self, e):
        return [(e[0], e[1])] if e[2] == INF else []

    def column_index(self, col):
        # diagonal enumeration: (1,1), (1,2), (2,1), (1,3), (2,2), (3,1), ...
        i, j = col
        t = i + j - 2
        return t * (t + 1) // 2 + i

    def column_by_index(self, n):
        t = 0
        while (t + 1) * (t + 2) // 2 < n:
            t += 1
        i = n - t * (t + 1) // 2
        return (i, t + 2 - i)

    def ups_within(self, e, bound):
        i, j, k = e
        if k == INF:
            return [e]
        out = [(i, j, m) for m in range(k, bound + 1)]
        out.append((i, j, INF))
        if i + 1 <= bound:
            out.extend((i + 1, j2, INF) for j2 in range(k, bound + 1))
        return out

    def region_member(self, name, e):
        if name == "all":
            return True
        if name == "linf":
            return e[2] == INF
        if name.startswith("block:"):
            return e[0] == int(name[6:])
        if name.startswith("inf-at:"):
            return e[0] == int(name[7:]) and e[2] == INF
        raise NoRuleError(f"{self.name} has no region {name!r}")

    def elem_horizon(self, e):
        return max(c for c in e if c != INF)

    def format_elem(self, e):
        return f"({self._fmt_coord(e[0])},{self._fmt_coord(e[1])},{self._fmt_coord(e[2])})"

    def parse_elem(self, s):
        e = self._parse_tuple(s, 3)
        self.check(e)
        return e


class FanLattice(Family):
    """Bottom, a grid of disjoint ascending chains, and a top: the countable
    complete lattice whose columns have no sup below the top."""

    name = "l428"

    def contains(self, e):
        if e in (BOT, TOP):
            return True
        return isinstance(e, tuple) and len(e) == 2 and _is_nat(e[0]) and _is_nat(e[1])

    def _leq(self, a, b):
        if a == BOT or b == TOP:
            return True
        if a == TOP:
            return b == TOP
        if b == BOT:
            return a == BOT
        return a[0] == b[0] and a[1] <= b[1]

    def elements_at_depth(self, k):
        out = [BOT]
        for n in range(1, k + 1):
            out.extend((n, m) for m in range(1, k + 1))
        out.append(TOP)
        return out

    def columns_within(self, bound):
        return list(range(1, bound + 1))

    def column_elem(self, col, m):
        return (col, m)

    def column_sup(self, col):
        # the only upper bound of a whole column is the top element
        return TOP

    def column_of(self, e):
        if e in (BOT, TOP):
            return None
        return e[0]

    def sup_columns_of(self, e):
        # every column's sup is the top; one witness column suffices
        return [1] if e == TOP else []

    def column_index(self, col):
        return col

    def column_by_index(self, n):
        return n

    def ups_within(self, e, bound):
        if e == TOP:
            return [TOP]
        if e == BOT:
            return self.elements_at_depth(bound)
        n, m = e
        return [(n, m2) for m2 in range(m, bound + 1)] + [TOP]

    def region_member(self, name, e):
        if name == "all":
            return True
        if name == "bot":
            return e == BOT
        if name == "top":
            return e == TOP
        if name == "grid":
            return e not in (BOT, TOP)
        if name.startswith("col:"):
            return e not in (BOT, TOP) and e[0] == int(name[4:])
        raise NoRuleError(f"{self.name} has no region {name!r}")

    def elem_horizon(self, e):
        if e in (BOT, TOP):
            return 1
        return max(e)

    def format_elem(self, e):
        if e in (BOT, TOP):
            return e
        return f"({e[0]},{e[1]})"

    def parse_elem(self, s):
        s = s.strip()
        if s in (BOT, TOP):
            return s
        e = self._parse_tuple(s, 2)
        self.check(e)
        return e


class NChain(Family):
    """The natural numbers as a chain: one non-principal ideal, no sup."""

    name = "nchain"

    def contains(self, e):
        return _is_nat(e)

    def _leq(self, a, b):
        return a <= b

    def elements_at_depth(self, k):
        return list(range(1, k + 1))

    def columns_within(self, bound):
        return [0]

    def column_elem(self, col, m):
        return m

    def column_sup(self, col):
        return None

    def column_of(self, e):
        return 0

    def column_index(self, col):
        return 1

    def column_by_index(self, n):
        return 0

    def ups_within(self, e, bound):
        return list(range(e, bound + 1))

    def elem_horizon(self, e):
        return e

    def format_elem(self, e):
        return str(e)

    def parse_elem(self, s):
        e = int(s)
        self.check(e)
        return e


class FlatAntichain(Family):
    """A finite discrete order; every ideal is principal."""

    def __init__(self, size: int):
        if size < 1:
            raise ValueError("size must be positive")
        self.size = size
        self.name = f"flat:{size}"

    def contains(self, e):
        return isinstance(e, int) and 1 <= e <= self.size

    def _leq(self, a, b):
        return a == b

    def elements_at_depth(self, k):
        return list(range(1, self.size + 1))

    def columns_within(self, bound):
        return []

    def column_elem(self, col, m):
        raise NoRuleError("flat antichains have no columns")

    def column_sup(self, col):
        raise NoRuleError("flat antichains have no columns")

    def ups_within(self, e, bound):
        return [e]

    def elem_horizon(self, e):
        return 1

    def format_elem(self, e):
        return str(e)

    def parse_elem(self, s):
        e = int(s)
        self.check(e)
        return e


def family_by_name(name: str) -> Family:
    name = name.strip()
    if name == "johnstone":
        return Johnstone()
    if name.startswith("johnstone+x:"):
        return JohnstonePlusX(int(name.split(":", 1)[1]))
    if name == "jia":
        return Jia()
    if name == "l428":
        return FanLattice()
    if name == "nchain":
        return NChain()
    if name.startswith("flat:"):
        return FlatAntichain(int(name.split(":", 1)[1]))
    raise NoRuleError(f"unknown family {name!r}")


# ---------------------------------------------------------------------------
# truncations

@dataclass(frozen=True)
class Trunc:
    """A finite order-restriction of the ambient family.  Caveat: this is not
    a sub-dcpo; column sups above the depth escape it."""

    family: Family
    depth: int
    elems: tuple
    poset: FinPoset

    def index(self, e) -> int:
        return self.elems.index(e)

    def mask_of(self, codes) -> int:
        return mask_of(self.elems.index(e) for e in codes)

    def mask_of_expr(self, expr: SetExpr) -> int:
        return mask_of(i for i, e in enumerate(self.elems) if expr.member(self.family, e))


def truncate(f: Family, k: int) -> Trunc:
    if k < 1:
        raise ValueError("depth must be at least 1")
    elems = tuple(f.elements_at_depth(k))
    labels = tuple(f.format_elem(e) for e in elems)
    rows = []
    for a in elems:
        row = 0
        for j, b in enumerate(elems):
            if f._leq(a, b):
                row |= 1 << j
        rows.append(row)
    return Trunc(f, k, elems, FinPoset(labels, tuple(rows)))


# ---------------------------------------------------------------------------
# directed sets

@dataclass(frozen=True)
class SupResult:
    kind: str  # "max" | "sup" | "nosup"
    elem: object = None


def classify_directed(f: Family, gens, column_cofinal: bool = False) -> SupResult:
    """Classify the directed set described by the generators.

    Plain generators are the directed set itself (finite, so the result is
    its maximum).  With ``column_cofinal`` the generators mark a set cofinal
    in their column, and the column rule table decides the sup.
    """
    gens = list(gens)
    if not gens:
        raise NotDirectedError("a directed set is nonempty")
    for e in gens:
        f.check(e)
    for a in gens:
        for b in gens:
            if not any(f._leq(a, c) and f._leq(b, c) for c in gens):
                raise NotDirectedError(
                    f"{f.format_elem(a)} and {f.format_elem(b)} have no upper bound among the generators")
    if not column_cofinal:
        top = next(c for c in gens if all(f._leq(b, c) for b in gens))
        return SupResult("max", top)
    cols = {f.column_of(e) for e in gens}
    if len(cols) != 1 or None in cols:
        raise NotDirectedError("column-cofinal generators must sit in one column")
    sup = f.column_sup(cols.pop())
    if sup is None:
        return SupResult("nosup")
    return SupResult("sup", sup)


# ---------------------------------------------------------------------------
# ideal descriptors

@dataclass(frozen=True)
class ColumnDescriptor:
    column: object
    index: int  # 1-based canonical position


def nonprincipal_descriptors(f: Family, depth: int) -> list[ColumnDescriptor]:
    """The column descriptors visible at the given depth, carrying their
    depth-stable canonical indices."""
    cols = sorted(f.columns_within(depth), key=f.column_index)
    return [ColumnDescriptor(c, f.column_index(c)) for c in cols]


def descriptor_trace(f: Family, col, depth: int) -> set:
    """The ideal generated by the column, restricted to the truncation."""
    chain_prefix = [f.column_elem(col, m) for m in range(1, depth + 1)]
    out = set()
    for e in f.elements_at_depth(depth):
        if any(f._leq(e, c) for c in chain_prefix):
            out.add(e)
    return out


def validate_descriptor_completeness(f: Family, depth: int, exhaustive_limit: int = 12,
                                     samples: int = 500, seed: int = 0) -> Verdict:
    """Every directed subset of the truncation is cofinal in exactly one
    descriptor trace (principal traces included)."""
    tr = truncate(f, depth)
    P = tr.poset
    traces = {P.down[i] for i in range(P.n)}
    for d in nonprincipal_descriptors(f, depth):
        traces.add(tr.mask_of(descriptor_trace(f, d.column, depth)))
    traces = sorted(traces)

    def check(d_mask: int) -> bool:
        down_d = P.down_closure(d_mask)
        hits = [t for t in traces if d_mask & ~t == 0 and t & ~down_d == 0]
        return len(hits) == 1

    if P.n <= exhaustive_limit:
        for d_mask in range(1, 1 << P.n):
            if P.is_directed(d_mask) and not check(d_mask):
                return Verdict("descriptor-completeness", False,
                               witness=P.labels_of_mask(d_mask),
                               bounds={"depth": depth, "mode": "exhaustive"})
        return Verdict("descriptor-completeness", True,
                       bounds={"depth": depth, "mode": "exhaustive"})
    rng = random.Random(seed)
    for _ in range(samples):
        t = rng.randrange(P.n)
        below = list(bits(P.down[t]))
        d_mask = 1 << t
        for i in below:
            if rng.random() < 0.5:
                d_mask |= 1 << i
        ensure(P.is_directed(d_mask), "sampled sets below a point are directed")
        if not check(d_mask):
            return Verdict("descriptor-completeness", False,
                           witness=P.labels_of_mask(d_mask),
                           bounds={"depth": depth, "mode": "sampled", "samples": samples})
    return Verdict("descriptor-completeness", True,
                   bounds={"depth": depth, "mode": "sampled", "samples": samples})


# ---------------------------------------------------------------------------
# chain extraction

def extract_chain(f: Family, enumeration, no_max: bool = False, search_cap: int = 100_000):
    """Yield a chain c_1 <= c_2 <= ... inside the enumerated directed set
    whose down-closure dominates the consumed prefix at every step; strictly
    ascending when the set is certified to have no largest element.

    Upper bounds are found by scanning the enumeration from the start, which
    terminates for any directed enumeration since each bound appears at a
    finite position.
    """
    buf: list = []
    it = iter(enumeration)

    def at(i: int):
        while len(buf) <= i:
            try:
                buf.append(next(it))
            except StopIteration:
                return None
        return buf[i]

    def find(pred, what: str):
        i = 0
        while i < search_cap:
            e = at(i)
            if e is None:
                raise NotDirectedError(
                    f"enumeration exhausted while searching for {what}; "
                    "prefix does not extend to a directed set as certified")
            if pred(e):
                return e
            i += 1
        raise NoUpperBoundError(f"no {what} within the first {search_cap} elements")

    first = at(0)
    if first is None:
        raise EmptySetError("enumeration is empty")
    f.check(first)
    c = first
    yield c
    n = 1
    while True:
        d = at(n)
        if d is None:
            return
        f.check(d)
        need = [d, c]
        if no_max:
            cc = c
            need.append(find(lambda e: not f._leq(e, cc), "witness above the current link"))
        cc, dd = c, d
        nxt = find(lambda e: all(f._leq(x, e) for x in need), "upper bound in the set")
        ensure(f._leq(c, nxt) and f._leq(d, nxt), "chain link must dominate the prefix")
        if no_max:
            ensure(nxt != c, "chain must ascend strictly without a largest element")
        c = nxt
        yield c
        n += 1


def column_enumeration(f: Family, col, shuffle_seed: int | None = None, block: int = 16):
    """The canonical enumeration of a column, endless; a seed shuffles each
    successive block so prefixes arrive out of order but stay directed."""
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    m = 1
    while True:
        idx = list(range(m, m + block))
        if rng is not None:
            rng.shuffle(idx)
        for i in idx:
            yield f.column_elem(col, i)
        m += block


# ---------------------------------------------------------------------------
# openness status

@dataclass(frozen=True)
class OpenStatus:
    verdict: str  # "open" | "not-open" | "no-counterexample"
    rule: str = ""
    witness: object = None
    bounds: dict = field(default_factory=dict)

    @property
    def proven_open(self):
        return self.verdict == "open"

    @property
    def proven_not_open(self):
        return self.verdict == "not-open"


WINDOW_CAP = 48
WINDOW_PAD = 2


def sweep_window(f: Family, s: SetExpr, depth: int) -> int:
    return max(depth, expr_horizon(f, s) + WINDOW_PAD)


def scott_open_status(f: Family, s: SetExpr, depth: int) -> OpenStatus:
    """Upward closure over a stabilization window, then the directed-sup
    condition through the column descriptors: a column whose sup lies in the
    set must have its chain meet the set."""
    w = sweep_window(f, s, depth)
    if w > WINDOW_CAP:
        return OpenStatus("no-counterexample", bounds={"depth": depth, "window_cap": WINDOW_CAP})
    bounds = {"depth": depth, "window": w}
    for e in f.elements_at_depth(w):
        if not s.member(f, e):
            continue
        for b in f.ups_within(e, w):
            if not s.member(f, b):
                return OpenStatus("not-open", rule="upward closure fails",
                                  witness=(f.format_elem(e), f.format_elem(b)), bounds=bounds)
    for col in f.columns_within(w):
        sup = f.column_sup(col)
        if sup is None or not s.member(f, sup):
            continue
        if not any(s.member(f, f.column_elem(col, m)) for m in range(1, w + 1)):
            return OpenStatus("not-open", rule="a column sup is inside but its chain misses the set",
                              witness={"column": col}, bounds=bounds)
    return OpenStatus("open", rule="window sweep with coordinate stabilization", bounds=bounds)


# ---------------------------------------------------------------------------
# compactness status and rule base

@dataclass(frozen=True)
class CompactStatus:
    verdict: str  # "compact" | "not-compact" | "no-verdict"
    rule: str = ""
    witness: object = None
    cover: object = None  # (description, member_fn m -> SetExpr) for negatives
    bounds: dict = field(default_factory=dict)

    @property
    def proven_compact(self):
        return self.verdict == "compact"

    @property
    def proven_not_compact(self):
        return self.verdict == "not-compact"


@dataclass(frozen=True)
class CompactRule:
    ident: str
    basis: str  # self-contained mathematical justification; empty is rejected

    def __post_init__(self):
        if not self.basis.strip():
            raise NoRuleError(f"compactness rule {self.ident} lacks a justification")


RULE_FINITE = CompactRule(
    "finite-set",
    "a finite subset of any space is compact",
)
RULE_J_SMALL_MIN = CompactRule(
    "finitely-many-finite-minima",
    "a saturated set whose finite-level minimal elements form a finite set F "
    "is the union of the upper set of F and a set of maximal elements; the "
    "first part is finitely generated and any open containing one maximal "
    "element contains all but finitely many, so both parts are compact",
)
RULE_J_BIG_MIN = CompactRule(
    "infinitely-many-finite-minima",
    "with infinitely many finite-level minimal elements x_1, x_2, ... in "
    "distinct columns, the complements of the closed down-sets of the tails "
    "{x_j : j >= m} form an open cover without a finite subcover",
)
RULE_JIA_TAIL = CompactRule(
    "infinite-maximal-tail",
    "an infinite set of maximal elements inside one block is covered by the "
    "complements of the closures of its tails, and each complement misses a "
    "tail member, so no finite subcover exists",
)


def _window_members(f: Family, s: SetExpr, w: int) -> list:
    return [e for e in f.elements_at_depth(w) if s.member(f, e)]


def _saturation_check(f: Family, s: SetExpr, w: int):
    for e in _window_members(f, s, w):
        for b in f.ups_within(e, w):
            if not s.member(f, b):
                raise NotSaturatedError(
                    f"{f.format_elem(e)} is in the set but {f.format_elem(b)} above it is not")


def compact_saturated_status(f: Family, s: SetExpr, depth: int) -> CompactStatus:
    """Rule-base compactness verdict for a saturated set, with an explicit
    cover stream on every negative; a pointwise falsifier re-checks each
    verdict's structure at the window."""
    w = sweep_window(f, s, depth)
    if w > WINDOW_CAP:
        return CompactStatus("no-verdict", bounds={"depth": depth, "window_cap": WINDOW_CAP})
    bounds = {"depth": depth, "window": w}
    _saturation_check(f, s, w)
    members = _window_members(f, s, w)
    if not members:
        raise EmptySetError("set has empty trace at the window; compactness classes are for nonempty sets")
    h = expr_horizon(f, s)

    if isinstance(f, Johnstone):  # includes the +x variant: extra points are discrete and finite
        fin_cols = sorted({f.column_of(e) for e in members if f.column_of(e) is not None})
        beyond = [c for c in fin_cols if c > h]
        if not beyond:
            minima = _johnstone_minima(f, s, fin_cols, w)
            up_f = Union(tuple(UpSet(x) for x in minima)) if minima else EMPTY
            for e in members:
                ok = up_f.member(f, e) or f.region_member("jmax", e) if not _is_xelem(e) else True
                ensure(ok, "compact-claimed set must be finite minima plus maximal elements")
            return CompactStatus("compact", rule=RULE_J_SMALL_MIN.ident,
                                 witness={"minima": [f.format_elem(x) for x in minima]}, bounds=bounds)
        cover = _johnstone_tail_cover(f, s)
        _verify_cover(f, s, cover, depth, bounds)
        return CompactStatus("not-compact", rule=RULE_J_BIG_MIN.ident,
                             witness={"columns_beyond_horizon": beyond[:3]},
                             cover=cover, bounds=bounds)

    if isinstance(f, Jia):
        stable = [e for e in members if any(c != INF and c > h for c in e)]
        if not stable:
            return CompactStatus("compact", rule=RULE_FINITE.ident,
                                 witness={"size": len(members)}, bounds=bounds)
        if any(e[2] != INF for e in stable):
            return CompactStatus("no-verdict", bounds=bounds)
        blocks = {e[0] for e in members}
        if len(blocks) != 1:
            return CompactStatus("no-verdict", bounds=bounds)
        block = blocks.pop()
        js = sorted({e[1] for e in members if e[2] == INF})
        if not any(j > h for j in js):
            return CompactStatus("no-verdict", bounds=bounds)
        cover = _jia_tail_cover(f, s, block)
        _verify_cover(f, s, cover, depth, bounds)
        return CompactStatus("not-compact", rule=RULE_JIA_TAIL.ident,
                             witness={"block": block, "tail_start": js[0]},
                             cover=cover, bounds=bounds)

    # other families: only the finite rule is available
    stable = [e for e in members if f.elem_horizon(e) > h]
    if not stable:
        return CompactStatus("compact", rule=RULE_FINITE.ident,
                             witness={"size": len(members)}, bounds=bounds)
    return CompactStatus("no-verdict", bounds=bounds)


def _is_xelem(e):
    return isinstance(e, tuple) and len(e) == 2 and e[0] == "x"


def _johnstone_minima(f: Family, s: SetExpr, fin_cols, w: int) -> list:
    out = []
    for c in fin_cols:
        for m in range(1, w + 1):
            if s.member(f, (c, m)):
                out.append((c, m))
                break
    return out


def _johnstone_tail_cover(f: Family, s: SetExpr):
    """Cover stream: the m-th member drops the down-sets of the minima in
    columns >= the m-th present one (windowed per evaluation depth)."""

    def member_expr(m: int, eval_depth: int) -> SetExpr:
        w = max(eval_depth, expr_horizon(f, s)) + WINDOW_PAD
        cols = [c for c in f.columns_within(w)
                if any(s.member(f, (c, j)) for j in range(1, w + 1))]
        minima = _johnstone_minima(f, s, cols, w)
        tail = [x for x in minima if x[0] >= m]
        if not tail:
            return FULL
        return Complement(Union(tuple(DownSet(x) for x in tail)))

    def misses(m: int):
        """A member of the set outside the m-th cover element."""
        w = max(m, expr_horizon(f, s)) + WINDOW_PAD
        cols = [c for c in f.columns_within(w)
                if any(s.member(f, (c, j)) for j in range(1, w + 1))]
        minima = [x for x in _johnstone_minima(f, s, cols, w) if x[0] >= m]
        return minima[0] if minima else None

    return {"kind": "column-tail", "member": member_expr, "misses": misses}


def _jia_tail_cover(f: Family, s: SetExpr, block: int):
    def member_expr(m: int, eval_depth: int) -> SetExpr:
        w = max(eval_depth, expr_horizon(f, s)) + WINDOW_PAD
        js = [j for j in range(m, w + 1) if s.member(f, (block, j, INF))]
        parts: list[SetExpr] = [DownSet((block, j, INF)) for j in js]
        if block > 1:
            parts.append(Region(f"block:{block - 1}"))
        if not parts:
            return FULL
        return Complement(Union(tuple(parts)))

    def misses(m: int):
        w = max(m, expr_horizon(f, s)) + WINDOW_PAD
        for j in range(m, w + 1):
            if s.member(f, (block, j, INF)):
                return (block, j, INF)
        return None

    return {"kind": "block-tail", "member": member_expr, "misses": misses}


def _verify_cover(f: Family, s: SetExpr, cover, depth: int, bounds: dict,
                  open_depth: int = 4):
    """The falsifier: cover members are Scott open, they cover the set's
    trace, and each finite prefix misses a member of the set."""
    for m in range(1, depth + 1):
        expr = cover["member"](m, depth)
        status = scott_open_status(f, expr, open_depth)
        ensure(not status.proven_not_open, f"cover member {m} must be Scott open")
    for e in _window_members(f, s, depth):
        ensure(any(cover["member"](m, depth).member(f, e) for m in range(1, depth + 2)),
               "cover must reach every member of the set at the window")
    for m in range(1, depth + 1):
        x = cover["misses"](m)
        ensure(x is not None and s.member(f, x) and not cover["member"](m, depth).member(f, x),
               "every cover prefix must miss a member of the set")


# ---------------------------------------------------------------------------
# named verification reports

def johnstone_non_wf_report(depth: int = 10, sample_members: int = 6) -> list[Verdict]:
    """The classical witness that the pair family's Scott space is not
    well-filtered: cofinite sets of maximal elements form a filtered family
    of compact saturated sets with empty intersection and no empty member."""
    f = Johnstone()
    out = []

    def g_expr(fset: tuple) -> SetExpr:
        return Inter((Region("jmax"), Complement(FiniteSet(fset))))

    samples = [tuple((n, INF) for n in range(1, k + 1)) for k in range(sample_members)]
    filtered = True
    for a in samples:
        for b in samples:
            merged = tuple(sorted(set(a) | set(b)))
            ga, gb, gm = g_expr(a), g_expr(b), g_expr(merged)
            for e in f.elements_at_depth(depth):
                if gm.member(f, e) != (ga.member(f, e) and gb.member(f, e)):
                    filtered = False
    out.append(Verdict("family-filtered", filtered,
                       detail="the member below two members is the one dropping the merged finite set",
                       bounds={"depth": depth, "members": len(samples)}))

    compact_ok = True
    for fs in samples:
        st = compact_saturated_status(f, g_expr(fs), depth)
        if not st.proven_compact:
            compact_ok = False
    out.append(Verdict("members-compact", compact_ok, bounds={"depth": depth}))

    empty_ok = True
    witness = None
    for k in range(1, depth + 1):
        for e in f.elements_at_depth(k):
            if e[1] != INF:
                continue  # finite-level elements lie outside every member
            excl = g_expr((e,))
            if excl.member(f, e):
                empty_ok = False
                witness = f.format_elem(e)
    out.append(Verdict("intersection-empty", empty_ok, witness=witness,
                       detail="each maximal element is excluded by the member dropping it; "
                              "finite-level elements lie outside every member",
                       bounds={"depth": depth}))

    nonempty_ok = True
    for fs in samples:
        w = max((x[0] for x in fs), default=0) + 1
        if not g_expr(fs).member(f, (w, INF)):
            nonempty_ok = False
    out.append(Verdict("members-nonempty", nonempty_ok, bounds={"depth": depth}))
    return out


def jia_intersection_report(depth: int = 6) -> dict:
    """Brute-force membership of the intersection of the two base upper sets,
    with the classification of its elements and the level-index discrepancy
    against the commonly displayed tail."""
    f = Jia()
    s = inter(UpSet((1, 1, 1)), UpSet((1, 2, 1)))
    members = [e for e in f.elements_at_depth(depth) if s.member(f, e)]
    only_block2_inf = all(e[0] == 2 and e[2] == INF for e in members)
    includes_first = (2, 1, INF) in members
    return {
        "members": [f.format_elem(e) for e in members],
        "all_maximal_in_block_2": only_block2_inf,
        "includes_first_column": includes_first,
        "displayed_tail_discrepancy": includes_first,
        "depth": depth,
    }
