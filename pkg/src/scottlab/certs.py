"""Certificates for the chain-ideal decomposition of a countable poset and
the tower of locally finite pieces built from them.

A certificate asserts: the non-principal ideals are exactly the down-sets of
its indexed strictly ascending chains; together with the rule-table sups they
form pieces H_n, and the leftover of the poset splits into parts T_n whose
ideals are all principal.  The tower member K_n collects the first n pieces
and leftovers; each K_n is closed under the ambient sups of its directed
subsets and its Scott topology is locally finite.  All checks are bounded by
a truncation depth and an index bound, and every report records its bounds.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import islice

from .errors import PreconditionFailedError, UnverifiedCertError, ensure
from .families import (
    BOT,
    ColumnDescriptor,
    Family,
    FiniteSet,
    SetExpr,
    classify_directed,
    column_enumeration,
    descriptor_trace,
    expr_horizon,
    extract_chain,
    nonprincipal_descriptors,
    scott_open_status,
    sweep_window,
    truncate,
)
from .poset import bits
from .report import Verdict

CHAIN_SCAN_PAD = 4


@dataclass(frozen=True)
class ChainSpec:
    """m-th link: the explicit prefix first, then the column rule shifted by
    the offset (link m maps to column position m + offset)."""

    column: object = None
    prefix: tuple = ()
    offset: int = 0

    def elem(self, f: Family, m: int):
        if m < 1:
            raise ValueError("chain positions start at 1")
        if m <= len(self.prefix):
            return self.prefix[m - 1]
        if self.column is None:
            return None
        return f.column_elem(self.column, m + self.offset)


@dataclass
class CPosetCert:
    """Chains indexed like the family's canonical columns, rule-table sups,
    and the leftover parts."""

    family: Family
    overrides: dict[int, ChainSpec] = field(default_factory=dict)
    t_parts: tuple[SetExpr, ...] = ()
    verified_depth: int = 0

    def chain_spec(self, n: int) -> ChainSpec:
        if n in self.overrides:
            return self.overrides[n]
        return ChainSpec(column=self.family.column_by_index(n))

    def chain_elem(self, n: int, m: int):
        return self.chain_spec(n).elem(self.family, m)

    def sup_of(self, n: int):
        return self.family.column_sup(self.chain_spec(n).column)

    def chain_contains(self, n: int, e) -> bool:
        spec = self.chain_spec(n)
        if e in spec.prefix:
            return True
        col = spec.column
        if col is None:
            return False
        ecol = self.family.column_of(e)
        if ecol != col:
            return False
        # position of e in its column must be reachable past the prefix
        w = self.family.elem_horizon(e) + len(spec.prefix) + CHAIN_SCAN_PAD
        return any(self.chain_elem(n, m) == e for m in range(len(spec.prefix) + 1, w + 1))

    def h_member(self, e) -> bool:
        """Membership in the union of all pieces H_n."""
        f = self.family
        col = f.column_of(e)
        if col is not None and self.chain_contains(f.column_index(col), e):
            return True
        for col in f.sup_columns_of(e):
            n = f.column_index(col)
            if self.sup_of(n) == e:
                return True
        for n, spec in self.overrides.items():
            if e in spec.prefix or self.sup_of(n) == e:
                return True
        return False

    def h_member_upto(self, e, n_bound: int) -> bool:
        """Membership in the union of the first ``n_bound`` pieces."""
        f = self.family
        col = f.column_of(e)
        if col is not None:
            n = f.column_index(col)
            if n <= n_bound and self.chain_contains(n, e):
                return True
        for col in f.sup_columns_of(e):
            n = f.column_index(col)
            if n <= n_bound and self.sup_of(n) == e:
                return True
        for n, spec in self.overrides.items():
            if n <= n_bound and (e in spec.prefix or self.sup_of(n) == e):
                return True
        return False

    def t_member(self, e, parts: int | None = None) -> bool:
        use = self.t_parts if parts is None else self.t_parts[:parts]
        return any(t.member(self.family, e) for t in use)


# ---------------------------------------------------------------------------
# certificate verification

def verify_cposet(f: Family, cert: CPosetCert, depth: int = 8,
                  n_max: int = 5) -> list[Verdict]:
    """Check the three certificate conditions on the depth-k truncation:
    (i) each non-principal ideal is the down-set of exactly one chain,
    (ii) chains ascend strictly, (iii) pieces and leftovers partition the
    poset and every leftover part has only principal ideals."""
    out = []
    descs = nonprincipal_descriptors(f, depth)
    bounds = {"depth": depth, "n_max": n_max}

    ok, witness = True, None
    seen_traces: dict[frozenset, int] = {}
    for d in descs:
        trace = frozenset(descriptor_trace(f, d.column, depth))
        chain_trace = frozenset(_chain_down_trace(f, cert, d.index, depth))
        if trace != chain_trace:
            ok, witness = False, {"descriptor": d.index,
                                  "missing": _fmt_set(f, trace - chain_trace),
                                  "extra": _fmt_set(f, chain_trace - trace)}
            break
        if trace in seen_traces:
            ok, witness = False, {"descriptor": d.index, "duplicates": seen_traces[trace]}
            break
        seen_traces[trace] = d.index
    out.append(Verdict("chains-generate-ideals", ok, witness=witness, bounds=bounds))

    ok, witness = True, None
    for d in islice(descs, n_max):
        for m in range(1, depth + 1):
            a, b = cert.chain_elem(d.index, m), cert.chain_elem(d.index, m + 1)
            if a is None or b is None or not (f.leq(a, b) and a != b):
                ok, witness = False, {"chain": d.index, "position": m}
                break
        if not ok:
            break
    for n, spec in cert.overrides.items():
        for m in range(1, max(depth, len(spec.prefix) + 1)):
            a, b = cert.chain_elem(n, m), cert.chain_elem(n, m + 1)
            if a is None or b is None or not (f._leq(a, b) and a != b):
                ok, witness = False, {"chain": n, "position": m}
                break
    out.append(Verdict("chains-strictly-ascending", ok, witness=witness, bounds=bounds))

    ok, witness = True, None
    for e in f.elements_at_depth(depth):
        h, t = cert.h_member(e), cert.t_member(e)
        if h == t:
            ok = False
            witness = {"element": f.format_elem(e),
                       "reason": "in both a piece and a leftover part" if h else "in neither"}
            break
    out.append(Verdict("pieces-and-leftovers-partition", ok, witness=witness, bounds=bounds))

    ok, witness = True, None
    for li, t in enumerate(cert.t_parts):
        v = _principal_ideals_only(f, t, depth)
        if not v.holds:
            ok, witness = False, {"part": li, "witness": v.witness}
            break
    out.append(Verdict("leftover-parts-principal", ok, witness=witness, bounds=bounds))
    return out


def cert_passes(verdicts: list[Verdict]) -> bool:
    return all(v.holds for v in verdicts)


def _chain_down_trace(f: Family, cert: CPosetCert, n: int, depth: int) -> set:
    w = depth + len(cert.chain_spec(n).prefix) + CHAIN_SCAN_PAD
    links = [cert.chain_elem(n, m) for m in range(1, w + 1)]
    links = [x for x in links if x is not None]
    return {e for e in f.elements_at_depth(depth)
            if any(f._leq(e, c) for c in links)}


def _fmt_set(f: Family, s) -> list:
    return sorted(f.format_elem(e) for e in s)


def _principal_ideals_only(f: Family, t: SetExpr, depth: int,
                           exhaustive_limit: int = 12, samples: int = 200,
                           seed: int = 0) -> Verdict:
    """Every directed subset of the part's trace has a maximum."""
    import random as _random

    trace = [e for e in f.elements_at_depth(depth) if t.member(f, e)]
    k = len(trace)
    if k == 0:
        return Verdict("principal-only", True, bounds={"depth": depth, "trace": 0})

    def directed_no_max(sub: list) -> bool:
        for a in sub:
            for b in sub:
                if not any(f._leq(a, c) and f._leq(b, c) for c in sub):
                    return False
        return not any(all(f._leq(b, c) for b in sub) for c in sub)

    if k <= exhaustive_limit:
        for mask in range(1, 1 << k):
            sub = [trace[i] for i in bits(mask)]
            if directed_no_max(sub):
                return Verdict("principal-only", False, witness=_fmt_set(f, sub),
                               bounds={"depth": depth, "mode": "exhaustive"})
        return Verdict("principal-only", True, bounds={"depth": depth, "mode": "exhaustive"})
    rng = _random.Random(seed)
    for _ in range(samples):
        sub = [e for e in trace if rng.random() < 0.3] or [trace[0]]
        if directed_no_max(sub):
            return Verdict("principal-only", False, witness=_fmt_set(f, sub),
                           bounds={"depth": depth, "mode": "sampled"})
    return Verdict("principal-only", True, bounds={"depth": depth, "mode": "sampled"})


# ---------------------------------------------------------------------------
# the tower

@dataclass(frozen=True)
class KnWitness:
    cert: CPosetCert
    n: int

    def member(self, e) -> bool:
        return (self.cert.h_member_upto(e, self.n)
                or self.cert.t_member(e, parts=self.n))

    def trace(self, depth: int) -> list:
        f = self.cert.family
        return [e for e in f.elements_at_depth(depth) if self.member(e)]


def build_kn(cert: CPosetCert, n: int) -> KnWitness:
    if n < 1:
        raise PreconditionFailedError("tower indices start at 1")
    if cert.verified_depth < 1:
        raise UnverifiedCertError("certificate must pass verification before tower use")
    return KnWitness(cert, n)


def check_kn_dsubposet(kn: KnWitness, depth: int = 8, samples: int = 100,
                       seed: int = 0) -> Verdict:
    """Directed subsets of the member whose ambient sup exists keep that sup
    inside: finite ones carry their maximum, and column-cofinal ones are the
    first n chains, whose rule sups land in the member by construction."""
    import random as _random

    f = kn.cert.family
    trace = kn.trace(depth)
    rng = _random.Random(seed)
    for _ in range(samples):
        if not trace:
            break
        t = rng.choice(trace)
        sub = [e for e in trace if f._leq(e, t) and rng.random() < 0.5] + [t]
        r = classify_directed(f, sub)
        if not (r.kind == "max" and kn.member(r.elem)):
            return Verdict("d-sub-poset", False, witness=f.format_elem(t),
                           bounds={"depth": depth})
    descs = nonprincipal_descriptors(f, depth)
    for d in descs:
        if d.index <= kn.n:
            sup = kn.cert.sup_of(d.index)
            if sup is not None and not kn.member(sup):
                return Verdict("d-sub-poset", False,
                               witness={"chain": d.index, "sup": f.format_elem(sup)},
                               bounds={"depth": depth})
        else:
            # the member's slice of a later ideal must keep a maximum, so no
            # directed subset escapes to that ideal's sup
            slice_ = [e for e in descriptor_trace(f, d.column, depth) if kn.member(e)]
            if slice_ and not any(all(f._leq(b, c) for b in slice_) for c in slice_):
                return Verdict("d-sub-poset", False,
                               witness={"chain": d.index}, bounds={"depth": depth})
    return Verdict("d-sub-poset", True, bounds={"depth": depth, "samples": samples})


def check_leftover_union_principal(cert: CPosetCert, n: int, depth: int = 8) -> Verdict:
    """Ideals of the union of the first n leftover parts are principal."""
    if not cert.t_parts:
        return Verdict("leftover-union-principal", True, bounds={"depth": depth})
    from .families import Union as _Union

    un = _Union(tuple(cert.t_parts[:n]))
    return _principal_ideals_only(cert.family, un, depth)


def check_tower_monotone_and_covering(cert: CPosetCert, depth: int = 8,
                                      n_max: int = 5) -> Verdict:
    """K_n grows with n and the tower reaches every truncation element."""
    f = cert.family
    elems = f.elements_at_depth(depth)
    for e in elems:
        for n in range(1, n_max):
            a = cert.h_member_upto(e, n) or cert.t_member(e, parts=n)
            b = cert.h_member_upto(e, n + 1) or cert.t_member(e, parts=n + 1)
            if a and not b:
                return Verdict("tower-monotone-covering", False,
                               witness={"element": f.format_elem(e), "n": n},
                               bounds={"depth": depth, "n_max": n_max})
    cover_bound = max((f.column_index(c) for c in f.columns_within(depth)), default=0)
    cover_bound = max(cover_bound, len(cert.t_parts), 1)
    for e in elems:
        if not (cert.h_member_upto(e, cover_bound) or cert.t_member(e)):
            return Verdict("tower-monotone-covering", False,
                           witness={"element": f.format_elem(e)},
                           bounds={"depth": depth, "cover_bound": cover_bound})
    return Verdict("tower-monotone-covering", True,
                   bounds={"depth": depth, "n_max": n_max, "cover_bound": cover_bound})


# ---------------------------------------------------------------------------
# relative Scott opens on a tower member

def relative_open_status(kn: KnWitness, u: SetExpr, depth: int) -> Verdict:
    """Scott openness of the trace on the member: upward closure inside it,
    and each of its chains with sup in the set must meet the set."""
    cert, f = kn.cert, kn.cert.family
    w = sweep_window(f, u, depth)
    for e in f.elements_at_depth(w):
        if not (kn.member(e) and u.member(f, e)):
            continue
        for b in f.ups_within(e, w):
            if kn.member(b) and not u.member(f, b):
                return Verdict("relative-open", False,
                               witness=(f.format_elem(e), f.format_elem(b)),
                               bounds={"depth": depth, "window": w})
    for d in nonprincipal_descriptors(f, w):
        if d.index > kn.n:
            continue
        sup = cert.sup_of(d.index)
        if sup is None or not (kn.member(sup) and u.member(f, sup)):
            continue
        if not any(u.member(f, cert.chain_elem(d.index, m))
                   for m in range(1, w + 1)):
            return Verdict("relative-open", False, witness={"chain": d.index},
                           bounds={"depth": depth, "window": w})
    return Verdict("relative-open", True, bounds={"depth": depth, "window": w})


def local_finite_basis(kn: KnWitness, x, u: SetExpr, depth: int) -> dict:
    """The finite set proving local finiteness at x inside the open trace:
    x itself plus the first chain link inside the set, per chain meeting it."""
    cert, f = kn.cert, kn.cert.family
    if not kn.member(x):
        raise PreconditionFailedError(f"{f.format_elem(x)} is not in the tower member")
    if not u.member(f, x):
        raise PreconditionFailedError(f"{f.format_elem(x)} is not in the open set")
    rel = relative_open_status(kn, u, depth)
    if not rel.holds:
        raise PreconditionFailedError(f"trace is not relatively Scott open: {rel.witness}")
    w = sweep_window(f, u, depth)
    basis = [x]
    meets = []
    for d in nonprincipal_descriptors(f, min(w, depth)):
        if d.index > kn.n:
            continue
        m_j = next((m for m in range(1, w + 1)
                    if u.member(f, cert.chain_elem(d.index, m))
                    and kn.member(cert.chain_elem(d.index, m))), None)
        if m_j is not None:
            basis.append(cert.chain_elem(d.index, m_j))
            meets.append({"chain": d.index, "first": m_j})
    up_expr = _upset_of(basis)
    for e in kn.trace(depth):
        inside = up_expr.member(f, e)
        if inside and not u.member(f, e):
            raise PreconditionFailedError("basis up-set escapes the open set")
    rel_basis = relative_open_status(kn, up_expr, depth)
    ensure(rel_basis.holds, "the basis up-set must be relatively Scott open")
    return {"basis": basis, "formatted": [f.format_elem(b) for b in basis],
            "meets": meets, "bounds": {"depth": depth, "window": w}}


def _upset_of(elems: list) -> SetExpr:
    from .families import Union as _Union, UpSet as _UpSet

    return _Union(tuple(_UpSet(e) for e in elems))


def verify_scott_trace(cert: CPosetCert, u: SetExpr, depth: int = 8,
                       n_max: int = 5) -> dict:
    """Ambient openness versus openness of every trace on the tower."""
    f = cert.family
    ambient = scott_open_status(f, u, depth)
    kns = [KnWitness(cert, n) for n in range(1, n_max + 1)]
    traces = [relative_open_status(kn, u, depth) for kn in kns]
    all_traces_open = all(t.holds for t in traces)
    if ambient.proven_open:
        consistent = all_traces_open
    elif ambient.proven_not_open:
        consistent = not all_traces_open
    else:
        consistent = True
    return {"ambient": ambient, "traces": traces,
            "equivalence_holds": consistent,
            "bounds": {"depth": depth, "n_max": n_max}}


# ---------------------------------------------------------------------------
# certificate construction

def cposet_from_countable_ideals(f: Family, depth: int = 8, n_max: int = 5) -> CPosetCert:
    """Build a certificate by extracting a strictly ascending chain from each
    non-principal ideal's canonical enumeration, reading the sups off the
    rule table, and packing leftovers into singleton parts."""
    descs = nonprincipal_descriptors(f, depth)
    overrides: dict[int, ChainSpec] = {}
    for d in descs[:max(n_max, min(len(descs), 8))]:
        spec = _extract_chain_spec(f, d)
        canonical = ChainSpec(column=d.column)
        if spec != canonical:
            overrides[d.index] = spec
        r = classify_directed(f, [f.column_elem(d.column, m) for m in (1, 2)],
                              column_cofinal=True)
        want = f.column_sup(d.column)
        ensure((r.kind == "sup" and r.elem == want) or (r.kind == "nosup" and want is None),
               "rule-table sup must match the directed-set classification")
    t_parts = []
    probe = CPosetCert(f, overrides=overrides, t_parts=())
    leftovers = [e for e in f.elements_at_depth(depth) if not probe.h_member(e)]
    for e in leftovers:
        t_parts.append(FiniteSet((e,)))
    cert = CPosetCert(f, overrides=overrides, t_parts=tuple(t_parts))
    verdicts = verify_cposet(f, cert, depth=depth, n_max=n_max)
    if not cert_passes(verdicts):
        raise UnverifiedCertError(f"constructed certificate fails: {verdicts}")
    cert.verified_depth = depth
    return cert


def _extract_chain_spec(f: Family, d: ColumnDescriptor, probe: int = 12) -> ChainSpec:
    enum = _ideal_enumeration(f, d.column)
    links = list(islice(extract_chain(f, enum, no_max=True), probe))
    # detect the column continuation: links are column elements with
    # consecutive positions after a finite prefix
    for s in range(len(links)):
        tail = links[s:]
        if all(f.column_of(x) == d.column for x in tail):
            positions = [_column_pos(f, d.column, x) for x in tail]
            if all(b == a + 1 for a, b in zip(positions, positions[1:])):
                offset = positions[0] - (s + 1)
                return ChainSpec(column=d.column, prefix=tuple(links[:s]), offset=offset)
    raise UnverifiedCertError("extracted chain does not settle into its column")


def _column_pos(f: Family, col, e) -> int:
    m = 1
    while f.column_elem(col, m) != e:
        m += 1
        if m > 10_000:
            raise UnverifiedCertError("element not found in its column")
    return m


def _ideal_enumeration(f: Family, col):
    from .families import FanLattice

    if isinstance(f, FanLattice):
        yield BOT
    yield from column_enumeration(f, col)
