"""Command-line surface: check finite posets, sweep corpora, explore the
named countable families at a chosen depth, verify certificates and
witnesses, and export reports and Hasse diagrams.

Exit codes: 0 all requested properties hold, 1 a property failed,
2 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import certs as certs_mod
from . import families as fam_mod
from . import property_r as pr
from . import topology as topo
from .errors import ParseError, ScottLabError, SizeTooLargeError
from .formats import (
    cert_to_json,
    export_dot,
    load_cert,
    load_poset,
    load_witness,
    poset_to_json,
    space_to_json,
)
from .poset import EXHAUSTIVE_SIZE_CAP, FinPoset, corpus
from .report import Verdict

ASSETS = Path(__file__).parent / "assets"


def _size_cap() -> int:
    override = os.environ.get("SCOTTLAB_MAX_SIZE")
    return int(override) if override else EXHAUSTIVE_SIZE_CAP


# ---------------------------------------------------------------------------
# property registry

def _flag_check(name):
    def run(P: FinPoset) -> Verdict:
        X = topo.derive_topology(P, "scott")
        flags = topo.classify_space(X)
        return Verdict(name, flags[name.replace("-", "_")])

    return run


def _check_sober(P):
    return topo.is_sober(topo.derive_topology(P, "scott"))


def _check_wf(P):
    return topo.is_well_filtered(topo.derive_topology(P, "scott"))


def _check_coherent(P):
    return Verdict("coherent", topo.is_coherent(topo.derive_topology(P, "scott")))


def _check_product_eq(P):
    r = topo.compare_product_topologies(P, P)
    detail = f"{r.scott_opens} opens" if r.scott_opens is not None else r.mode
    return Verdict("product-eq", r.equal, witness=r.witness, detail=detail)


def _check_omega_star(P):
    return pr.omega_star_compact_check(topo.derive_topology(P, "scott"))


def _check_pipeline(P):
    rep = pr.sober_pipeline(P)
    holds = rep["sober"] and rep["irreducible_closed_directed"]
    return Verdict("pipeline", holds, detail=json.dumps(rep))


def _check_chain(P):
    rep = pr.implication_chain_check(P)
    return Verdict("implication-chain", all(rep.values()), detail=json.dumps(rep))


CHECKS = {
    "sober": _check_sober,
    "wf": _check_wf,
    "coherent": _check_coherent,
    "propR": lambda P: pr.has_property_r(P),
    "product-eq": _check_product_eq,
    "omega-star": _check_omega_star,
    "pipeline": _check_pipeline,
    "chain": _check_chain,
    "c-space": _flag_check("c_space"),
    "core-compact": _flag_check("core_compact"),
    "locally-finite": _flag_check("locally_finite"),
    "locally-hypercompact": _flag_check("locally_hypercompact"),
    "d-space": _flag_check("d_space"),
    "upper-semicompact": _flag_check("upper_semicompact"),
}

DEFAULT_CHECKS = ("sober", "wf", "coherent", "core-compact", "upper-semicompact", "propR")


# ---------------------------------------------------------------------------
# rendering

def _emit(doc, as_json: bool):
    if as_json:
        print(json.dumps(doc, indent=2, default=str))
        return
    for entry in doc if isinstance(doc, list) else [doc]:
        if isinstance(entry, dict) and "property" in entry:
            mark = "PASS" if entry.get("holds") else "FAIL"
            extra = ""
            if entry.get("witness") not in (None, []):
                extra += f"  witness={entry['witness']}"
            if entry.get("bounds"):
                extra += f"  bounds={entry['bounds']}"
            if entry.get("detail"):
                extra += f"  {entry['detail']}"
            print(f"{entry['property']:32s} {mark}{extra}")
        else:
            print(json.dumps(entry, default=str))


def _verdicts_doc(verdicts: list[Verdict]) -> list[dict]:
    return [v.to_json() for v in verdicts]


# ---------------------------------------------------------------------------
# commands

def cmd_check(args) -> int:
    P = load_poset(args.file)
    names = [p.strip() for p in args.props.split(",") if p.strip()]
    verdicts = []
    for name in names:
        if name not in CHECKS:
            raise ParseError(f"unknown property {name!r}; known: {', '.join(sorted(CHECKS))}")
        verdicts.append(CHECKS[name](P))
    _emit(_verdicts_doc(verdicts), args.json)
    return 0 if all(v.holds for v in verdicts) else 1


FACTS = {
    ("johnstone", "k-formula"),
    ("johnstone", "non-wf-witness"),
    ("johnstone", "ideals-countable"),
    ("johnstone", "r-failure"),
    ("jia", "intersection"),
    ("jia", "not-coherent"),
    ("jia", "ideals-countable"),
    ("jia", "classify"),
    ("jia", "r-failure"),
    ("l428", "ideals-countable"),
    ("nchain", "ideals-countable"),
    ("flat", "ideals-countable"),
    ("johnstone+x", "ideals-countable"),
}


def cmd_family(args) -> int:
    f = fam_mod.family_by_name(args.name)
    base = f.name.split(":")[0].split("+x")[0] + ("+x" if "+x" in f.name else "")
    if (base, args.fact) not in FACTS:
        raise ParseError(f"unknown fact {args.fact!r} for family {f.name}")
    depth = args.depth
    verdicts: list = []

    if args.fact == "ideals-countable":
        descs = fam_mod.nonprincipal_descriptors(f, depth)
        verdicts.append(fam_mod.validate_descriptor_completeness(
            f, min(depth, 3), samples=args.samples, seed=args.seed))
        if depth > 3:
            verdicts.append(fam_mod.validate_descriptor_completeness(
                f, depth, samples=args.samples, seed=args.seed))
        doc = _verdicts_doc(verdicts)
        doc.append({"descriptors_at_depth": len(descs),
                    "shape": "principal ideals plus one chain ideal per column"})
        _emit(doc, args.json)
    elif args.fact == "k-formula":
        doc = _johnstone_k_formula_report(f, depth)
        verdicts = [Verdict("k-formula", doc["holds"])]
        _emit(doc, args.json)
    elif args.fact == "non-wf-witness":
        verdicts = fam_mod.johnstone_non_wf_report(depth)
        _emit(_verdicts_doc(verdicts), args.json)
    elif args.fact == "r-failure":
        kind, witness = load_witness(ASSETS / f"witness_{base}.json")
        rep = pr.verify_r_failure(witness, max_subfamily=args.subfamily, depth=depth)
        verdicts = [Verdict("r-failure-certified", rep["certified"],
                            witness=rep.get("witness"), bounds=rep["bounds"])]
        _emit(_verdicts_doc(verdicts), args.json)
    elif args.fact == "intersection":
        rep = fam_mod.jia_intersection_report(depth)
        verdicts = [Verdict("intersection-all-maximal-in-block-2",
                            rep["all_maximal_in_block_2"])]
        _emit(rep, args.json)
        if rep["displayed_tail_discrepancy"] and not args.json:
            print("note: the first column's maximal element belongs to the "
                  "intersection; displays that start the tail one step later "
                  "disagree with the order rule")
    elif args.fact == "not-coherent":
        s = fam_mod.inter(fam_mod.UpSet((1, 1, 1)), fam_mod.UpSet((1, 2, 1)))
        st = fam_mod.compact_saturated_status(f, s, depth)
        verdicts = [Verdict("intersection-not-compact", st.proven_not_compact,
                            detail=st.rule, bounds=st.bounds)]
        _emit(_verdicts_doc(verdicts), args.json)
    elif args.fact == "classify":
        verdicts = [_jia_classify_report(f, depth, args.samples, args.seed)]
        _emit(_verdicts_doc(verdicts), args.json)
    return 0 if all(v.holds for v in verdicts) else 1


def _johnstone_k_formula_report(f, depth) -> dict:
    """Spot-validate the compactness rule base: finitely generated upper
    sets and sets of maximal elements are compact, everything with
    infinitely many finite-level minima is not."""
    cases = [
        (fam_mod.union(fam_mod.UpSet((1, 1)), fam_mod.UpSet((2, 2))), True),
        (fam_mod.Region("jmax"), True),
        (fam_mod.Region("jmax-even"), True),
        (fam_mod.UpSet((3, 2)), True),
        (fam_mod.FULL, False),
    ]
    results = []
    ok = True
    for expr, expected in cases:
        st = fam_mod.compact_saturated_status(f, expr, depth)
        good = st.proven_compact if expected else st.proven_not_compact
        ok = ok and good
        results.append({"expected_compact": expected, "verdict": st.verdict,
                        "rule": st.rule, "ok": good})
    return {"holds": ok, "cases": results, "depth": depth}


def _jia_classify_report(f, depth, samples, seed) -> Verdict:
    """Random directed subsets of the truncation: the classifier's maximum
    agrees with the brute-force least upper bound."""
    tr = fam_mod.truncate(f, depth)
    P = tr.poset
    rng = random.Random(seed)
    from .poset import bits as _bits

    for _ in range(samples):
        t = rng.randrange(P.n)
        mask = 1 << t
        for i in _bits(P.down[t]):
            if rng.random() < 0.4:
                mask |= 1 << i
        sub = [tr.elems[i] for i in _bits(mask)]
        r = fam_mod.classify_directed(f, sub)
        brute = P.directed_sup(mask)
        if not (r.kind == "max" and tr.elems[brute] == r.elem):
            return Verdict("classify-vs-brute-force", False,
                           witness=P.labels_of_mask(mask),
                           bounds={"depth": depth, "samples": samples})
    return Verdict("classify-vs-brute-force", True,
                   bounds={"depth": depth, "samples": samples})


def _corpus_check_one(item):
    P, names = item
    failures = []
    for name in names:
        v = CHECKS[name](P)
        if not v.holds:
            failures.append((name, v.witness))
    return failures


def cmd_corpus(args) -> int:
    names = [p.strip() for p in args.checks.split(",") if p.strip()]
    for name in names:
        if name not in CHECKS:
            raise ParseError(f"unknown property {name!r}")
    t0 = time.time()
    posets = corpus(args.size, args.mode, seed=args.seed, count=args.count,
                    size_cap=_size_cap())
    work = [(P, names) for P in posets]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_corpus_check_one, work))
    else:
        results = [_corpus_check_one(w) for w in work]
    failures = [(i, f) for i, f in enumerate(results) if f]
    doc = {"size": args.size, "mode": args.mode, "posets": len(posets),
           "checks": names, "failures": len(failures),
           "failing": [{"poset": i, "checks": [c for c, _ in f]} for i, f in failures[:10]],
           "seconds": round(time.time() - t0, 2)}
    _emit(doc, args.json)
    return 0 if not failures else 1


def cmd_cert(args) -> int:
    cert = load_cert(args.file)
    f = cert.family
    verdicts = certs_mod.verify_cposet(f, cert, depth=args.depth, n_max=args.nmax)
    ok = certs_mod.cert_passes(verdicts)
    if ok:
        cert.verified_depth = args.depth
        for n in range(1, args.nmax + 1):
            kn = certs_mod.build_kn(cert, n)
            verdicts.append(certs_mod.check_kn_dsubposet(kn, depth=args.depth))
            verdicts.append(certs_mod.check_leftover_union_principal(cert, n, depth=args.depth))
        verdicts.append(certs_mod.check_tower_monotone_and_covering(
            cert, depth=args.depth, n_max=args.nmax))
    _emit(_verdicts_doc(verdicts), args.json)
    return 0 if all(v.holds for v in verdicts) else 1


def cmd_witness(args) -> int:
    kind, payload = load_witness(args.file)
    if kind == "non-wf-family":
        verdicts = fam_mod.johnstone_non_wf_report(args.depth)
        _emit(_verdicts_doc(verdicts), args.json)
        return 0 if all(v.holds for v in verdicts) else 1
    rep = pr.verify_r_failure(payload, max_subfamily=args.subfamily, depth=args.depth)
    v = Verdict("r-failure-certified", rep["certified"], witness=rep.get("witness"),
                bounds=rep["bounds"])
    _emit(_verdicts_doc([v]), args.json)
    return 0 if rep["certified"] else 1


def cmd_export(args) -> int:
    if args.family:
        f = fam_mod.family_by_name(args.family)
        tr = fam_mod.truncate(f, args.depth)
        P = tr.poset
    else:
        P = load_poset(args.file)
    if args.dot:
        Path(args.dot).write_text(export_dot(P))
        print(f"wrote {args.dot}")
        return 0
    if args.space:
        X = topo.derive_topology(P, args.space)
        _emit(space_to_json(X), args.json)
        return 0
    _emit(poset_to_json(P), args.json)
    return 0


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scottlab",
                                 description="order-topology workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="structured output")
        p.add_argument("--depth", type=int, default=8, help="truncation depth")
        p.add_argument("--nmax", type=int, default=5, help="tower index bound")
        p.add_argument("--subfamily", type=int, default=5, help="subfamily size bound")
        p.add_argument("--seed", type=int, default=0, help="sampling seed")
        p.add_argument("--samples", type=int, default=200, help="sample count")

    p = sub.add_parser("check", help="check properties of a poset file")
    p.add_argument("file")
    p.add_argument("--props", default=",".join(DEFAULT_CHECKS))
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("family", help="verify a named fact about a family")
    p.add_argument("name")
    p.add_argument("fact")
    common(p)
    p.set_defaults(fn=cmd_family)

    p = sub.add_parser("corpus", help="sweep a corpus of finite posets")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--checks", default=",".join(DEFAULT_CHECKS))
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(fn=cmd_corpus)

    p = sub.add_parser("cert", help="verify a chain-ideal certificate")
    p.add_argument("file")
    common(p)
    p.set_defaults(fn=cmd_cert)

    p = sub.add_parser("witness", help="verify a failure witness")
    p.add_argument("file")
    common(p)
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("export", help="export posets, spaces, and diagrams")
    p.add_argument("file", nargs="?")
    p.add_argument("--family")
    p.add_argument("--space", choices=topo.TOPOLOGY_KINDS)
    p.add_argument("--dot")
    common(p)
    p.set_defaults(fn=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, SizeTooLargeError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2
    except ScottLabError as ex:
        print(f"error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
