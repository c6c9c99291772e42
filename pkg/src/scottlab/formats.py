"""File formats: posets, spaces, set expressions, certificates, witnesses,
and DOT export of Hasse diagrams."""
from __future__ import annotations

import json
from pathlib import Path

from .certs import ChainSpec, CPosetCert
from .errors import ParseError
from .families import (
    Complement,
    EMPTY,
    FULL,
    Family,
    FiniteSet,
    Inter,
    Region,
    SetExpr,
    Union,
    UpSet,
    DownSet,
    family_by_name,
)
from .poset import FinPoset, bits, build_poset
from .property_r import RWitness
from .topology import FinSpace


def _read(path_or_dict) -> dict:
    if isinstance(path_or_dict, dict):
        return path_or_dict
    try:
        text = Path(path_or_dict).read_text()
    except OSError as ex:
        raise ParseError(f"cannot read {path_or_dict}: {ex}") from ex
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as ex:
        raise ParseError(f"{path_or_dict}: not a valid document: {ex}") from ex
    if not isinstance(doc, dict):
        raise ParseError(f"{path_or_dict}: expected an object at top level")
    return doc


# ---------------------------------------------------------------------------
# posets

def load_poset(src) -> FinPoset:
    """Fields: ``elements`` (names) and ``le`` (pairs); the loader applies
    the reflexive-transitive closure."""
    doc = _read(src)
    try:
        elements = doc["elements"]
        le = doc.get("le", [])
        pairs = [(a, b) for a, b in le]
    except (KeyError, TypeError, ValueError) as ex:
        raise ParseError(f"malformed poset document: {ex}") from ex
    if not isinstance(elements, list) or not all(isinstance(x, str) for x in elements):
        raise ParseError("'elements' must be a list of names")
    return build_poset(elements, pairs)


def poset_to_json(P: FinPoset) -> dict:
    """Covering pairs only; the loader's closure restores the relation."""
    return {"elements": list(P.labels),
            "le": [[P.labels[i], P.labels[j]] for i, j in P.covers()]}


def export_dot(P: FinPoset, name: str = "hasse") -> str:
    """DOT digraph of covering pairs, edges pointing lower to upper."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for lab in P.labels:
        lines.append(f'  "{lab}";')
    for i, j in P.covers():
        lines.append(f'  "{P.labels[i]}" -> "{P.labels[j]}";')
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# spaces

def space_to_json(X: FinSpace) -> dict:
    return {"points": list(X.labels),
            "opens": [[X.labels[i] for i in bits(u)] for u in X.opens]}


def load_space(src) -> FinSpace:
    doc = _read(src)
    try:
        points = doc["points"]
        opens = doc["opens"]
        idx = {p: i for i, p in enumerate(points)}
        masks = []
        for u in opens:
            m = 0
            for p in u:
                m |= 1 << idx[p]
            masks.append(m)
    except (KeyError, TypeError) as ex:
        raise ParseError(f"malformed space document: {ex}") from ex
    return FinSpace(tuple(points), tuple(sorted(set(masks))))


# ---------------------------------------------------------------------------
# set expressions

def expr_to_json(e: SetExpr, f: Family) -> dict:
    if e == FULL:
        return {"atom": "full"}
    if e == EMPTY:
        return {"atom": "empty"}
    if isinstance(e, UpSet):
        return {"atom": "upset", "elem": f.format_elem(e.elem)}
    if isinstance(e, DownSet):
        return {"atom": "downset", "elem": f.format_elem(e.elem)}
    if isinstance(e, Region):
        return {"atom": "region", "name": e.name}
    if isinstance(e, FiniteSet):
        return {"atom": "finite", "elems": [f.format_elem(x) for x in e.elems]}
    if isinstance(e, Union):
        return {"op": "union", "parts": [expr_to_json(p, f) for p in e.parts]}
    if isinstance(e, Inter):
        return {"op": "inter", "parts": [expr_to_json(p, f) for p in e.parts]}
    if isinstance(e, Complement):
        return {"op": "complement", "part": expr_to_json(e.part, f)}
    raise ParseError(f"unknown expression node {e!r}")


def expr_from_json(doc: dict, f: Family) -> SetExpr:
    try:
        if "atom" in doc:
            kind = doc["atom"]
            if kind == "full":
                return FULL
            if kind == "empty":
                return EMPTY
            if kind == "upset":
                return UpSet(f.parse_elem(doc["elem"]))
            if kind == "downset":
                return DownSet(f.parse_elem(doc["elem"]))
            if kind == "region":
                return Region(doc["name"])
            if kind == "finite":
                return FiniteSet(tuple(f.parse_elem(x) for x in doc["elems"]))
        elif "op" in doc:
            op = doc["op"]
            if op == "union":
                return Union(tuple(expr_from_json(p, f) for p in doc["parts"]))
            if op == "inter":
                return Inter(tuple(expr_from_json(p, f) for p in doc["parts"]))
            if op == "complement":
                return Complement(expr_from_json(doc["part"], f))
    except (KeyError, TypeError) as ex:
        raise ParseError(f"malformed expression: {ex}") from ex
    raise ParseError(f"malformed expression node: {doc!r}")


# ---------------------------------------------------------------------------
# certificates

def load_cert(src) -> CPosetCert:
    doc = _read(src)
    try:
        f = family_by_name(doc["family"])
        if doc.get("chains", "columns") != "columns":
            raise ParseError("only the 'columns' chain rule is supported")
        if doc.get("sups", "family-rule") != "family-rule":
            raise ParseError("only the 'family-rule' sup table is supported")
        overrides = {}
        for key, spec in doc.get("chain_overrides", {}).items():
            col = spec.get("column")
            if col is not None and isinstance(col, list):
                col = tuple(col)
            overrides[int(key)] = ChainSpec(
                column=col,
                prefix=tuple(f.parse_elem(s) for s in spec.get("prefix", [])),
                offset=int(spec.get("offset", 0)))
        t_parts = tuple(expr_from_json(t, f) for t in doc.get("t_parts", []))
    except (KeyError, TypeError, ValueError) as ex:
        raise ParseError(f"malformed certificate: {ex}") from ex
    return CPosetCert(f, overrides=overrides, t_parts=t_parts)


def cert_to_json(cert: CPosetCert) -> dict:
    f = cert.family
    doc = {"family": f.name, "chains": "columns", "sups": "family-rule",
           "t_parts": [expr_to_json(t, f) for t in cert.t_parts]}
    if cert.overrides:
        doc["chain_overrides"] = {
            str(n): {"column": list(s.column) if isinstance(s.column, tuple) else s.column,
                     "prefix": [f.format_elem(x) for x in s.prefix],
                     "offset": s.offset}
            for n, s in cert.overrides.items()}
    return doc


# ---------------------------------------------------------------------------
# witnesses

def load_witness(src) -> tuple[str, object]:
    """Returns (kind, payload): an r-failure witness or a named family
    witness descriptor."""
    doc = _read(src)
    kind = doc.get("kind", "r-failure")
    if kind == "non-wf-family":
        try:
            return kind, family_by_name(doc["family"])
        except KeyError as ex:
            raise ParseError(f"malformed witness: {ex}") from ex
    if kind != "r-failure":
        raise ParseError(f"unknown witness kind {kind!r}")
    try:
        f = family_by_name(doc["family"])
        points = doc["points"]
        if isinstance(points, list):
            points = tuple(f.parse_elem(s) for s in points)
        open_u = expr_from_json(doc["open_u"], f) if "open_u" in doc else EMPTY
        exclusion = doc.get("exclusion", "max-coordinate")
        if isinstance(exclusion, dict):
            exclusion = {f.parse_elem(k): int(v) for k, v in exclusion.items()}
    except (KeyError, TypeError) as ex:
        raise ParseError(f"malformed witness: {ex}") from ex
    return kind, RWitness(f, points=points, open_u=open_u, exclusion=exclusion)
