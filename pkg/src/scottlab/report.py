"""Verdict records shared by the checkers and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Verdict:
    prop: str
    holds: bool
    witness: object = None
    bounds: dict = field(default_factory=dict)
    detail: str = ""

    def to_json(self) -> dict:
        out = {"property": self.prop, "holds": self.holds, "witness": _jsonable(self.witness)}
        if self.bounds:
            out["bounds"] = dict(self.bounds)
        if self.detail:
            out["detail"] = self.detail
        return out


def _jsonable(x):
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    return repr(x)
