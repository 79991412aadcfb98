"""JSON input/output for structures, with rationals written as "p/q" strings."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from .algebra import (
    BEntwining,
    Bimodule,
    EntwiningMap,
    StructureAlgebra,
    StructureCoalgebra,
    validate_bimodule,
    validate_entwining,
)
from .errors import DimensionError, ParseError, ValidationError

SCHEMA = "entcoh-structure/1"
SHIPPED = ("F0", "F1", "F2", "F3")


def frac_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise ParseError(f"rationals must be strings or integers, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ParseError(f"not a rational number: {s!r}") from None


def _nested(data, depth: int, where: str):
    if depth == 0:
        return parse_rational(data)
    if not isinstance(data, list):
        raise ParseError(f"{where}: expected an array")
    return [_nested(x, depth - 1, where) for x in data]


def _strings(data):
    if isinstance(data, (list, tuple)):
        return [_strings(x) for x in data]
    return frac_str(data)


def _int(doc: dict, key: str) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ParseError(f"{key} must be a positive integer")
    return v


def _require(doc: dict, key: str):
    if key not in doc:
        raise ParseError(f"missing field {key!r}")
    return doc[key]


def structure_from_dict(doc: dict) -> tuple:
    """(BEntwining, Bimodule or None) from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    name = str(doc.get("name", ""))
    try:
        A = StructureAlgebra(
            _int(doc, "dimA"), _nested(_require(doc, "multA"), 3, "multA"), _nested(_require(doc, "unitA"), 1, "unitA"), "A"
        )
        B = StructureAlgebra(
            _int(doc, "dimB"), _nested(_require(doc, "multB"), 3, "multB"), _nested(_require(doc, "unitB"), 1, "unitB"), "B"
        )
        C = StructureCoalgebra(
            _int(doc, "dimC"),
            _nested(_require(doc, "comultC"), 3, "comultC"),
            _nested(_require(doc, "counitC"), 1, "counitC"),
            "C",
        )
        psi = EntwiningMap(C.dim, A.dim, _nested(_require(doc, "psi"), 4, "psi"))
        e = BEntwining(A, B, C, psi, _nested(_require(doc, "zeta"), 2, "zeta"), name=name)
        m = None
        if "M" in doc:
            md = doc["M"]
            if not isinstance(md, dict):
                raise ParseError("M must be an object")
            m = Bimodule(
                _int(md, "dimM"),
                A.dim,
                _nested(_require(md, "leftAct"), 3, "leftAct"),
                _nested(_require(md, "rightAct"), 3, "rightAct"),
                name=str(md.get("name", "M")),
            )
    except DimensionError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from None
    return e, m


def structure_to_dict(e: BEntwining, m: Optional[Bimodule] = None) -> dict:
    doc = {
        "schema": SCHEMA,
        "name": e.name,
        "dimA": e.A.dim,
        "multA": _strings(e.A.mult),
        "unitA": _strings(e.A.unit),
        "dimB": e.B.dim,
        "multB": _strings(e.B.mult),
        "unitB": _strings(e.B.unit),
        "dimC": e.C.dim,
        "comultC": _strings(e.C.comult),
        "counitC": _strings(e.C.counit),
        "psi": _strings(e.psi.psi),
        "zeta": _strings(e.zeta),
    }
    if m is not None:
        doc["M"] = {"name": m.name, "dimM": m.dim, "leftAct": _strings(m.left_act), "rightAct": _strings(m.right_act)}
    return doc


def dumps_structure(e: BEntwining, m: Optional[Bimodule] = None) -> str:
    return json.dumps(structure_to_dict(e, m), indent=1, sort_keys=True) + "\n"


def loads_structure(text: str) -> tuple:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return structure_from_dict(doc)


def load_structure(path, validate: bool = True) -> tuple:
    """Read a structure file; with ``validate`` every axiom must pass."""
    p = Path(path)
    if not p.exists() and str(path) in SHIPPED:
        text = shipped_text(str(path))
    else:
        try:
            text = p.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc}") from None
    e, m = loads_structure(text)
    if validate:
        require_valid(e, m)
    return e, m


def require_valid(e: BEntwining, m: Optional[Bimodule] = None) -> None:
    rep = validate_entwining(e)
    if not rep.passed:
        raise ValidationError(f"structure fails {rep.failures()[0].name}", rep)
    if m is not None:
        mrep = validate_bimodule(m, e.A, e)
        if not mrep.passed:
            raise ValidationError(f"bimodule fails {mrep.failures()[0].name}", mrep)


def shipped_text(name: str) -> str:
    return resources.files("entcoh").joinpath("data", f"{name}.json").read_text()


def shipped(name: str) -> tuple:
    return loads_structure(shipped_text(name))
