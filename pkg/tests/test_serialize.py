import json
from fractions import Fraction

import pytest

from entcoh.algebra import Bimodule
from entcoh.errors import DimensionError, ParseError, ValidationError
from entcoh.fixtures import fixture, fixture_f2_bad_zeta, matrix_algebra
from entcoh.serialize import (
    SHIPPED,
    dumps_structure,
    load_structure,
    loads_structure,
    parse_rational,
    shipped,
    shipped_text,
    structure_to_dict,
)


def same(e1, e2):
    return (
        (e1.A.mult, e1.A.unit, e1.B.mult, e1.B.unit)
        == (e2.A.mult, e2.A.unit, e2.B.mult, e2.B.unit)
        and (e1.C.comult, e1.C.counit, e1.psi.psi, e1.zeta) == (e2.C.comult, e2.C.counit, e2.psi.psi, e2.zeta)
    )


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_files_match_builders(name):
    e, m = shipped(name)
    assert m is None
    assert same(e, fixture(name))
    assert shipped_text(name) == dumps_structure(fixture(name))


@pytest.mark.parametrize("name", SHIPPED)
def test_roundtrip(name):
    text = dumps_structure(fixture(name))
    e, _ = loads_structure(text)
    assert dumps_structure(e) == text


def test_bimodule_field_roundtrip():
    e = fixture("M2")
    m = Bimodule.regular(matrix_algebra(2))
    e2, m2 = loads_structure(dumps_structure(e, m))
    assert (m2.left_act, m2.right_act) == (m.left_act, m.right_act)
    assert same(e, e2)


def test_rationals():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational(5) == 5
    for bad in (0.5, True, "x", "1/0", None):
        with pytest.raises(ParseError):
            parse_rational(bad)
    doc = structure_to_dict(fixture("F1"))
    doc["multA"][0][0][0] = "1/2"
    e, _ = loads_structure(json.dumps(doc))
    assert e.A.mult[0][0][0] == Fraction(1, 2)


def test_parse_errors(tmp_path):
    with pytest.raises(ParseError, match="invalid JSON"):
        loads_structure("{not json")
    doc = structure_to_dict(fixture("F1"))
    del doc["psi"]
    with pytest.raises(ParseError, match="psi"):
        loads_structure(json.dumps(doc))
    doc = structure_to_dict(fixture("F1"))
    doc["dimA"] = 0
    with pytest.raises(ParseError):
        loads_structure(json.dumps(doc))
    doc = structure_to_dict(fixture("F1"))
    doc["unitA"] = ["1"]
    with pytest.raises(DimensionError):
        loads_structure(json.dumps(doc))
    with pytest.raises(ParseError):
        load_structure(tmp_path / "missing.json")


def test_invalid_structure_is_rejected_unless_asked(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(dumps_structure(fixture_f2_bad_zeta()))
    with pytest.raises(ValidationError, match="zeta_compatibility"):
        load_structure(p)
    e, _ = load_structure(p, validate=False)
    assert e.name == "F2-zeta-id"


def test_output_is_canonical():
    text = dumps_structure(fixture("F3"))
    assert text == json.dumps(json.loads(text), indent=1, sort_keys=True) + "\n"
