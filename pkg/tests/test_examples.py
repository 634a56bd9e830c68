import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_algebra

from obstructa import examples as ex
from obstructa.ainfinity import SpecError, ainfty_defect, validate_spec
from obstructa.window_homology import Window


def e2_text_with(change):
    d = json.loads(ex._data_text("e2.json"))
    change(d)
    return json.dumps(d, indent=2)


@pytest.mark.parametrize("name", ex.NAMES)
def test_every_example_builds_and_is_valid(name):
    e = ex.build(name)
    assert all(e.checks.values())
    assert validate_spec(e.algebra) == []
    assert ainfty_defect(e.algebra, Window(4, 3)).ok


def test_companions_are_attached(shipped):
    assert "file-diagonal" in shipped["E2"].bimodules
    assert "identity" in shipped["E1"].homomorphisms
    assert shipped["E3"].bounding_cochain
    assert shipped["E2"].bounding_cochain is None


def test_unknown_example_is_refused():
    with pytest.raises(SpecError, match="unknown example"):
        ex.build("E9")


@pytest.mark.parametrize("name", ex.NAMES)
def test_text_round_trip(name):
    a = ex.load_example_algebra(name)
    assert ex.dumps(ex.parse_spec(ex.dumps(a))) == ex.dumps(a)


def test_bimodule_and_homomorphism_round_trip(shipped, tmp_path):
    for spec in (shipped["E2"].bimodules["file-diagonal"], shipped["E1"].homomorphisms["identity"]):
        path = tmp_path / "spec.json"
        ex.save(spec, path)
        assert ex.dumps(ex.load(path)) == ex.dumps(spec)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_random_specs_round_trip(seed):
    a = random_algebra(random.Random(seed))
    text = ex.dumps(a)
    assert ex.dumps(ex.parse_spec(text)) == text


# located errors ------------------------------------------------------------------------

def _error(text):
    with pytest.raises(ex.SpecParseError) as info:
        ex.parse_spec(text, "t.json")
    return info.value


def test_missing_field_is_located():
    e = _error(e2_text_with(lambda d: d["basis"][1].pop("id")))
    assert "basis.1: missing field 'id'" in str(e)
    assert (e.line, e.col) == (9, 5)


def test_unknown_output_is_located():
    e = _error(e2_text_with(lambda d: d["ops"][0]["terms"][0]["out"][0].update(id="w")))
    assert 'unknown basis id "w"' in str(e) and e.line == 35


def test_bad_coefficient_is_located():
    e = _error(e2_text_with(lambda d: d["ops"][1]["terms"][0]["out"][0].update(coeff="x/y")))
    assert "expected a rational number" in str(e)


def test_gappedness_failure_names_the_class():
    e = _error(e2_text_with(lambda d: d["classes"].append({"label": "g", "energy": "0", "maslov": 2})))
    assert "class g" in str(e) and "Maslov index 0" in str(e)


def test_negative_energy_class():
    e = _error(e2_text_with(lambda d: d["classes"][1].update(energy="-1")))
    assert "class b1: negative energy" in str(e)


def test_wrong_input_length():
    e = _error(e2_text_with(lambda d: d["ops"][1].update(arity=3)))
    assert "m_3,b0: input L*L has wrong length" in str(e)


def test_json_syntax_error_is_located():
    e = _error('{"name": "x",\n  "basis": [}')
    assert (e.line, e.col) == (2, 13) and str(e).startswith("t.json:2:13:")
