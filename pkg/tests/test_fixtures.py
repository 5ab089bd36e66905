import json

import pytest
from hypothesis import given
import hypothesis.strategies as st

from quinary.errors import NotFound
from quinary.fixtures import (FixtureMissing, FixtureSchemaError, RamanujanViolation, bundled_labels,
                              eisenstein_congruent, load_fixture, parse_fixture, sk_eigenvalue,
                              yoshida_eigenvalue)


def doc(**kw):
    base = {"label": "t", "level": 13, "weight": 4, "ap": {"2": -5}, "al_signs": {"13": -1},
            "source": "test"}
    base.update(kw)
    return base


def test_bundled():
    assert {"13.4.a.a", "19.6.a.a", "61.4.a.a"} <= set(bundled_labels())


def test_19_6():
    f = load_fixture("19.6.a.a")
    assert (f.level, f.weight) == (19, 6)
    assert f.ap == {2: -6, 3: 4, 5: 54}
    assert f.al_signs == {19: -1}


def test_13_4():
    f = load_fixture("13.4.a.a")
    assert f.ap == {2: -5, 3: -7, 5: -7}


def test_61_4_residue_only():
    f = load_fixture("61.4.a.a")
    assert f.ap == {}
    assert f.residue(2, 43) == 30
    # the residue gives the Saito-Kurokawa block eigenvalue -7 at p = 2
    assert sk_eigenvalue(2, f.residue(2, 43), 3) % 43 == -7 % 43
    with pytest.raises(NotFound):
        f.residue(3, 43)


def test_missing(tmp_path):
    with pytest.raises(FixtureMissing):
        load_fixture(tmp_path / "nope.json")
    with pytest.raises(FixtureMissing):
        load_fixture("99.2.a.z")


def test_schema_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(FixtureSchemaError):
        load_fixture(bad)
    with pytest.raises(FixtureSchemaError):
        parse_fixture(doc(extra=1))
    with pytest.raises(FixtureSchemaError):
        parse_fixture({k: v for k, v in doc().items() if k != "source"})
    with pytest.raises(FixtureSchemaError):
        parse_fixture(doc(ap={"4": 1}))
    with pytest.raises(FixtureSchemaError):
        parse_fixture(doc(al_signs={"13": 2}))


def test_ramanujan(tmp_path):
    # |a_2| <= 2 * 2^(3/2) ~ 5.66 for weight 4
    parse_fixture(doc(ap={"2": 5}))
    with pytest.raises(RamanujanViolation):
        parse_fixture(doc(ap={"2": 6}))
    path = tmp_path / "r.json"
    path.write_text(json.dumps(doc(ap={"3": 11})))
    with pytest.raises(RamanujanViolation):
        load_fixture(path)


def test_sk_examples():
    assert sk_eigenvalue(2, -6, 3, 0) == 0
    assert sk_eigenvalue(3, 4, 3, 0) == 16
    assert sk_eigenvalue(2, 36, 3, 0) % 43 == 42


def test_yoshida_examples():
    assert yoshida_eigenvalue(2, -5, -6, 0) == -16
    assert yoshida_eigenvalue(2, -5, -6, 0) % 7 == (-6 + 2 + 16) % 7 == 5


@given(st.integers(2, 50), st.integers(0, 4))
def test_yoshida_zero(p, b):
    assert yoshida_eigenvalue(p, 0, 0, b) == 0


def test_eisenstein_13():
    # the level 13 weight 4 form is congruent to an Eisenstein series mod 7
    assert eisenstein_congruent(load_fixture("13.4.a.a"), 7)
    assert not eisenstein_congruent(load_fixture("19.6.a.a"), 7)
