"""Pydantic schemas for input documents and reports."""

import pytest

from mkit.core.errors import MalformedInputError
from mkit.core.validation import parse_input, validate_output


def test_valid_inputs():
    parse_input({"terms": [{"e": [1, 0], "c": "-1/2"}]}, 'poly')
    parse_input({"dxdy": {"terms": []}}, 'two_form')
    parse_input({"c": ["1", "5/7"]}, 'series')
    parse_input({"alpha": {"dx": {"terms": []}, "dy": {"terms": []}}, "f": {"terms": []}}, 'germ')


@pytest.mark.parametrize("data,kind", [
    ({"terms": [{"e": [-1, 0], "c": "1"}]}, 'poly'),
    ({"terms": [{"e": [1, 0], "c": "0.5"}]}, 'poly'),
    ({"dx": {"terms": []}}, 'two_form'),
    ({"c": []}, 'series'),
    ({"c": ["1", "x"]}, 'series'),
    ({"alpha": {"dx": {"terms": []}, "dy": {"terms": []}}}, 'germ'),
])
def test_invalid_inputs(data, kind):
    with pytest.raises(MalformedInputError):
        parse_input(data, kind, "fixture")


def test_report_validation():
    report = {"command": "milnor", "input": {}, "mu": 4, "mu1": 2, "mu0": 2,
              "basis": [[0, 0], [1, 0], [0, 1], [1, 1]], "engine": {"mu": 4}}
    assert validate_output(report, 'milnor', 'fixture')
    assert not validate_output(dict(report, mu=-1), 'milnor', 'fixture')
    assert not validate_output(report, 'plot', 'fixture')


def test_classification_alias():
    report = {"command": "classify", "input": {}, "class": "LNF2", "sign": "-1",
              "conditions": {"martinet": True}}
    assert validate_output(report, 'classify', 'fixture')
    assert not validate_output(dict(report, **{"class": "LNF9"}), 'classify', 'fixture')
