import json

import numpy as np
import pytest

from hodgeheat.complex import ComplexError
from hodgeheat.generators import FAMILIES, fixtures, from_spec, random_complexes, torus
from hodgeheat.io import (complex_from_dict, complex_to_dict, dumps_complex, load_complex,
                          loads_complex, matrix_to_csv)


@pytest.mark.parametrize("cx", [*fixtures().values(), torus(), *fixtures(augmented="on").values()])
def test_round_trip(cx):
    back = loads_complex(dumps_complex(cx))
    assert back.simplices == cx.simplices
    np.testing.assert_array_equal(back.weights, cx.weights)
    assert back.augmented == cx.augmented


def test_weighted_file(tmp_path):
    path = tmp_path / "edge.json"
    path.write_text(json.dumps({"combinatorial": False, "top_simplices": [[0, 1]],
                                "weights": {"0": 1, "1": 2, "0,1": 3}}))
    cx = load_complex(path)
    assert cx.weight((1,)) == 2.0


def test_explicit_simplices_key():
    cx = complex_from_dict({"simplices": [[0], [1], [0, 1]]})
    assert len(cx) == 3


def test_augmented_override():
    cx = complex_from_dict({"top_simplices": [[0, 1]], "augmented": False}, augmented_override="on")
    assert cx.augmented


@pytest.mark.parametrize("doc, location", [
    ([], "$"),
    ({"top_simplices": [[0, 1]], "colour": 1}, "$.colour"),
    ({"top_simplices": [[0, "a"]]}, "$.top_simplices[0][1]"),
    ({"top_simplices": [[0, 0]]}, "$.top_simplices[0]"),
    ({"top_simplices": []}, "$.top_simplices"),
    ({"combinatorial": False, "top_simplices": [[0]]}, "$.weights"),
    ({"combinatorial": False, "top_simplices": [[0]], "weights": {"0": "x"}}, "$.weights['0']"),
    ({"top_simplices": [[0]], "augmented": "sometimes"}, "$.augmented"),
    ({}, "$.top_simplices"),
])
def test_errors_name_the_location(doc, location):
    with pytest.raises(ComplexError) as info:
        complex_from_dict(doc)
    assert info.value.location == location


def test_bad_json_reports_line_and_column():
    with pytest.raises(ComplexError) as info:
        loads_complex('{\n  "top_simplices": [[0, 1]\n}', "f.json")
    assert info.value.location.startswith("f.json:3:")


def test_unreadable_file(tmp_path):
    with pytest.raises(ComplexError, match="cannot read"):
        load_complex(tmp_path / "absent.json")


def test_combinatorial_output_omits_weights():
    assert "weights" not in complex_to_dict(torus())


def test_matrix_csv():
    text = matrix_to_csv(np.array([[1.0, 0.0], [-1.0, 2.0]]), ((0,), (1,)))
    lines = text.strip().splitlines()
    assert lines[0] == "row_key,col_key,value"
    assert len(lines) == 4


@pytest.mark.parametrize("tokens, size", [
    (["path", "4"], 7), (["cycle", "3", "hollow"], 6), (["cycle", "3", "filled"], 7),
    (["full-simplex", "3"], 7), (["torus"], 7 + 21 + 14), (["tree", "2", "2"], 13),
    (["grid", "2", "2"], 4 + 5 + 2), (["random-flag", "6", "0.5", "1"], None),
])
def test_generator_specs(tokens, size):
    cx = from_spec(tokens)
    if size is not None:
        assert len(cx) == size
    assert tokens[0] in FAMILIES


@pytest.mark.parametrize("tokens", [[], ["moebius"], ["path"], ["cycle", "3", "solid"]])
def test_bad_generator_specs(tokens):
    with pytest.raises(ValueError):
        from_spec(tokens)


def test_random_complexes_respect_limits():
    for cx in random_complexes(7, 10, max_simplices=60, max_dim=3):
        assert len(cx) <= 60 and cx.dim <= 3
