from decimal import Decimal

import pytest

from interoplab import jsonutil


def test_loads_numbers_become_decimal():
    doc = jsonutil.loads('{"a": 0.10, "b": 3, "c": [1.5e2]}')
    assert doc["a"] == Decimal("0.10")
    assert str(doc["a"]) == "0.10"
    assert doc["b"] == Decimal(3)
    assert doc["c"][0] == Decimal("150")


def test_loads_rejects_duplicate_keys():
    with pytest.raises(jsonutil.DuplicateKeyError):
        jsonutil.loads('{"x": 1, "x": 2}')


def test_dumps_preserves_digit_strings():
    doc = {"area": Decimal("0.0921547167479482"), "trail": Decimal("1.200")}
    text = jsonutil.dumps(doc)
    assert '"area": 0.0921547167479482' in text
    assert '"trail": 1.200' in text


def test_round_trip_is_exact():
    text = '{\n  "v": 52.330802,\n  "w": [\n    10.16014,\n    0.10\n  ]\n}'
    doc = jsonutil.loads(text)
    assert jsonutil.dumps(doc) == text


def test_dumps_scalars_and_containers():
    doc = {"t": True, "f": False, "n": None, "s": "x\"y", "empty_obj": {}, "empty_arr": []}
    text = jsonutil.dumps(doc)
    assert '"t": true' in text and '"f": false' in text and '"n": null' in text
    assert '"s": "x\\"y"' in text
    assert '"empty_obj": {}' in text and '"empty_arr": []' in text
    assert jsonutil.loads(text) == {
        "t": True, "f": False, "n": None, "s": 'x"y', "empty_obj": {}, "empty_arr": [],
    }


def test_dumps_refuses_floats():
    with pytest.raises(TypeError):
        jsonutil.dumps({"bad": 0.1})
