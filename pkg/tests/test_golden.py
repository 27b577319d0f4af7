import json

import pytest

from dvrgroups import golden, oracles


def test_every_record_names_its_oracle():
    recs = golden.load()
    assert len(recs) == len(list(golden._entries()))
    assert all(r["oracle"] for r in recs)


@pytest.mark.parametrize("op", ["invert", "level", "hensel", "el-diagonal-clearing"])
def test_cheap_records_reproduce(op):
    for query, _, thunk in golden._entries():
        if query["op"] == op:
            assert json.loads(json.dumps(thunk())) == golden.lookup(query)["value"]


def test_regenerate_to_temp_file_is_stable(tmp_path):
    out = tmp_path / "golden.json"
    golden.regenerate(out)
    assert golden.load(out) == golden.load()


def test_oracles_agree_with_closed_forms():
    assert oracles.brute_force_sl_order(2, 4) == 48
    assert oracles.order_via_gcd([12, 18], 3) == 1
    assert oracles.closure_level([0], 2, 4) is None
