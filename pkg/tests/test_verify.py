from __future__ import annotations

import random

import pytest

from wlcompress import grid_compression as gcm
from wlcompress import verify


@pytest.mark.parametrize("name", list(verify.SUITES))
def test_quick_suites_pass(name):
    rep = verify.run_suite(name, seed=0, quick=True)
    assert rep.passed, rep.examples
    assert rep.checked > 0
    d = rep.as_dict()
    assert d["suite"] == name and d["failures"] == 0


def test_unknown_suite():
    with pytest.raises(ValueError):
        verify.run_suite("lemma99")


def test_report_records_failures():
    rep = verify.SuiteReport("x")
    rep.checked = 3
    rep.fail(("bad", 1))
    assert not rep.passed and rep.as_dict()["failures"] == 1


def test_sandwich_violations():
    assert verify.sandwich_violations(5, 4, 3) == []
    assert verify.sandwich_violations(None, None, None) == []
    assert verify.sandwich_violations(3, 4, 4) == ["cfi->pre"]
    assert verify.sandwich_violations(None, 3, 4) == ["pre->comp"]
    assert verify.sandwich_violations(None, 6, 3) == ["comp->pre+2"]
    assert verify.sandwich_violations(None, None, 3) == ["comp->pre+2"]


def test_random_cop_positions_shape():
    gc = gcm.grid(verify.toy_params())
    sets = verify.random_cop_positions(gc, random.Random(0), 50)
    assert len(sets) == 50
    for W in sets:
        assert len(W) <= gc.k and len(set(W)) == len(W)
        assert all(0 <= i < gc.k and 0 <= j < gc.J for i, j in W)


def test_exhaustive_separators_find_full_column():
    gc = gcm.grid(verify.toy_params())
    col = [(i, 100) for i in range(gc.k)]
    found = verify.exhaustive_separators(gc, col)
    assert found == [sorted(col)]
