import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramdp.accountant import (
    BudgetLedger,
    charge_ledger_file,
    init_ledger_file,
    load_ledger_file,
    new_ledger,
)
from gramdp.errors import BudgetExhausted, CorruptLedger


def test_new_ledger():
    assert new_ledger(1.0).remaining() == 1.0
    assert new_ledger(0.5).remaining() == 0.5
    for bad in (0, -1):
        with pytest.raises(ValueError):
            new_ledger(bad)


def test_charges():
    led = new_ledger(0.5)
    led.charge("a", 0.3)
    with pytest.raises(BudgetExhausted) as exc:
        led.charge("b", 0.3)
    assert exc.value.remaining == pytest.approx(0.2)
    assert len(led.charges) == 1


def test_boundary_inclusive():
    led = new_ledger(0.5)
    led.charge("all", 0.5)
    assert led.remaining() == 0.0
    led = new_ledger(0.3)
    led.charge("a", 0.1)
    led.charge("b", 0.2)
    assert led.remaining() == 0.0


def test_remaining_progression():
    led = new_ledger(1.0)
    led.charge("q", 0.25)
    assert led.remaining() == 0.75
    led.charge("r", 0.75)
    assert led.remaining() == 0.0


def test_rejects_non_positive_charge():
    with pytest.raises(ValueError):
        new_ledger(1).charge("x", 0)


def test_file_round_trip(tmp_path):
    path = tmp_path / "budget.jsonl"
    init_ledger_file(path, 1.0)
    charge_ledger_file(path, "first", 0.3)
    led = load_ledger_file(path)
    assert led.remaining() == pytest.approx(0.7)
    lines = [json.loads(x) for x in path.read_text().splitlines()]
    assert lines[0]["total_epsilon"] == 1.0
    assert set(lines[1]) == {"label", "epsilon", "ts"}
    with pytest.raises(FileExistsError):
        init_ledger_file(path, 2.0)


def test_failed_file_charge_leaves_file_unchanged(tmp_path):
    path = tmp_path / "b.jsonl"
    init_ledger_file(path, 0.5)
    charge_ledger_file(path, "a", 0.4)
    before = path.read_bytes()
    with pytest.raises(BudgetExhausted):
        charge_ledger_file(path, "b", 0.2)
    assert path.read_bytes() == before


@pytest.mark.parametrize("content", ["", "not json\n", '{"label": "x", "epsilon": 1}\n',
                                     '{"total_epsilon": 1}\n{"label": "x"}\n',
                                     '{"total_epsilon": 1}\n{"label": "x", "epsilon": 5}\n'])
def test_corrupt_files(tmp_path, content):
    path = tmp_path / "c.jsonl"
    path.write_text(content)
    with pytest.raises(CorruptLedger):
        load_ledger_file(path)
    with pytest.raises(CorruptLedger):
        load_ledger_file(tmp_path / "nope.jsonl")


@settings(max_examples=200)
@given(total=st.floats(0.01, 10), charges=st.lists(st.floats(1e-4, 5), max_size=30))
def test_ledger_invariants(total, charges):
    led = BudgetLedger(total)
    for i, eps in enumerate(charges):
        snapshot = list(led.charges)
        try:
            led.charge(str(i), eps, ts="t")
        except BudgetExhausted:
            assert led.charges == snapshot
        assert led.remaining() >= 0
        assert abs(led.remaining() + led.spent - total) <= 1e-12
