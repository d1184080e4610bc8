from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given, strategies as st

from qfock.qnum import QContext
from qfock.qscalar import QPoly, QRat
from qfock.stirling import (GOLDEN_ROWS, classical_stirling2, stirling_oracle,
                            stirling_recursive, stirling_table_from_json,
                            stirling_table_render, verify_stirling)

SCHEMA = json.loads((Path(__file__).parents[1] / "docs/schemas/stirling.json").read_text())
TABLE = stirling_recursive(10)
# Bell numbers B_1..B_8 (OEIS A000110), frozen
BELL = [1, 2, 5, 15, 52, 203, 877, 4140]


def test_table_entries():
    assert TABLE.entries[(2, 2)] == QPoly([0, 1])
    assert TABLE.entries[(3, 2)] == QPoly([0, 2, 1])
    assert TABLE.entries[(4, 3)] == QPoly([0, 0, 0, 3, 2, 1])


def test_golden_rows():
    assert tuple(stirling_table_render(stirling_recursive(4)).splitlines()) == GOLDEN_ROWS


def test_single_row_table():
    assert stirling_table_render(stirling_recursive(1)) == "1"


def test_oracle_examples():
    assert stirling_oracle(1) == [QRat(1)]
    assert stirling_oracle(4) == [QRat(p) for p in TABLE.row(4)]
    assert [x(1) for x in stirling_oracle(4)] == [1, 7, 6, 1]


@pytest.mark.parametrize("n", range(1, 9))
def test_recursion_equals_oracle(n):
    assert stirling_oracle(n) == [QRat(p) for p in TABLE.row(n)]


def test_oracle_needs_room():
    with pytest.raises(ValueError):
        stirling_oracle(5, QContext.exact(8))
    with pytest.raises(ValueError):
        stirling_oracle(2, QContext.numeric(0.5))


@given(st.integers(1, 10).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_degree_and_classical_limit(nk):
    n, k = nk
    p = TABLE.entries[(n, k)]
    assert p.degree == (k - 1) * k // 2 + (n - k) * (k - 1)
    assert p(1) == classical_stirling2(n, k)
    assert all(c >= 0 and c.denominator == 1 for c in p.coeffs)


def test_bell_sums():
    for n, b in enumerate(BELL, start=1):
        assert sum(p(1) for p in TABLE.row(n)) == b


def test_q0_row_is_all_ones_first():
    # at q = 0 only S(n, 1) = 1 survives, besides S(1, 1)
    for n in range(2, 9):
        assert [p(0) for p in TABLE.row(n)] == [1] + [0] * (n - 1)


def test_json_round_trip_and_schema():
    text = stirling_table_render(TABLE, "json")
    jsonschema.validate(json.loads(text), SCHEMA)
    back = stirling_table_from_json(text)
    assert back.n_max == TABLE.n_max and back.entries == TABLE.entries


def test_render_unknown_format():
    with pytest.raises(ValueError):
        stirling_table_render(TABLE, "xml")


def test_verify_report():
    r = verify_stirling()
    assert r.holds and all(r.details["checks"].values())
