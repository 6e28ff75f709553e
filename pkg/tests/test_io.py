import json
from pathlib import Path

import numpy as np
import pytest
from conftest import PUBLISHED_GROUP_COUNTS
from hypothesis import given, strategies as st

from torusfit.datasets import DATASETS, dataset_text, load_dataset
from torusfit.distributions import pmf_table
from torusfit.errors import DomainError, ParseError
from torusfit.gof import PRESETS, chisq_gof
from torusfit.inference import CountTable
from torusfit.io import (
    emit_heatmap,
    fit_to_json,
    format_count_table,
    format_number,
    parse_count_table,
    parse_heatmap,
    parse_observations,
    read_count_table,
    write_count_table,
)
from torusfit.torus import COMPASS_LABELS, TorusGrid

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

TABLE_2x3 = "x2\\x1,0,1\n2,1,0\n1,4,2\n0,3,5\n"


class TestCountTable:
    def test_orientation(self):
        t = parse_count_table(TABLE_2x3)
        assert t.grid == TorusGrid(2, 3)
        # counts[k, l]: column k, row labelled l
        np.testing.assert_array_equal(t.counts, [[3, 4, 1], [5, 2, 0]])
        assert t.n == 15

    def test_explicit_shape(self):
        assert parse_count_table(TABLE_2x3, 2, 3).n == 15
        with pytest.raises(ParseError):
            parse_count_table(TABLE_2x3, 3, 3)

    @pytest.mark.parametrize("text,line", [
        ("x2\\x1,0,1\n1,1,0\n0,3\n", 3),
        ("x2\\x1,0,1\n1,1,-2\n0,3,5\n", 2),
        ("x2\\x1,0,1\n1,1,0.5\n0,3,5\n", 2),
        ("x2\\x1,0,1\n1,1,x\n0,3,5\n", 2),
        ("x2\\x1,0,1\n0,1,0\n1,3,5\n", 2),
        ("x2\\x1,1,0\n1,1,0\n0,3,5\n", 1),
    ])
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(ParseError) as exc:
            parse_count_table(text)
        assert exc.value.line == line
        assert f"line {line}" in str(exc.value)

    def test_all_zero_table(self):
        with pytest.raises(DomainError):
            parse_count_table("x2\\x1,0,1\n1,0,0\n0,0,0\n")

    def test_header_only(self):
        with pytest.raises(ParseError):
            parse_count_table("x2\\x1,0,1\n")

    @given(st.integers(1, 6), st.integers(1, 6), st.data())
    def test_roundtrip(self, m1, m2, data):
        counts = np.array(data.draw(st.lists(st.integers(0, 50), min_size=m1 * m2,
                                             max_size=m1 * m2))).reshape(m1, m2)
        counts[0, 0] += 1
        t = CountTable(TorusGrid(m1, m2), counts)
        assert parse_count_table(format_count_table(t)) == t

    def test_file_roundtrip(self, tmp_path):
        t = parse_count_table(TABLE_2x3)
        write_count_table(t, tmp_path / "t.csv")
        assert read_count_table(tmp_path / "t.csv") == t


class TestObservations:
    def test_repeated_pair(self):
        s = parse_observations("N,N\nN,N\nN,N\n")
        assert s.table.counts[0, 0] == 3
        assert s.table.n == 3
        assert s.calm_dropped == 0

    def test_calm_rows_dropped_and_counted(self):
        s = parse_observations("x1,x2\ncalm,N\nE,calm\nS,W\nC,-\n")
        assert s.calm_dropped == 3
        assert s.table.n == 1
        assert s.table.counts[8, 12] == 1

    def test_mixed_labels_and_indices(self):
        s = parse_observations("NNE,3\n7,SSE\n15,0\n")
        c = s.table.counts
        assert c[1, 3] == 1 and c[7, 7] == 1 and c[15, 0] == 1

    def test_all_compass_labels(self):
        text = "".join(f"{lab},{lab}\n" for lab in COMPASS_LABELS)
        np.testing.assert_array_equal(parse_observations(text).table.counts, np.eye(16))

    def test_unknown_label(self):
        with pytest.raises(ParseError) as exc:
            parse_observations("N,N\nN,XYZ\n")
        assert exc.value.line == 2

    def test_index_out_of_range(self):
        with pytest.raises(ParseError):
            parse_observations("N,16\n")

    def test_wrong_field_count(self):
        with pytest.raises(ParseError):
            parse_observations("N,N,N\n")

    def test_only_calm(self):
        with pytest.raises(DomainError):
            parse_observations("calm,calm\n")

    def test_integer_grid(self):
        s = parse_observations("0,1\n2,0\n", m1=3, m2=2)
        assert s.table.grid == TorusGrid(3, 2)
        with pytest.raises(ParseError):
            parse_observations("N,0\n", m1=3, m2=2)


class TestHeatmap:
    def test_uniform_2x2(self):
        from torusfit.distributions import BwgParams
        p = pmf_table(BwgParams(TorusGrid(2, 2), 0, 0, 1.0, 1.0, 0.0, 1))
        text = emit_heatmap(p)
        lines = text.strip().split("\n")
        assert lines == ["k,l,value", "0,0,0.25", "0,1,0.25", "1,0,0.25", "1,1,0.25"]

    def test_counts_and_file(self, tmp_path):
        t = parse_count_table(TABLE_2x3)
        text = emit_heatmap(t, tmp_path / "h.csv")
        assert (tmp_path / "h.csv").read_text() == text
        np.testing.assert_array_equal(parse_heatmap(text), t.counts)

    def test_roundtrip_dataset_fit(self, bgwg_fits):
        tab = pmf_table(bgwg_fits["dataset1"].params)
        back = parse_heatmap(emit_heatmap(tab))
        np.testing.assert_allclose(back, tab.p, rtol=1e-11)
        assert np.unravel_index(np.argmax(back), back.shape) == (15, 15)

    def test_bad_header(self):
        with pytest.raises(ParseError):
            parse_heatmap("a,b,c\n0,0,1\n")

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            emit_heatmap(parse_count_table(TABLE_2x3), tmp_path / "missing" / "h.csv")


class TestNumbers:
    def test_twelve_significant_digits(self):
        assert format_number(1 / 3) == "0.333333333333"
        assert format_number(977.5731234567891) == "977.573123457"
        assert format_number(np.int64(12)) == "12"

    def test_fit_json_schema(self, bgwg_fits):
        payload = json.loads(fit_to_json(bgwg_fits["dataset2"], seed=3))
        assert set(payload) >= {"family", "params", "loglik", "aic", "se", "converged",
                                "evaluations"}
        assert payload["seed"] == 3
        assert set(payload["params"]) == {"alpha", "beta", "q", "s", "rho", "delta"}
        assert payload["aic"] == pytest.approx(892.961, abs=1e-3)


@pytest.mark.parametrize("name", DATASETS)
class TestDatasets:
    def test_shape_and_provenance(self, name):
        d = load_dataset(name)
        assert d.table.grid == TorusGrid(16, 16)
        assert d.name == name
        assert "X1" in d.provenance and "X2" in d.provenance

    def test_fixture_files_match_package_data(self, name):
        assert (FIXTURES / f"{name}.csv").read_text() == dataset_text(name)

    def test_group_counts_cross_check(self, name):
        # independently transcribed grouped counts cross-foot the cell matrix
        data = load_dataset(name).table
        p = np.full((16, 16), 1 / 256)
        rep = chisq_gof(data, p, PRESETS[name], p_params=0)
        np.testing.assert_array_equal(rep.observed, PUBLISHED_GROUP_COUNTS[name])
        assert data.n == sum(PUBLISHED_GROUP_COUNTS[name])


def test_unknown_dataset():
    with pytest.raises(KeyError):
        load_dataset("dataset4")
