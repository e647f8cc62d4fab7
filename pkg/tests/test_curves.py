import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nncoop.curves import CSV_HEADER, CoverageCurve, curves_to_csv, read_curves_csv, write_curves_csv
from nncoop.plotting import render_svg, write_svg


def _mc(successes, trials):
    return CoverageCurve.from_counts([0.1, 1.0, 10.0][: len(successes)], successes, trials,
                                     model="nn", scheme="nsc", association="closest")


class TestCurve:
    def test_half_width(self):
        c = _mc([900, 500, 10], 1000)
        p = np.array([0.9, 0.5, 0.01])
        np.testing.assert_allclose(c.half_width, 1.96 * np.sqrt(p * (1 - p) / 1000))
        assert np.all(c.ci_low <= c.estimate) and np.all(c.estimate <= c.ci_high)

    def test_analytic_zero_width(self):
        c = CoverageCurve(np.array([1.0]), np.array([0.4]))
        assert c.half_width[0] == 0 and c.ci_low[0] == c.ci_high[0] == 0.4

    @given(k=st.integers(0, 50), n=st.integers(1, 50))
    def test_wilson_contains_estimate(self, k, n):
        k = min(k, n)
        c = _mc([k], n)
        lo, hi = c.wilson_interval()
        assert 0 <= lo[0] <= c.estimate[0] <= hi[0] <= 1

    def test_covers_uses_wilson_when_degenerate(self):
        c = _mc([0, 1000], 1000)
        assert c.covers([1e-4, 0.999]).tolist() == [True, True]
        assert c.covers([0.01, 0.9]).tolist() == [False, False]
        assert c.covers([0.0, 1.0]).tolist() == [True, True]

    def test_t_db(self):
        np.testing.assert_allclose(_mc([1, 1, 1], 2).t_db, [-10, 0, 10])


class TestCsv:
    def test_header_and_round_trip(self, tmp_path):
        a = _mc([900, 500, 10], 1000)
        b = CoverageCurve(np.array([0.1, 1.0]), np.array([0.95, 0.5]), scheme="max")
        text = curves_to_csv([a, b])
        assert text.splitlines()[0] == ",".join(CSV_HEADER)
        path = tmp_path / "c.csv"
        write_curves_csv(path, [a, b])
        rows = read_curves_csv(path)
        assert len(rows) == 5
        assert rows[0]["method"] == "mc" and rows[3]["method"] == "analytic"
        assert rows[1]["coverage"] == 0.5 and rows[4]["t_linear"] == 1.0
        assert curves_to_csv([a, b]) == text

    def test_bad_header(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_curves_csv(path)


class TestSvg:
    def test_well_formed(self, tmp_path):
        import xml.etree.ElementTree as ET

        a = _mc([900, 500, 10], 1000)
        b = CoverageCurve(np.array([0.1, 1.0, 10.0]), np.array([0.95, 0.5, 0.02]))
        svg = render_svg([("left", [a, b]), ("right", [b])])
        root = ET.fromstring(svg)
        assert root.tag.endswith("svg")
        assert svg.count("<polyline") == 3
        path = tmp_path / "f.svg"
        write_svg(path, [("only", [a])])
        ET.parse(path)
