from __future__ import annotations

import warnings

import pytest

from chromsplit.charts import FIGURES, Chart, Mark, Segment, glyph, render_ascii, render_chart, render_svg
from chromsplit.modules import InvariantFactors
from chromsplit.verify import figure_documents, golden_path


def test_glyphs():
    assert [glyph(e) for e in (None, 1, 2, 3)] == ["[]", "*", "(*)", "((*))"]


def test_empty_chart_has_axes():
    c = Chart("empty", (0, 3), (0, 2))
    text = render_ascii(c)
    assert "+" in text and "0" in text
    svg = render_svg(c)
    assert svg.startswith("<?xml") and 'version="1.1"' in svg and "<circle" not in svg


def test_rendering_is_pure():
    c = Chart("t", (0, 2), (0, 2))
    c.add_group(1, 1, InvariantFactors.parse("Z/4 + Z2"))
    c.segments.append(Segment(1, 1, 2, 2, "eta"))
    assert render_chart(c, "svg") == render_chart(c, "svg")
    assert render_ascii(c) == render_ascii(c)


def test_clipping_warns():
    c = Chart("t", (0, 1), (0, 1), marks=[Mark(5, 0, "*")])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        render_ascii(c)
    assert caught


def test_unknown_segment_kind():
    with pytest.raises(ValueError):
        Segment(0, 0, 1, 1, "zigzag")


@pytest.mark.parametrize("figure", sorted(FIGURES))
def test_golden_files(figure):
    for name, text in figure_documents(figure).items():
        assert golden_path(name).read_text() == text, name


def test_figure_2_e4_cells():
    e4 = FIGURES["fig2"]()[1]
    # L_K(1) V(0): E4 is v1^4-periodic with eta^3 = 0
    assert len(e4.cell(2, 0)) == 1
    assert e4.cell(0, 3) == []
