import pytest

from momentforge.arrangement import Circle, region_from_seed
from momentforge.errors import PreconditionError
from momentforge.fixtures import load_fixture
from momentforge.moment_map import MomentData
from momentforge.reeb_sweep import reeb_graph
from momentforge.render import FIGURE_WIDTH, dot_count, export_figure, figure_size, render_svg


def test_render_is_deterministic(planar_fixture):
    assert render_svg(planar_fixture) == render_svg(planar_fixture)


def test_disk_dots(disk):
    # 两个极点 + Reeb 图两个顶点
    assert dot_count(render_svg(disk)) == 4


def test_lens_dots(lens):
    svg = render_svg(lens, reeb_graph(lens))
    assert dot_count(svg) == 2 * (len(lens.region.boundary_poles) + len(lens.region.boundary_crossings))
    assert "V=4 E=3 b1=0" in svg


def test_overlay_toggle(disk):
    with_overlay = render_svg(disk)
    without = render_svg(disk, overlay=False)
    assert with_overlay.count("<polyline") == 2
    assert without.count("<polyline") == 1


def test_figure_size(annulus):
    width, height = figure_size(render_svg(annulus))
    assert width == FIGURE_WIDTH
    assert height > 0


def test_general_region_is_not_rendered():
    with pytest.raises(PreconditionError):
        render_svg(load_fixture("tangent", validate=False))


def test_degenerate_region_is_not_rendered():
    region = region_from_seed([Circle(1, (0, 0), 2, "inside"), Circle(2, (1, 0), 1, "outside")], (-1, 0))
    with pytest.raises(PreconditionError):
        render_svg(MomentData(region, (1, 2), (1, 1)))


def test_export_svg_pdf_png(tmp_path, annulus):
    svg = render_svg(annulus)
    export_figure(svg, str(tmp_path / "a.svg"))
    export_figure(svg, str(tmp_path / "a.pdf"))
    export_figure(svg, str(tmp_path / "a.png"), dpi=72)
    assert (tmp_path / "a.svg").read_text(encoding="utf-8") == svg
    assert (tmp_path / "a.pdf").read_bytes().startswith(b"%PDF")
    assert (tmp_path / "a.png").read_bytes().startswith(b"\x89PNG")


def test_export_rejects_unknown_extension(tmp_path, disk):
    with pytest.raises(ValueError):
        export_figure(render_svg(disk), str(tmp_path / "a.gif"))
