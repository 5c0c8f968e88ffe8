"""
图形输出模块

职责：
- 把平面区域 D、圆族、奇异点与 Reeb 图画成确定性的 SVG
  （D 灰色填充，圆描边，极点/交点为黑点，下方画 Reeb 图，顶点位于其横坐标）
- 在区域上叠加嵌入的 Poincaré-Reeb 图（经过各切片线段中点的折线）
- 通过 PyMuPDF 把 SVG 转成 PDF / PNG

同一输入两次渲染得到逐字节相同的文本：坐标统一用 "%.4f" 格式化，元素按固定顺序输出。
"""

import logging
import os
from typing import List, Optional, Sequence, Tuple

import fitz  # PyMuPDF
import numpy as np

from .arrangement import UPPER, Circle, Region
from .errors import PreconditionError
from .moment_map import MomentData
from .reeb_sweep import ReebGraph, poincare_reeb_graph_full

logger = logging.getLogger("momentforge")

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<svg width="%(width).4f" height="%(height).4f" viewBox="0 0 %(width).4f %(height).4f" version="1.1" xmlns="http://www.w3.org/2000/svg">
<rect x="0" y="0" width="%(width).4f" height="%(height).4f" style="fill:#ffffff"/>
<g transform="scale(%(scale).4f,%(scale).4f) translate(%(trans_x).4f,%(trans_y).4f)">
"""

POSTAMBLE = """\
</g>
</svg>
"""

REGION_FILL = "#b0b0b0"
OVERLAY_COLOR = "#1f4e9c"
ARC_SAMPLES = 24
FIGURE_WIDTH = 480.0


class SVG:
    """世界坐标下记录绘图命令，保存时按包围盒统一缩放平移（y 轴向下）"""

    def __init__(self, unit: float):
        self.unit = unit
        self.min_x = None
        self.max_x = None
        self.min_y = None
        self.max_y = None
        self.commands: List[str] = []

    def require(self, x: float, y: float) -> None:
        if self.min_x is None:
            self.min_x = self.max_x = x
            self.min_y = self.max_y = y
        else:
            self.min_x = min(self.min_x, x)
            self.max_x = max(self.max_x, x)
            self.min_y = min(self.min_y, y)
            self.max_y = max(self.max_y, y)

    @staticmethod
    def _points(points: Sequence[Tuple[float, float]]) -> str:
        return " ".join("%.4f,%.4f" % (x, y) for x, y in points)

    def circle(self, x: float, y: float, radius: float, stroke: str = "#000000") -> None:
        self.require(x - radius, y - radius)
        self.require(x + radius, y + radius)
        self.commands.append(
            '<circle cx="%.4f" cy="%.4f" r="%.4f" style="fill:none;stroke:%s;stroke-width:%.4f"/>'
            % (x, y, radius, stroke, self.unit)
        )

    def dot(self, x: float, y: float, color: str = "#000000") -> None:
        r = 3 * self.unit
        self.require(x - r, y - r)
        self.require(x + r, y + r)
        self.commands.append('<circle cx="%.4f" cy="%.4f" r="%.4f" style="fill:%s"/>' % (x, y, r, color))

    def line(self, points: Sequence[Tuple[float, float]], color: str = "#000000", width: float = 1.0) -> None:
        for x, y in points:
            self.require(x, y)
        self.commands.append(
            '<polyline points="%s" style="fill:none;stroke:%s;stroke-width:%.4f"/>'
            % (self._points(points), color, width * self.unit)
        )

    def polygon(self, points: Sequence[Tuple[float, float]], fill: str) -> None:
        for x, y in points:
            self.require(x, y)
        # 同色细描边盖住相邻切片多边形之间的缝
        self.commands.append(
            '<polygon points="%s" style="fill:%s;stroke:%s;stroke-width:%.4f"/>'
            % (self._points(points), fill, fill, 0.5 * self.unit)
        )

    def text(self, x: float, y: float, text: str, color: str = "#444444") -> None:
        size = 10 * self.unit
        self.require(x, y - size)
        self.require(x + len(text) * size * 0.6, y)
        self.commands.append(
            '<text x="%.4f" y="%.4f" fill="%s" font-size="%.4f" font-family="monospace">%s</text>'
            % (x, y, color, size, text)
        )

    def to_text(self) -> str:
        if self.min_x is None:
            self.require(0.0, 0.0)
        pad = max(self.max_x - self.min_x, self.max_y - self.min_y, 1e-9) * 0.05
        world_w = self.max_x - self.min_x + 2 * pad
        world_h = self.max_y - self.min_y + 2 * pad
        scale = FIGURE_WIDTH / world_w
        values = {
            "width": FIGURE_WIDTH,
            "height": world_h * scale,
            "scale": scale,
            "trans_x": -self.min_x + pad,
            "trans_y": -self.min_y + pad,
        }
        return PREAMBLE % values + "\n".join(self.commands) + "\n" + POSTAMBLE


def _arc_samples(c: Circle, branch: str, lo: float, hi: float) -> np.ndarray:
    cx, cy, r = float(c.center[0]), float(c.center[1]), float(c.radius)
    xs = np.linspace(lo, hi, ARC_SAMPLES)
    root = np.sqrt(np.clip(r * r - (xs - cx) ** 2, 0.0, None))
    return np.column_stack([xs, cy + root if branch == UPPER else cy - root])


def _region_polygons(region: Region) -> List[List[Tuple[float, float]]]:
    """种子分支中每条切片线段对应的多边形（下弧从左到右，上弧从右到左）"""
    dec = region.decomposition
    polygons = []
    for seg in region.seed_segments():
        slab = dec.slabs[seg.slab]
        if slab.lo is None or slab.hi is None or seg.lower is None or seg.upper is None:
            continue
        lo, hi = float(slab.lo), float(slab.hi)
        lower = _arc_samples(region.circle(seg.lower[0]), seg.lower[1], lo, hi)
        upper = _arc_samples(region.circle(seg.upper[0]), seg.upper[1], lo, hi)[::-1]
        polygons.append([(x, -y) for x, y in np.vstack([lower, upper]).tolist()])
    return polygons


def _graph_offset(region: Region, unit: float) -> float:
    (_, ylo), (_, yhi) = region.box
    return float(yhi - ylo) * 0.5 + 20 * unit


def render_svg(d: MomentData, g: Optional[ReebGraph] = None, overlay: bool = True) -> str:
    """
    渲染区域与 Reeb 图。

    Args:
        d: 平面数据
        g: 要画的 Reeb 图；None 时画区域的 Poincaré-Reeb 图
        overlay: 是否在区域上叠加嵌入的图

    Returns:
        SVG 文本

    Raises:
        PreconditionError: 非平面数据或区域退化
    """
    region = d.region
    if not isinstance(region, Region):
        raise PreconditionError("only planar circle data can be rendered")
    if region.decomposition is None:
        raise PreconditionError("degenerate region (tangent circles) cannot be rendered")
    if g is None:
        g = poincare_reeb_graph_full(region)

    (xlo, ylo), (xhi, yhi) = region.box
    unit = max(float(xhi - xlo), float(yhi - ylo)) / 400.0
    svg = SVG(unit)

    for poly in _region_polygons(region):
        svg.polygon(poly, REGION_FILL)
    for c in region.circles:
        svg.circle(float(c.center[0]), -float(c.center[1]), float(c.radius))
    for p in region.boundary_poles:
        svg.dot(float(p.point[0]), -float(p.point[1]))
    for cp in region.boundary_crossings:
        svg.dot(float(cp.x), -float(cp.y))

    if overlay:
        for e in g.edges:
            svg.line([(x, -y) for x, y in e.path], OVERLAY_COLOR, 0.75)

    # 下方面板：顶点在各自横坐标处，边经过路径的平均高度弯折，平行边因此分开
    base = -float(ylo) + _graph_offset(region, unit)
    squash = 0.5
    vertex_pos = {v.id: (float(v.x), base - squash * float(v.y)) for v in g.vertices}
    for e in g.edges:
        (x1, y1), (x2, y2) = vertex_pos[e.u], vertex_pos[e.v]
        inner = e.path[1:-1] or e.path
        mid_y = base - squash * float(np.mean([y for _, y in inner]))
        svg.line([(x1, y1), (0.5 * (x1 + x2), mid_y), (x2, y2)])
    for v in g.vertices:
        svg.dot(*vertex_pos[v.id])

    svg.text(float(xlo), base + 18 * unit,
             f"V={len(g.vertices)} E={len(g.edges)} b1={g.betti1}")
    return svg.to_text()


def export_figure(svg_text: str, file_path: str, dpi: int = 150) -> None:
    """
    SVG 文本 → .svg / .pdf / .png 文件。

    Raises:
        ValueError: 不支持的扩展名
    """
    ext = os.path.splitext(file_path)[1].lower()
    if ext == ".svg":
        with open(file_path, "w", encoding="utf-8") as f:
            f.write(svg_text)
    elif ext in (".pdf", ".png"):
        doc = fitz.open(stream=svg_text.encode("utf-8"), filetype="svg")
        try:
            if ext == ".pdf":
                with open(file_path, "wb") as f:
                    f.write(doc.convert_to_pdf())
            else:
                doc.load_page(0).get_pixmap(dpi=dpi).save(file_path)
        finally:
            doc.close()
    else:
        raise ValueError(f"Unsupported figure format: {ext}")
    logger.info(f"Wrote figure: {file_path}")


def figure_size(svg_text: str) -> Tuple[float, float]:
    """SVG 根元素的宽高（测试与报告用）"""
    head = svg_text.split("<svg", 1)[1]
    width = float(head.split('width="', 1)[1].split('"', 1)[0])
    height = float(head.split('height="', 1)[1].split('"', 1)[0])
    return width, height


def dot_count(svg_text: str) -> int:
    return sum(1 for line in svg_text.splitlines() if line.startswith("<circle") and "fill:#000000" in line)
