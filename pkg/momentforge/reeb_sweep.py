"""
Reeb 图模块（n = 2）

职责：
- 从区域的切片分解读出含种子分支的 Poincaré-Reeb 图
- 每条边由其线段的 (下弧, 上弧) 标签给出纤维类型，得到复合函数 f0 的 Reeb 图
- 奇异横坐标列表、JSON 与 DOT 文本输出

纤维不连通（某组维数为 0）时 Reeb 图的边不再对应线段，直接拒绝。
"""

import logging
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Dict, List, Optional, Tuple, Union

from .arrangement import Arc, CrossingPoint, Pole, Region
from .errors import (
    DegenerateRegionError,
    DisconnectedFiberError,
    GenericityError,
    PreconditionError,
)
from .exact_arith import Ordering, QuadExt, quad_cmp
from .graph_ops import MultiGraph, betti1
from .moment_map import FiberClass, MomentData

logger = logging.getLogger("momentforge")

VERTEX_KINDS = ("pole_extremum", "pole_branch", "crossing")


@dataclass(frozen=True)
class ReebVertex:
    id: int
    x: QuadExt
    y: QuadExt
    kind: str
    source: Union[Pole, CrossingPoint]
    degree: int


@dataclass(frozen=True)
class ReebEdge:
    id: int
    u: int
    v: int
    fiber: Optional[FiberClass]
    segment_label: Tuple[Optional[Arc], Optional[Arc]]
    path: Tuple[Tuple[float, float], ...] = ()


@dataclass(frozen=True)
class ReebGraph:
    """顶点按横坐标排序编号；边 (u, v) 中 u 为左端点"""

    vertices: Tuple[ReebVertex, ...]
    edges: Tuple[ReebEdge, ...]

    def to_multigraph(self) -> MultiGraph:
        return MultiGraph(
            tuple(v.id for v in self.vertices),
            tuple((e.u, e.v) for e in self.edges),
            tuple(float(v.x) for v in self.vertices),
        )

    @property
    def betti1(self) -> int:
        return betti1(self.to_multigraph())

    def to_dict(self) -> Dict:
        return {
            "vertices": [
                {
                    "id": v.id,
                    "x_exact": str(v.x),
                    "x_decimal": v.x.to_decimal(12),
                    "kind": v.kind,
                    "degree": v.degree,
                    "source": v.source.to_dict(),
                }
                for v in self.vertices
            ],
            "edges": [
                {
                    "id": e.id,
                    "u": e.u,
                    "v": e.v,
                    "fiber": e.fiber.to_list() if e.fiber is not None else None,
                    "segment_label": [_arc_text(e.segment_label[0]), _arc_text(e.segment_label[1])],
                }
                for e in self.edges
            ],
        }

    def to_dot(self, name: str = "reeb") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            lines.append(f'  {v.id} [label="{v.kind} x={v.x.to_decimal(6)}"];')
        for e in self.edges:
            label = str(e.fiber) if e.fiber is not None else ""
            lines.append(f'  {e.u} -- {e.v} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _arc_text(arc: Optional[Arc]) -> Optional[str]:
    return None if arc is None else f"{arc[0]}:{arc[1]}"


def segment_fiber_class(d: MomentData, lower: Arc, upper: Arc) -> FiberClass:
    """
    线段上方原像的纤维类型。

    两端在同一组 i：[m(i)+1] + 其余各组；分属 i1 ≠ i2：[m(i1)+m(i2)+1] + 其余各组。
    """
    if lower is None or upper is None:
        raise PreconditionError("segment must be bounded by two arcs")
    g1, g2 = d.group_of(lower[0]), d.group_of(upper[0])
    dims = d.dim_map
    if g1 == g2:
        head = [dims[g1 - 1] + 1]
        rest = [m for i, m in enumerate(dims, 1) if i != g1]
    else:
        head = [dims[g1 - 1] + dims[g2 - 1] + 1]
        rest = [m for i, m in enumerate(dims, 1) if i not in (g1, g2)]
    return FiberClass(tuple(head + rest))


def _planar_region(d_or_region) -> Region:
    region = d_or_region.region if isinstance(d_or_region, MomentData) else d_or_region
    if not isinstance(region, Region):
        raise PreconditionError("Reeb graphs are computed for planar circle data only")
    if region.decomposition is None:
        raise DegenerateRegionError("region is degenerate (tangent circles); no sweep is available")
    return region


def singular_x_values(d: MomentData) -> List[QuadExt]:
    """
    闭包中全部竖直极点与交点的横坐标（严格递增）。

    Raises:
        GenericityError: 存在相同横坐标
    """
    region = _planar_region(d)
    xs = [QuadExt(p.point[0]) for p in region.boundary_poles] + [cp.x for cp in region.boundary_crossings]
    xs.sort(key=cmp_to_key(lambda a, b: int(quad_cmp(a, b))))
    for a, b in zip(xs, xs[1:]):
        if quad_cmp(a, b) is Ordering.EQ:
            raise GenericityError(f"two singular points share x = {a}")
    return xs


def _build(region: Region, d: Optional[MomentData]) -> ReebGraph:
    dec = region.decomposition
    comp = region.seed_component
    sweep_vertices = dec.component_vertices(comp)
    idmap = {v.id: k for k, v in enumerate(sweep_vertices)}

    pole_lookup = {(p.circle, p.side): p for p in region.poles}
    crossing_lookup = {(cp.circles, cp.x, cp.y): cp for cp in region.crossings}

    vertices = []
    for v in sweep_vertices:
        primary = v.events[0]
        if primary.kind == "pole":
            source = pole_lookup[(primary.circles[0], primary.side)]
            kind = "pole_extremum" if v.degree == 1 else "pole_branch"
        else:
            source = crossing_lookup[(primary.circles, primary.x, primary.y)]
            kind = "crossing"
        vertices.append(ReebVertex(idmap[v.id], v.x, primary.y, kind, source, v.degree))

    chains = sorted(dec.component_chains(comp),
                    key=lambda c: (idmap[c.left_vertex], idmap[c.right_vertex], c.segments[0]))
    edges = []
    for c in chains:
        first = dec.segment(c.segments[0])
        left, right = vertices[idmap[c.left_vertex]], vertices[idmap[c.right_vertex]]
        path = [(float(left.x), float(left.y))]
        for key in c.segments:
            seg = dec.segment(key)
            path.append((float(dec.slabs[key[0]].t), seg.midpoint_float()))
        path.append((float(right.x), float(right.y)))
        fiber = segment_fiber_class(d, first.lower, first.upper) if d is not None else None
        edges.append(ReebEdge(len(edges), left.id, right.id, fiber, first.label, tuple(path)))
    return ReebGraph(tuple(vertices), tuple(edges))


def poincare_reeb_graph_full(region: Region) -> ReebGraph:
    """区域的 Poincaré-Reeb 图（边不带纤维类型）"""
    return _build(_planar_region(region), None)


def poincare_reeb_graph(region: Region) -> MultiGraph:
    return poincare_reeb_graph_full(region).to_multigraph()


def reeb_graph(d: MomentData) -> ReebGraph:
    """
    f0 = 第一坐标投影 ∘ f 的 Reeb 图。

    Raises:
        DisconnectedFiberError: 某组维数为 0（纤维不连通，Reeb 图的边不再是线段）
        GenericityError: 奇异点横坐标重合
        DegenerateRegionError: 区域退化
    """
    zero_groups = [i for i, m in enumerate(d.dim_map, 1) if m == 0]
    if zero_groups:
        raise DisconnectedFiberError(
            f"m_l2 vanishes on group(s) {zero_groups}: fibers over D are disconnected and the Reeb "
            f"graph is not the Poincare-Reeb graph of the region (disconnected-fiber counterexample)"
        )
    region = _planar_region(d)
    singular_x_values(d)
    graph = _build(region, d)
    bad = [v.id for v in graph.vertices if v.degree not in (1, 2, 3)]
    if bad:
        raise GenericityError(f"vertices {bad} have degree outside 1..3; the arrangement is not generic")
    logger.info(f"Reeb graph: {len(graph.vertices)} vertices, {len(graph.edges)} edges")
    return graph
