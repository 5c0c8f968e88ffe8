"""
显式构造模块

职责：
- 在 Poincaré-Reeb 图指定边对应的边界弧上放置新圆，得到新的 MomentData
- 挂件圆（notch）：圆心在宿主弧上的小圆，取外侧方向；恰有一个竖直极点落在新 D 的闭包中，
  与宿主圆恰交于两点 → 该边细分两次并挂一个叶子
- 弦圆（chord）：贴近宿主弧切去一条薄透镜，两个竖直极点都在闭包之外 → 该边细分两次
- 按各构造的分组规则给出新的 m_l1_l2 / m_l2，并返回定理预测的图

放置全部用有理数：宿主圆上的点取半角正切参数 t，半径按 r/2^k 缩小直到精确校验通过。
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .arrangement import LOWER, Circle, Region, region_from_seed, validate_arrangement
from .errors import (
    DimensionError,
    MomentForgeError,
    PlacementFailure,
    PreconditionError,
    UnknownEdgeError,
)
from .graph_ops import MultiGraph, build_gp, predict_decorated
from .moment_map import MomentData, validate_moment_data
from .reeb_sweep import ReebEdge, ReebGraph, poincare_reeb_graph_full

logger = logging.getLogger("momentforge")

PLACEMENT_KINDS = ("pendant", "factor_pendant", "chord")

# 弦圆圆心到宿主圆心的距离（宿主半径的倍数），依次尝试
CHORD_STRETCH = (Fraction(3), Fraction(2), Fraction(3, 2), Fraction(5, 4))

PARAM_DENOMINATOR = 10 ** 4


@dataclass(frozen=True)
class Decoration:
    """
    一条边上的装饰请求。

    host_arc 为 Poincaré-Reeb 图的边序号；new_group 为新组的球面维数（主定理 3/5 的形式）。
    """

    host_circle: int
    host_arc: int
    kind: str = "pendant"
    count: int = 1
    new_group: Optional[int] = None

    def __post_init__(self):
        if self.kind not in PLACEMENT_KINDS:
            raise PreconditionError(f"unknown decoration kind {self.kind!r}")
        if self.count < 0:
            raise PreconditionError(f"decoration count must be non-negative, got {self.count}")
        if self.new_group is not None and self.new_group <= 0:
            raise DimensionError(f"new group dimension must be positive, got {self.new_group}")


@dataclass(frozen=True)
class _Plan:
    edge: int
    x: float
    kind: str


@dataclass(frozen=True)
class _Site:
    """一次放置的宿主信息与宿主弧上的有理点"""

    plan: _Plan
    host: Circle
    branch: str
    lo: float
    hi: float
    point: Tuple[Fraction, Fraction]
    unit: Tuple[Fraction, Fraction]


# ============================================================
# 几何辅助
# ============================================================

def _require_base(base: MomentData) -> Region:
    region = base.region
    if not isinstance(region, Region) or region.degenerate:
        raise PreconditionError("constructions need a non-degenerate planar region")
    report = validate_arrangement(region)
    report.extend(validate_moment_data(base))
    if not report.passed:
        raise PreconditionError(f"base data does not validate:\n{report}")
    return region


def _require_single_group(base: MomentData, region: Region) -> None:
    if base.l2 != 1:
        raise PreconditionError(f"this construction needs l2 = 1, got l2 = {base.l2}")
    if region.crossings:
        raise PreconditionError("this construction needs mutually disjoint base circles")


def _edge(graph: ReebGraph, index: int) -> ReebEdge:
    if not 0 <= index < len(graph.edges):
        raise UnknownEdgeError(f"edge {index} does not exist (graph has {len(graph.edges)} edges)")
    return graph.edges[index]


def _edge_range(graph: ReebGraph, edge: ReebEdge) -> Tuple[float, float]:
    return float(graph.vertices[edge.u].x), float(graph.vertices[edge.v].x)


def _host_arc(edge: ReebEdge):
    lower, upper = edge.segment_label
    return upper if upper is not None else lower


def _spread(lo: float, hi: float, count: int, avoid: float) -> List[float]:
    """边横坐标范围内留出 1/8 边距后均匀分布的目标位置，避开宿主圆心的横坐标"""
    margin = (hi - lo) / 8
    step = (hi - lo - 2 * margin) / (count + 1)
    xs = []
    for i in range(count):
        x = lo + margin + step * (i + 1)
        if abs(x - avoid) < step / 4:
            x += step / 4
        xs.append(x)
    return xs


def _arc_point(c: Circle, branch: str, x: float):
    """
    宿主弧上横坐标约为 x 的有理点。

    (cos, sin) = ((1-t²)/(1+t²), 2t/(1+t²))，上弧取 t > 0，下弧取 t < 0。
    """
    r = float(c.radius)
    cos_v = min(max((x - float(c.center[0])) / r, -1 + 1e-9), 1 - 1e-9)
    t_float = math.sqrt(1 - cos_v * cos_v) / (1 + cos_v)
    t = Fraction(t_float).limit_denominator(PARAM_DENOMINATOR)
    if t == 0:
        t = Fraction(1, PARAM_DENOMINATOR)
    if branch == LOWER:
        t = -t
    denom = 1 + t * t
    ux, uy = (1 - t * t) / denom, 2 * t / denom
    return (c.center[0] + c.radius * ux, c.center[1] + c.radius * uy), (ux, uy)


def _candidate(site: _Site, new_id: int, k: int, stretch: Fraction) -> Circle:
    r = site.host.radius
    (px, py), (ux, uy) = site.point, site.unit
    small = r / 2 ** k
    if site.plan.kind != "chord":
        return Circle(new_id, (px, py), small, "outside")
    if site.host.orientation == "inside":
        lam = stretch * r
        radius = lam - r + small
    else:
        lam = r / 2
        radius = r / 2 + small
    center = (site.host.center[0] + lam * ux, site.host.center[1] + lam * uy)
    return Circle(new_id, center, radius, "outside")


def _check(region: Region, new_circles: Sequence[Circle], sites: Sequence[_Site],
           holes: Optional[int]) -> Optional[List[Optional[str]]]:
    """
    精确校验一次放置。

    Returns:
        每个新圆的挂叶位置（"first"/"second"，弦圆为 None）；校验不通过返回 None
    """
    if region.degenerate or region.hole_count != holes:
        return None
    if not validate_arrangement(region).passed:
        return None
    sides: List[Optional[str]] = []
    for c, site in zip(new_circles, sites):
        poles = [p for p in region.boundary_poles if p.circle == c.id]
        crossings = [cp for cp in region.boundary_crossings if c.id in cp.circles]
        if len(crossings) != 2 or any(set(cp.circles) != {c.id, site.host.id} for cp in crossings):
            return None
        cx = sorted(float(cp.x) for cp in crossings)
        if cx[0] <= site.lo or cx[1] >= site.hi:
            return None
        if site.plan.kind == "chord":
            if poles:
                return None
            sides.append(None)
            continue
        if len(poles) != 1:
            return None
        pole_x = float(poles[0].point[0])
        if not site.lo < pole_x < site.hi:
            return None
        sides.append("first" if pole_x < cx[0] else "second")
    return sides


def _start_scale(sites: Sequence[_Site], plans_per_edge: Dict[int, int]) -> int:
    k = 2
    for site in sites:
        count = plans_per_edge[site.plan.edge]
        room = (site.hi - site.lo) / (4 * (count + 1))
        ratio = float(site.host.radius) / room if room > 0 else 1.0
        k = max(k, math.ceil(math.log2(ratio)) if ratio > 1 else 2)
    return k


def _place(region: Region, graph: ReebGraph, plans: Sequence[_Plan], max_halvings: int):
    """
    放置全部新圆（共用同一缩放级别 k），返回新区域与装饰列表。

    Raises:
        UnknownEdgeError: 边序号不存在
        PlacementFailure: k 增到 max_halvings 仍未通过校验
    """
    sites = []
    per_edge: Dict[int, int] = {}
    for plan in plans:
        edge = _edge(graph, plan.edge)
        arc = _host_arc(edge)
        host = region.circle(arc[0])
        lo, hi = _edge_range(graph, edge)
        point, unit = _arc_point(host, arc[1], plan.x)
        sites.append(_Site(plan, host, arc[1], lo, hi, point, unit))
        per_edge[plan.edge] = per_edge.get(plan.edge, 0) + 1

    first_id = len(region.circles) + 1
    stretches = CHORD_STRETCH if any(p.kind == "chord" for p in plans) else (CHORD_STRETCH[0],)
    start = _start_scale(sites, per_edge)
    attempts = 0
    for k in range(start, max_halvings + 1):
        for stretch in stretches:
            attempts += 1
            new_circles = [_candidate(site, first_id + i, k, stretch) for i, site in enumerate(sites)]
            try:
                candidate = region_from_seed(list(region.circles) + new_circles, region.seed)
            except MomentForgeError as e:
                logger.debug(f"Placement: k = {k} rejected ({e})")
                continue
            sides = _check(candidate, new_circles, sites, region.hole_count)
            if sides is None:
                if attempts == 1:
                    logger.warning("Placement: first attempt rejected, shrinking new circles")
                continue
            logger.info(f"Placement: {len(new_circles)} circle(s) placed at scale 2^-{k} "
                        f"after {attempts} attempt(s)")
            decorations = [{"edge": site.plan.edge, "kind": site.plan.kind, "attach": side or "first"}
                           for site, side in zip(sites, sides)]
            return candidate, decorations
    raise PlacementFailure(f"no placement passed the exact checks within {attempts} attempts "
                           f"(k up to {max_halvings})")


def _plans_for(graph: ReebGraph, region: Region, alloc: Mapping[int, int], kind: str) -> List[_Plan]:
    plans = []
    for edge_idx, count in sorted(alloc.items()):
        edge_idx, count = int(edge_idx), int(count)
        if count < 0:
            raise PreconditionError(f"allocation for edge {edge_idx} must be non-negative, got {count}")
        if count == 0:
            continue
        edge = _edge(graph, edge_idx)
        lo, hi = _edge_range(graph, edge)
        host = region.circle(_host_arc(edge)[0])
        plans.extend(_Plan(edge_idx, x, kind) for x in _spread(lo, hi, count, float(host.center[0])))
    return plans


# ============================================================
# 主定理 2–6 的构造
# ============================================================

def _decorate_same_group(base: MomentData, alloc: Mapping[int, int], total_dim: int, kind: str,
                         max_halvings: int) -> Tuple[MomentData, MultiGraph]:
    region = _require_base(base)
    _require_single_group(base, region)
    m2 = total_dim - base.dim_map[0] - 2
    if m2 <= 0:
        raise DimensionError(f"total_dim = {total_dim} must exceed m_l2(1) + 2 = {base.dim_map[0] + 2}")
    graph = poincare_reeb_graph_full(region)
    base_graph = graph.to_multigraph()
    plans = _plans_for(graph, region, alloc, kind)
    if not plans:
        return base, base_graph
    new_region, decorations = _place(region, graph, plans, max_halvings)
    data = MomentData(new_region, base.group_map + (2,) * len(plans), (base.dim_map[0], m2))
    return data, predict_decorated(base_graph, decorations)


def _decorate_new_group(base: MomentData, edge: int, new_dim: int, kind: str,
                        max_halvings: int) -> Tuple[MomentData, MultiGraph]:
    region = _require_base(base)
    if new_dim < 1:
        raise DimensionError(f"new group dimension must be positive, got {new_dim}")
    if any(m < 1 for m in base.dim_map):
        raise PreconditionError("all base group dimensions must be at least 1")
    graph = poincare_reeb_graph_full(region)
    base_graph = graph.to_multigraph()
    plans = _plans_for(graph, region, {edge: 1}, kind)
    new_region, decorations = _place(region, graph, plans, max_halvings)
    data = MomentData(new_region, base.group_map + (base.l2 + 1,), base.dim_map + (new_dim,))
    return data, predict_decorated(base_graph, decorations)


def attach_pendant_circles(base: MomentData, alloc: Mapping[int, int], total_dim: int,
                           max_halvings: int = 40) -> Tuple[MomentData, MultiGraph]:
    """
    主定理 2：在每条边上放 alloc[edge] 个挂件圆。

    旧圆归第 1 组，新圆归第 2 组，维数为 (m_l2(1), total_dim - m_l2(1) - 2)。

    Args:
        base: l2 = 1 且各圆两两不交的基础数据
        alloc: 边序号 → 个数
        total_dim: 新流形的维数 m

    Returns:
        (新数据, 预测的 Reeb 图)

    Raises:
        PreconditionError: 基础数据不满足前提
        DimensionError: total_dim 过小
        PlacementFailure: 放置失败
    """
    return _decorate_same_group(base, alloc, total_dim, "pendant", max_halvings)


def attach_factor_circle(base: MomentData, edge: int, new_dim: int,
                         max_halvings: int = 40) -> Tuple[MomentData, MultiGraph]:
    """主定理 3：在一条边上放一个挂件圆，单独成为新的一组（维数 new_dim）"""
    return _decorate_new_group(base, edge, new_dim, "factor_pendant", max_halvings)


def attach_chord_circles(base: MomentData, alloc: Mapping[int, int], total_dim: int,
                         max_halvings: int = 40) -> Tuple[MomentData, MultiGraph]:
    """主定理 4：弦圆版本的主定理 2，每个圆使对应边多出 2 个顶点与 2 条边"""
    return _decorate_same_group(base, alloc, total_dim, "chord", max_halvings)


def attach_chord_factor_circle(base: MomentData, edge: int, new_dim: int,
                               max_halvings: int = 40) -> Tuple[MomentData, MultiGraph]:
    """主定理 5：弦圆版本的主定理 3"""
    return _decorate_new_group(base, edge, new_dim, "chord", max_halvings)


def construct_gp(nprime: int, j1: int, j2: int, total_dim: int = 4,
                 max_halvings: int = 40) -> Tuple[MomentData, MultiGraph]:
    """
    主定理 6：单位圆盘上方弧放 j1 个圆心横坐标为负、j2 个为正的挂件圆，Reeb 图同构于 G_P,j1,j2。

    Raises:
        ArityError: j1 + j2 != n'
        DimensionError: total_dim <= 3
    """
    predicted = build_gp(nprime, j1, j2)
    disk = Circle(1, (0, 0), 1, "inside")
    base = MomentData(region_from_seed([disk], (0, 0)), (1,), (1,))
    if nprime == 0:
        return base, predicted
    m2 = total_dim - 3
    if m2 <= 0:
        raise DimensionError(f"total_dim = {total_dim} must exceed 3")
    region = base.region
    graph = poincare_reeb_graph_full(region)
    plans = [_Plan(0, -1 + (i + 1) / (j1 + 1), "pendant") for i in range(j1)]
    plans += [_Plan(0, (i + 1) / (j2 + 1), "pendant") for i in range(j2)]
    new_region, _ = _place(region, graph, plans, max_halvings)
    data = MomentData(new_region, (1,) + (2,) * nprime, (1, m2))
    return data, predicted


def _check_hosts(base: MomentData, decorations: Sequence[Decoration]) -> None:
    """host_circle 须为该边宿主弧所在的圆"""
    graph = poincare_reeb_graph_full(_require_base(base))
    for deco in decorations:
        host = _host_arc(_edge(graph, deco.host_arc))[0]
        if deco.host_circle != host:
            raise PreconditionError(f"edge {deco.host_arc} is hosted by circle {host}, not circle {deco.host_circle}")


def apply_decorations(base: MomentData, decorations: Sequence[Decoration], total_dim: Optional[int] = None,
                      max_halvings: int = 40) -> Tuple[MomentData, MultiGraph]:
    """
    按 Decoration 列表分派到对应构造。

    全部 new_group 为空：同组构造（需要 total_dim）；恰有一项带 new_group：新组构造。
    """
    if not decorations:
        raise PreconditionError("at least one decoration is required")
    _check_hosts(base, decorations)
    kinds = {d.kind for d in decorations}
    chord = kinds == {"chord"}
    if not chord and "chord" in kinds:
        raise PreconditionError("chord and pendant decorations cannot be mixed in one construction")
    with_group = [d for d in decorations if d.new_group is not None]
    if with_group:
        if len(decorations) != 1 or decorations[0].count != 1:
            raise PreconditionError("a new-group construction places exactly one circle")
        deco = decorations[0]
        fn = attach_chord_factor_circle if chord else attach_factor_circle
        return fn(base, deco.host_arc, deco.new_group, max_halvings)
    if total_dim is None:
        raise PreconditionError("total_dim is required when no decoration opens a new group")
    alloc: Dict[int, int] = {}
    for deco in decorations:
        alloc[deco.host_arc] = alloc.get(deco.host_arc, 0) + deco.count
    fn = attach_chord_circles if chord else attach_pendant_circles
    return fn(base, alloc, total_dim, max_halvings)
