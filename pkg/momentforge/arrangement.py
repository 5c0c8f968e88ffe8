"""
圆排列几何模块（n = 2）

职责：
- 圆、交点、竖直极点（x 方向的极值点）的精确计算
- 竖直扫描线的切片分解：相邻事件横坐标之间取有理采样点 t，
  切片上 D 的线段由弧的排序加组合符号判定得到；线段跨事件按
  (下弧, 上弧) 标签延续，标签消失的线段挂到事件顶点上
- 由种子点确定区域 D（正值集合中含种子的连通分支）
- 点定位（内部 / 圆上 / 外部）与主定理条件的校验

数据流：circles + seed → region_from_seed → Region（含 SlabDecomposition）
        → validate_arrangement / locate_point / reeb_sweep
"""

import logging
from bisect import bisect_left
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from networkx.utils import UnionFind

from .errors import (
    PreconditionError,
    SeedOutsideError,
    TangencyError,
    UnboundedRegionError,
    ValidationReport,
)
from .exact_arith import (
    Ordering,
    QuadExt,
    as_quad,
    format_rat,
    quad_cmp,
    quad_sign,
    rational_above,
    rational_below,
    rational_between,
)
from .polynomials import Poly, circle_poly

logger = logging.getLogger("momentforge")

ORIENTATIONS = ("inside", "outside")
LOWER, UPPER = "lower", "upper"

Arc = Tuple[int, str]
Point = Tuple[QuadExt, QuadExt]
SegmentKey = Tuple[int, int]


# ============================================================
# 基本几何对象
# ============================================================

@dataclass(frozen=True)
class Circle:
    """平面上的圆；orientation 指出 D 位于圆盘内侧还是外侧"""

    id: int
    center: Tuple[Fraction, Fraction]
    radius: Fraction
    orientation: str = "outside"

    def __post_init__(self):
        object.__setattr__(self, "center", (Fraction(self.center[0]), Fraction(self.center[1])))
        object.__setattr__(self, "radius", Fraction(self.radius))
        if self.radius <= 0:
            raise PreconditionError(f"circle {self.id}: radius must be positive, got {self.radius}")
        if self.orientation not in ORIENTATIONS:
            raise PreconditionError(f"circle {self.id}: orientation must be one of {ORIENTATIONS}")

    @property
    def sign(self) -> int:
        return -1 if self.orientation == "inside" else 1

    def raw(self, x, y) -> QuadExt:
        """(x-p1)² + (y-p2)² - r²，不带方向"""
        dx = as_quad(x) - self.center[0]
        dy = as_quad(y) - self.center[1]
        return dx * dx + dy * dy - self.radius * self.radius

    def value(self, x, y) -> QuadExt:
        """带方向的 f_j(x, y)，正值一侧即 D 所在一侧"""
        v = self.raw(x, y)
        return -v if self.sign < 0 else v

    def valuef(self, x: float, y: float) -> float:
        p1, p2 = float(self.center[0]), float(self.center[1])
        r = float(self.radius)
        return self.sign * ((x - p1) ** 2 + (y - p2) ** 2 - r * r)

    @property
    def poly(self) -> Poly:
        return circle_poly(self)

    def to_dict(self) -> Dict:
        return {
            "id": self.id,
            "center": [format_rat(self.center[0]), format_rat(self.center[1])],
            "radius": format_rat(self.radius),
            "orientation": self.orientation,
        }


@dataclass(frozen=True)
class CrossingPoint:
    """两圆的横截交点；坐标位于同一个二次域"""

    circles: Tuple[int, int]
    x: QuadExt
    y: QuadExt
    in_closure: bool = False

    @property
    def point(self) -> Point:
        return self.x, self.y

    def to_dict(self) -> Dict:
        return {
            "circles": list(self.circles),
            "x": str(self.x),
            "y": str(self.y),
            "x_decimal": self.x.to_decimal(12),
            "y_decimal": self.y.to_decimal(12),
            "in_closure": self.in_closure,
        }


@dataclass(frozen=True)
class Pole:
    """竖直极点 (p1 ∓ r, p2)"""

    circle: int
    side: str
    point: Tuple[Fraction, Fraction]
    in_closure: bool = False

    @property
    def x(self) -> QuadExt:
        return QuadExt(self.point[0])

    @property
    def y(self) -> QuadExt:
        return QuadExt(self.point[1])

    def to_dict(self) -> Dict:
        return {
            "circle": self.circle,
            "side": self.side,
            "point": [format_rat(self.point[0]), format_rat(self.point[1])],
            "in_closure": self.in_closure,
        }


@dataclass(frozen=True)
class Tangency:
    """相切（或重合）的一对圆；重合时 point 为 None"""

    circles: Tuple[int, int]
    point: Optional[Tuple[Fraction, Fraction]]

    def __str__(self):
        if self.point is None:
            return f"circles {self.circles} coincide"
        return f"circles {self.circles} tangent at ({format_rat(self.point[0])}, {format_rat(self.point[1])})"


@dataclass(frozen=True)
class Stratum:
    """点所在的层：interior / on_circles / outside"""

    kind: str
    circles: Tuple[int, ...] = ()

    def __str__(self):
        if self.kind == "interior":
            return "Interior"
        if self.kind == "outside":
            return "Outside"
        return f"OnCircles({list(self.circles)})"


INTERIOR = Stratum("interior")
OUTSIDE = Stratum("outside")


def on_circles(ids) -> Stratum:
    return Stratum("on_circles", tuple(sorted(ids)))


def _cmp_quad(a: QuadExt, b: QuadExt) -> int:
    return int(quad_cmp(a, b))


def circle_intersections(c1: Circle, c2: Circle) -> List[CrossingPoint]:
    """
    两圆交点。

    两圆方程相减得到根轴 A·x + B·y = K；B ≠ 0 时把 y 表示为 x 的一次式代入，
    得到 x 的二次方程；圆心同高时 x 为有理数，y 由开方得到。

    Returns:
        空列表（相离/内含）或按 (x, y) 排序的两个 CrossingPoint

    Raises:
        TangencyError: 圆心距平方等于 (r1 ± r2)²，或两圆重合
    """
    (p1, p2), r1 = c1.center, c1.radius
    (q1, q2), r2 = c2.center, c2.radius
    dx, dy = q1 - p1, q2 - p2
    dist2 = dx * dx + dy * dy
    if dist2 == 0:
        if r1 == r2:
            raise TangencyError(f"circles {c1.id} and {c2.id} coincide")
        return []
    if dist2 > (r1 + r2) ** 2 or dist2 < (r1 - r2) ** 2:
        return []
    if dist2 == (r1 + r2) ** 2 or dist2 == (r1 - r2) ** 2:
        raise TangencyError(f"circles {c1.id} and {c2.id} are tangent")

    a_coef = 2 * dx
    b_coef = 2 * dy
    k = (q1 * q1 + q2 * q2 - r2 * r2) - (p1 * p1 + p2 * p2 - r1 * r1)
    points = []
    if b_coef != 0:
        alpha = k / b_coef
        beta = -a_coef / b_coef
        a2 = 1 + beta * beta
        a1 = 2 * (beta * (alpha - p2) - p1)
        a0 = p1 * p1 + (alpha - p2) ** 2 - r1 * r1
        root = QuadExt.sqrt_of(a1 * a1 - 4 * a2 * a0)
        for sgn in (-1, 1):
            x = (QuadExt(-a1) + root * sgn) / (2 * a2)
            y = x * beta + alpha
            points.append((x, y))
    else:
        x = QuadExt(k / a_coef)
        root = QuadExt.sqrt_of(r1 * r1 - (k / a_coef - p1) ** 2)
        for sgn in (-1, 1):
            points.append((x, root * sgn + p2))

    points.sort(key=cmp_to_key(lambda u, v: _cmp_quad(u[0], v[0]) or _cmp_quad(u[1], v[1])))
    pair = tuple(sorted((c1.id, c2.id)))
    return [CrossingPoint(pair, x, y) for x, y in points]


def vertical_poles(c: Circle) -> Tuple[Pole, Pole]:
    """左极点 (p1-r, p2) 与右极点 (p1+r, p2)"""
    p1, p2 = c.center
    return (
        Pole(c.id, "left", (p1 - c.radius, p2)),
        Pole(c.id, "right", (p1 + c.radius, p2)),
    )


def tangency_point(c1: Circle, c2: Circle) -> Optional[Tuple[Fraction, Fraction]]:
    """相切点（圆心距为有理数，故切点有理）"""
    (p1, p2), (q1, q2) = c1.center, c2.center
    dx, dy = q1 - p1, q2 - p2
    dist2 = dx * dx + dy * dy
    if dist2 == 0:
        return None
    if dist2 == (c1.radius + c2.radius) ** 2:
        dist = c1.radius + c2.radius
    else:
        dist = abs(c1.radius - c2.radius)
    # 内切时切点在较大圆一侧
    sgn = 1 if (c1.radius >= c2.radius or dist2 == (c1.radius + c2.radius) ** 2) else -1
    t = sgn * c1.radius / dist
    return p1 + t * dx, p2 + t * dy


def arc_y(c: Circle, branch: str, t: Fraction) -> Optional[QuadExt]:
    """圆 c 的上/下弧在 x = t 处的纵坐标；t 超出圆的横向范围时返回 None"""
    rad = c.radius ** 2 - (Fraction(t) - c.center[0]) ** 2
    if rad < 0:
        return None
    root = QuadExt.sqrt_of(rad)
    return root + c.center[1] if branch == UPPER else -root + c.center[1]


def arc_relation(c: Circle, branch: str, x, y) -> int:
    """
    点 (x, y) 相对圆 c 的某条弧在同一横坐标处的上下关系。

    只用 f_c 的符号和 y - p2 的符号，不需要在点的横坐标处开方。

    Returns:
        +1 在弧上方，0 在弧上，-1 在弧下方
    """
    raw = quad_sign(c.raw(x, y))
    s = quad_sign(as_quad(y) - c.center[1])
    if raw < 0:
        return 1 if branch == LOWER else -1
    if raw > 0:
        return s
    if s == 0:
        return 0
    on_branch = UPPER if s > 0 else LOWER
    if on_branch == branch:
        return 0
    return 1 if branch == LOWER else -1


# ============================================================
# 切片分解
# ============================================================

@dataclass(frozen=True)
class Event:
    """扫描事件：极点或交点，附带经过该点的弧"""

    kind: str
    x: QuadExt
    y: QuadExt
    circles: Tuple[int, ...]
    arcs: FrozenSet[Arc]
    side: str = ""

    def describe(self) -> str:
        if self.kind == "pole":
            return f"{self.side} pole of circle {self.circles[0]} at x = {self.x}"
        return f"crossing of circles {self.circles} at x = {self.x}"


@dataclass(frozen=True)
class Segment:
    """切片上 D 的一条线段；lower/upper 为边界弧，None 表示无界"""

    slab: int
    index: int
    lower: Optional[Arc]
    upper: Optional[Arc]
    lower_y: Optional[QuadExt]
    upper_y: Optional[QuadExt]

    @property
    def key(self) -> SegmentKey:
        return self.slab, self.index

    @property
    def label(self) -> Tuple[Optional[Arc], Optional[Arc]]:
        return self.lower, self.upper

    def midpoint_float(self) -> float:
        if self.lower_y is None and self.upper_y is None:
            return 0.0
        if self.lower_y is None:
            return float(self.upper_y) - 1.0
        if self.upper_y is None:
            return float(self.lower_y) + 1.0
        return 0.5 * (float(self.lower_y) + float(self.upper_y))


@dataclass
class Slab:
    index: int
    lo: Optional[QuadExt]
    hi: Optional[QuadExt]
    t: Fraction
    segments: List[Segment] = field(default_factory=list)


@dataclass
class SweepVertex:
    """同一横坐标上共享线段的事件合成的顶点"""

    id: int
    x: QuadExt
    boundary: int
    events: List[Event]
    left: List[SegmentKey]
    right: List[SegmentKey]

    @property
    def degree(self) -> int:
        return len(self.left) + len(self.right)


@dataclass
class Chain:
    """跨切片延续的线段链，对应 Poincaré-Reeb 图的一条边"""

    id: int
    segments: List[SegmentKey]
    left_vertex: Optional[int]
    right_vertex: Optional[int]

    @property
    def bounded(self) -> bool:
        return self.left_vertex is not None and self.right_vertex is not None


@dataclass
class SlabDecomposition:
    circles: Tuple[Circle, ...]
    event_xs: List[QuadExt]
    events_at: List[List[Event]]
    slabs: List[Slab]
    vertices: List[SweepVertex]
    chains: List[Chain]
    chain_of: Dict[SegmentKey, int]
    vertex_component: Dict[int, int]
    chain_component: Dict[int, int]
    unbounded_components: FrozenSet[int]
    merged_boundaries: List[int]

    def segment(self, key: SegmentKey) -> Segment:
        return self.slabs[key[0]].segments[key[1]]

    def slab_candidates(self, x) -> List[int]:
        """包含横坐标 x 的切片；x 恰为事件横坐标时返回左右两个切片"""
        x = as_quad(x)
        lo, hi = 0, len(self.event_xs)
        while lo < hi:
            mid = (lo + hi) // 2
            if quad_cmp(self.event_xs[mid], x) is Ordering.LT:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.event_xs) and quad_cmp(self.event_xs[lo], x) is Ordering.EQ:
            return [lo, lo + 1]
        return [lo]

    def component_vertices(self, component: int) -> List[SweepVertex]:
        return [v for v in self.vertices if self.vertex_component.get(v.id) == component]

    def component_chains(self, component: int) -> List[Chain]:
        return [c for c in self.chains if self.chain_component.get(c.id) == component]


def _circle_map(circles: Sequence[Circle]) -> Dict[int, Circle]:
    return {c.id: c for c in circles}


def segment_contains(seg: Segment, circles: Dict[int, Circle], x, y, closed: bool) -> bool:
    """点是否在线段内（closed=True 时包含端点所在的弧）"""
    if seg.lower is not None:
        rel = arc_relation(circles[seg.lower[0]], seg.lower[1], x, y)
        if rel < 0 or (rel == 0 and not closed):
            return False
    if seg.upper is not None:
        rel = arc_relation(circles[seg.upper[0]], seg.upper[1], x, y)
        if rel > 0 or (rel == 0 and not closed):
            return False
    return True


def _slab_segments(circles: Sequence[Circle], slab: int, t: Fraction) -> List[Segment]:
    """在 x = t 的竖直线上求 D 的正值线段"""
    present = []
    for c in circles:
        rad = c.radius ** 2 - (t - c.center[0]) ** 2
        if rad > 0:
            root = QuadExt.sqrt_of(rad)
            present.append(((c.id, LOWER), -root + c.center[1]))
            present.append(((c.id, UPPER), root + c.center[1]))
        elif c.orientation == "inside":
            return []
    present.sort(key=cmp_to_key(lambda u, v: _cmp_quad(u[1], v[1])))
    pos = {arc: k for k, (arc, _) in enumerate(present)}
    by_id = _circle_map(circles)
    crossing_ids = sorted({arc[0] for arc, _ in present})
    segments = []
    n = len(present)
    for k in range(n + 1):
        positive = True
        for cid in crossing_ids:
            inside = pos[(cid, LOWER)] <= k - 1 and pos[(cid, UPPER)] >= k
            if inside != (by_id[cid].orientation == "inside"):
                positive = False
                break
        if not positive:
            continue
        lower, lower_y = present[k - 1] if k > 0 else (None, None)
        upper, upper_y = present[k] if k < n else (None, None)
        segments.append(Segment(slab, len(segments), lower, upper, lower_y, upper_y))
    return segments


def _event_arcs(c: Circle, y: QuadExt) -> List[Arc]:
    s = quad_sign(y - c.center[1])
    if s > 0:
        return [(c.id, UPPER)]
    if s < 0:
        return [(c.id, LOWER)]
    return [(c.id, LOWER), (c.id, UPPER)]


def collect_events(circles: Sequence[Circle]) -> Tuple[List[Event], List[Tangency]]:
    """全部极点与交点事件；相切的圆对单独返回"""
    by_id = _circle_map(circles)
    events: List[Event] = []
    tangencies: List[Tangency] = []
    for c in circles:
        for pole in vertical_poles(c):
            events.append(Event(
                "pole", pole.x, pole.y, (c.id,),
                frozenset({(c.id, LOWER), (c.id, UPPER)}), side=pole.side,
            ))
    for i, c1 in enumerate(circles):
        for c2 in circles[i + 1:]:
            try:
                crossings = circle_intersections(c1, c2)
            except TangencyError:
                tangencies.append(Tangency((c1.id, c2.id), tangency_point(c1, c2)))
                continue
            for cp in crossings:
                arcs = frozenset(_event_arcs(by_id[cp.circles[0]], cp.y) + _event_arcs(by_id[cp.circles[1]], cp.y))
                events.append(Event("crossing", cp.x, cp.y, cp.circles, arcs))
    return events, tangencies


def _owners_by_hole_rule(seg: Segment, events: List[Event], opposite: Dict) -> List[Event]:
    """
    外向圆极点处的分裂/合并：一侧的 (X, Y) 对应另一侧的 (X, c下弧) 与 (c上弧, Y)。
    """
    owners = []
    for e in events:
        if e.kind != "pole":
            continue
        cid = e.circles[0]
        if (seg.lower, (cid, LOWER)) in opposite and ((cid, UPPER), seg.upper) in opposite:
            owners.append(e)
    return owners


def build_decomposition(circles: Sequence[Circle]) -> SlabDecomposition:
    """
    竖直扫描：事件排序 → 切片采样 → 线段标签延续 → 顶点与链 → 连通分支。

    前提：任意两圆相离或横截（相切时调用方不得进入扫描）。
    """
    if not circles:
        raise PreconditionError("at least one circle is required")
    circles = tuple(circles)
    events, tangencies = collect_events(circles)
    if tangencies:
        raise TangencyError(str(tangencies[0]))

    events.sort(key=cmp_to_key(lambda u, v: _cmp_quad(u.x, v.x) or _cmp_quad(u.y, v.y)))
    event_xs: List[QuadExt] = []
    events_at: List[List[Event]] = []
    for e in events:
        if event_xs and quad_cmp(event_xs[-1], e.x) is Ordering.EQ:
            events_at[-1].append(e)
        else:
            event_xs.append(e.x)
            events_at.append([e])

    slabs: List[Slab] = []
    count = len(event_xs)
    for k in range(count + 1):
        lo = event_xs[k - 1] if k > 0 else None
        hi = event_xs[k] if k < count else None
        if lo is None:
            t = rational_below(hi)
        elif hi is None:
            t = rational_above(lo)
        else:
            t = rational_between(lo, hi)
        slab = Slab(k, lo, hi, t)
        slab.segments = _slab_segments(circles, k, t)
        slabs.append(slab)
    logger.debug(f"Sweep: {len(events)} events at {count} abscissae, {len(slabs)} slabs")

    uf = UnionFind(seg.key for slab in slabs for seg in slab.segments)

    vertices: List[SweepVertex] = []
    merged_boundaries: List[int] = []
    for k in range(count):
        left = {seg.label: seg for seg in slabs[k].segments}
        right = {seg.label: seg for seg in slabs[k + 1].segments}
        for label in left.keys() & right.keys():
            uf.union(left[label].key, right[label].key)
        touched_left = [s for lab, s in left.items() if lab not in right]
        touched_right = [s for lab, s in right.items() if lab not in left]
        group_events = events_at[k]

        event_uf = UnionFind(range(len(group_events)))
        ownership: List[Tuple[str, Segment, List[int]]] = []
        for side, touched, opposite in (("left", touched_left, right), ("right", touched_right, left)):
            for seg in touched:
                owners = [i for i, e in enumerate(group_events)
                          if seg.lower in e.arcs or seg.upper in e.arcs]
                if not owners:
                    hole = _owners_by_hole_rule(seg, group_events, opposite)
                    owners = [group_events.index(e) for e in hole]
                if not owners:
                    owners = list(range(len(group_events)))
                    if len(group_events) > 1:
                        logger.warning(f"Sweep: ambiguous segment at x = {event_xs[k]}, merging {len(owners)} events")
                        merged_boundaries.append(k)
                for i in owners[1:]:
                    event_uf.union(owners[0], i)
                ownership.append((side, seg, owners))

        groups: Dict[int, SweepVertex] = {}
        for side, seg, owners in ownership:
            root = event_uf[owners[0]]
            if root not in groups:
                groups[root] = SweepVertex(-1, event_xs[k], k, [], [], [])
            (groups[root].left if side == "left" else groups[root].right).append(seg.key)
        order = []
        for i in range(len(group_events)):
            root = event_uf[i]
            if root in groups and root not in order:
                order.append(root)
        for root in order:
            vertex = groups[root]
            members = [group_events[i] for i in range(len(group_events)) if event_uf[i] == root]
            if len(members) > 1:
                merged_boundaries.append(k)
            vertex.id = len(vertices)
            vertex.events = members
            vertices.append(vertex)

    right_owner: Dict[SegmentKey, int] = {}
    left_owner: Dict[SegmentKey, int] = {}
    for v in vertices:
        for key in v.right:
            right_owner[key] = v.id
        for key in v.left:
            left_owner[key] = v.id

    chains: List[Chain] = []
    chain_of: Dict[SegmentKey, int] = {}
    for members in sorted((sorted(s) for s in uf.to_sets()), key=lambda m: m[0]):
        chain = Chain(len(chains), members, right_owner.get(members[0]), left_owner.get(members[-1]))
        for key in members:
            chain_of[key] = chain.id
        chains.append(chain)

    comp_uf = UnionFind([("v", v.id) for v in vertices] + [("c", c.id) for c in chains])
    for c in chains:
        for end in (c.left_vertex, c.right_vertex):
            if end is not None:
                comp_uf.union(("c", c.id), ("v", end))
    # 分支按其最小元素排序后编号
    component_ids: Dict = {}
    for idx, members in enumerate(sorted((sorted(s) for s in comp_uf.to_sets()), key=lambda m: m[0])):
        for node in members:
            component_ids[node] = idx
    vertex_component = {v.id: component_ids[("v", v.id)] for v in vertices}
    chain_component = {c.id: component_ids[("c", c.id)] for c in chains}
    unbounded = frozenset(chain_component[c.id] for c in chains if not c.bounded)

    return SlabDecomposition(
        circles=circles,
        event_xs=event_xs,
        events_at=events_at,
        slabs=slabs,
        vertices=vertices,
        chains=chains,
        chain_of=chain_of,
        vertex_component=vertex_component,
        chain_component=chain_component,
        unbounded_components=unbounded,
        merged_boundaries=sorted(set(merged_boundaries)),
    )


def find_segments(dec: SlabDecomposition, x, y, closed: bool) -> List[Segment]:
    """包含点 (x, y) 的线段（closed=False 时只查左侧切片，且至多一个）"""
    by_id = _circle_map(dec.circles)
    candidates = dec.slab_candidates(x)
    if not closed:
        candidates = candidates[:1]
    found = []
    for k in candidates:
        for seg in dec.slabs[k].segments:
            if segment_contains(seg, by_id, x, y, closed):
                found.append(seg)
                if not closed:
                    return found
    return found


# ============================================================
# 区域
# ============================================================

class Region:
    """
    区域 D：正值集合中含种子点的连通分支。

    构造后只读。存在相切时 degenerate 为 True，此时不做扫描，
    闭包判定退化为局部符号判定，仅供校验报告使用。
    """

    def __init__(
        self,
        circles: Sequence[Circle],
        seed: Tuple[Fraction, Fraction],
        crossings: List[CrossingPoint],
        poles: List[Pole],
        tangencies: List[Tangency],
        decomposition: Optional[SlabDecomposition],
        seed_component: Optional[int],
        box: Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]],
    ):
        self.circles: Tuple[Circle, ...] = tuple(circles)
        self.seed = seed
        self.crossings = crossings
        self.poles = poles
        self.tangencies = tangencies
        self.decomposition = decomposition
        self.seed_component = seed_component
        self.box = box

    @property
    def n(self) -> int:
        return 2

    @property
    def degenerate(self) -> bool:
        return self.decomposition is None

    @property
    def boundary_crossings(self) -> List[CrossingPoint]:
        return [c for c in self.crossings if c.in_closure]

    @property
    def boundary_poles(self) -> List[Pole]:
        return [p for p in self.poles if p.in_closure]

    @property
    def hole_count(self) -> Optional[int]:
        if self.decomposition is None:
            return None
        vertices = self.decomposition.component_vertices(self.seed_component)
        chains = self.decomposition.component_chains(self.seed_component)
        return len(chains) - len(vertices) + 1

    @property
    def component_count(self) -> Optional[int]:
        """正值集合的有界连通分支数"""
        if self.decomposition is None:
            return None
        comps = set(self.decomposition.chain_component.values())
        return len(comps - set(self.decomposition.unbounded_components))

    def circle(self, cid: int) -> Circle:
        for c in self.circles:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def polynomials(self) -> List[Poly]:
        return [c.poly for c in self.circles]

    def seed_segments(self) -> List[Segment]:
        dec = self.decomposition
        if dec is None:
            return []
        return [dec.segment(key) for chain in dec.component_chains(self.seed_component) for key in chain.segments]

    def to_dict(self) -> Dict:
        return {
            "circles": [c.to_dict() for c in self.circles],
            "seed": [format_rat(self.seed[0]), format_rat(self.seed[1])],
            "hole_count": self.hole_count,
            "degenerate": self.degenerate,
            "boundary_poles": [p.to_dict() for p in self.boundary_poles],
            "boundary_crossings": [c.to_dict() for c in self.boundary_crossings],
        }


def default_box(circles: Sequence[Circle]):
    """所有圆的外接轴向矩形向外扩 1"""
    xs_lo = min(c.center[0] - c.radius for c in circles) - 1
    xs_hi = max(c.center[0] + c.radius for c in circles) + 1
    ys_lo = min(c.center[1] - c.radius for c in circles) - 1
    ys_hi = max(c.center[1] + c.radius for c in circles) + 1
    return (xs_lo, ys_lo), (xs_hi, ys_hi)


def _local_in_closure(circles: Sequence[Circle], through: Sequence[int], x, y) -> bool:
    return all(quad_sign(c.value(x, y)) >= 0 for c in circles if c.id not in through)


def region_from_seed(circles: Sequence[Circle], seed, box=None) -> Region:
    """
    由圆族和种子点构造区域 D。

    Args:
        circles: 圆列表，id 须为 1..l1 连续且唯一
        seed: 有理种子点
        box: 可选的有理包围盒 ((xlo, ylo), (xhi, yhi))，默认由 default_box 给出

    Returns:
        Region

    Raises:
        PreconditionError: id 不连续或重复
        SeedOutsideError: 种子点处某个 f_j ≤ 0
        UnboundedRegionError: 含种子的正值分支无界
    """
    circles = list(circles)
    ids = sorted(c.id for c in circles)
    if ids != list(range(1, len(circles) + 1)):
        raise PreconditionError(f"circle ids must be 1..{len(circles)} without gaps or duplicates, got {ids}")
    circles.sort(key=lambda c: c.id)
    seed = (Fraction(seed[0]), Fraction(seed[1]))
    for c in circles:
        if quad_sign(c.value(*seed)) <= 0:
            raise SeedOutsideError(f"seed ({format_rat(seed[0])}, {format_rat(seed[1])}) is not in "
                                   f"the positive side of circle {c.id}")

    events, tangencies = collect_events(circles)
    all_crossings = [CrossingPoint(e.circles, e.x, e.y) for e in events if e.kind == "crossing"]
    all_poles = [p for c in circles for p in vertical_poles(c)]
    box = box or default_box(circles)

    if tangencies:
        logger.warning(f"Region is degenerate ({len(tangencies)} tangency); sweep skipped")
        crossings = [replace(cp, in_closure=_local_in_closure(circles, cp.circles, cp.x, cp.y))
                     for cp in all_crossings]
        poles = [replace(p, in_closure=_local_in_closure(circles, (p.circle,), p.x, p.y)) for p in all_poles]
        return Region(circles, seed, crossings, poles, tangencies, None, None, box)

    dec = build_decomposition(circles)
    segs = find_segments(dec, seed[0], seed[1], closed=False)
    if not segs:
        raise SeedOutsideError("seed is not inside any positive segment")
    component = dec.chain_component[dec.chain_of[segs[0].key]]
    if component in dec.unbounded_components:
        raise UnboundedRegionError("the positivity component containing the seed is unbounded")

    closure_points = set()
    for v in dec.component_vertices(component):
        for e in v.events:
            closure_points.add((e.kind, e.circles, e.x, e.y))
    crossings = [replace(cp, in_closure=("crossing", cp.circles, cp.x, cp.y) in closure_points)
                 for cp in all_crossings]
    poles = [replace(p, in_closure=("pole", (p.circle,), p.x, p.y) in closure_points) for p in all_poles]
    region = Region(circles, seed, crossings, poles, [], dec, component, box)
    logger.info(f"Region: {len(circles)} circle(s), {len(dec.event_xs)} event abscissae, "
                f"holes = {region.hole_count}")
    return region


def locate_point(region: Region, p) -> Stratum:
    """
    点定位。

    Args:
        region: 区域
        p: (x, y)，分量为 Fraction 或同一二次域中的 QuadExt

    Returns:
        INTERIOR / on_circles(J) / OUTSIDE
    """
    x, y = as_quad(p[0]), as_quad(p[1])
    zero = []
    for c in region.circles:
        s = quad_sign(c.value(x, y))
        if s < 0:
            return OUTSIDE
        if s == 0:
            zero.append(c.id)
    dec = region.decomposition
    if dec is None:
        return on_circles(zero) if zero else INTERIOR
    if not zero:
        segs = find_segments(dec, x, y, closed=False)
        if segs and dec.chain_component[dec.chain_of[segs[0].key]] == region.seed_component:
            return INTERIOR
        return OUTSIDE
    for seg in find_segments(dec, x, y, closed=True):
        if dec.chain_component[dec.chain_of[seg.key]] == region.seed_component:
            return on_circles(zero)
    return OUTSIDE


def validate_arrangement(region: Region) -> ValidationReport:
    """
    校验主定理对圆族的要求。

    (a) 圆两两相离或横截；(b) 闭包中没有三圆共点；(c) 闭包中的极点不在其他圆上；
    (d) 闭包中极点与交点的横坐标两两不同；(e) 每个圆都与 D 的边界相交。

    Returns:
        ValidationReport，每条问题带见证对象
    """
    report = ValidationReport(flags={"degenerate": region.degenerate})
    for tg in region.tangencies:
        report.add("tangency", "circles must be disjoint or meet transversally", tg)

    # (b) 三圆共点：闭包中的交点 / 切点被第三个圆经过
    incidence: Dict[Tuple[QuadExt, QuadExt], set] = {}
    for cp in region.boundary_crossings:
        incidence.setdefault((cp.x, cp.y), set()).update(cp.circles)
    for tg in region.tangencies:
        if tg.point is not None:
            px, py = QuadExt(tg.point[0]), QuadExt(tg.point[1])
            if _local_in_closure(region.circles, tg.circles, px, py):
                incidence.setdefault((px, py), set()).update(tg.circles)
    for (px, py), ids in incidence.items():
        if len(ids) >= 3:
            report.add("triple_point", f"{len(ids)} circles {sorted(ids)} pass through one point of the closure",
                       f"({px}, {py})")

    # (c) 极点在其他圆上
    for pole in region.boundary_poles:
        for c in region.circles:
            if c.id != pole.circle and c.raw(*pole.point) == 0:
                report.add("pole_on_circle",
                           f"circle {c.id} passes through the {pole.side} pole of circle {pole.circle}",
                           f"({format_rat(pole.point[0])}, {format_rat(pole.point[1])})")

    # (d) 横坐标两两不同
    labelled = [(QuadExt(p.point[0]), f"{p.side} pole of circle {p.circle}") for p in region.boundary_poles]
    labelled += [(cp.x, f"crossing of circles {cp.circles}") for cp in region.boundary_crossings]
    labelled.sort(key=cmp_to_key(lambda u, v: _cmp_quad(u[0], v[0])))
    for (x1, w1), (x2, w2) in zip(labelled, labelled[1:]):
        if quad_cmp(x1, x2) is Ordering.EQ:
            report.add("genericity", f"{w1} and {w2} share x = {x1}", str(x1))

    # (e) 每个圆都碰到边界
    touching = set()
    if region.decomposition is not None:
        for seg in region.seed_segments():
            for arc in (seg.lower, seg.upper):
                if arc is not None:
                    touching.add(arc[0])
    for p in region.boundary_poles:
        touching.add(p.circle)
    for cp in region.boundary_crossings:
        touching.update(cp.circles)
    for c in region.circles:
        if c.id not in touching:
            report.add("boundary_miss", f"circle {c.id} does not meet the boundary of D", c.id)

    if report.passed:
        logger.info(f"Arrangement validation passed ({len(region.circles)} circles)")
    else:
        logger.warning(f"Arrangement validation found {len(report.issues)} issue(s)")
    return report
