"""
数值核验模块

职责：
- 纤维采样：内点 p 上方 y_i 在半径 √(组乘积) 的球面上均匀分布
- 秩检查：方程组 Jacobian 的数值秩为 l2（奇异值间隙）
- 像检查：网格上 D 内部点纤维存在、D 闭包外点（D 所在分支外）至少一个组乘积为负
- 切空间检查：边界点上方 T_qM 投影到 x 坐标后与所在层的切空间一致（主夹角）
- 独立的浮点 Reeb 图（扫描线 + 区间重叠匹配），用于与精确扫描对照
- Morse-Bott 抽查、奇异横坐标的数值定位、洞数的栅格计数

全部随机数由 SeedSequence(seed, spawn_key=(样本序号,)) 派生，结果与执行顺序无关。
"""

import logging
import math
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from networkx.utils import UnionFind
from scipy import linalg, ndimage, optimize

from .arrangement import Circle, Region, locate_point
from .errors import (
    DisconnectedFiberError,
    MomentForgeError,
    NotInteriorError,
    PreconditionError,
    ResolutionError,
    ToleranceError,
)
from .graph_ops import MultiGraph, is_isomorphic, same_up_to_x_order
from .moment_map import MomentData, emit_system, locate
from .polynomials import Poly, poly_abs_terms, poly_evalf, poly_grad

logger = logging.getLogger("momentforge")


@dataclass(frozen=True)
class Tolerances:
    """数值核验的容差与采样参数（可由 tolerance_config.json 的档位覆盖）"""

    tol_residual: float = 1e-9
    tol_rank: float = 1e3
    tol_angle: float = 1e-5
    boundary_band: float = 1e-6
    grid: int = 200
    samples: int = 100
    seed: int = 7
    oracle_resolution: int = 6
    max_halvings: int = 40

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "Tolerances":
        defaults = cls()
        known = {f.name: type(getattr(defaults, f.name)) for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            logger.warning(f"Ignoring unknown tolerance keys: {unknown}")
        return cls(**{k: known[k](v) for k, v in values.items() if k in known})

    def override(self, **values) -> "Tolerances":
        """只覆盖非 None 的值（对应命令行上给出的参数）"""
        return replace(self, **{k: v for k, v in values.items() if v is not None})


@dataclass
class SampleReport:
    name: str
    samples: int = 0
    max_residual: float = 0.0
    min_rank_gap: float = math.inf
    failures: List[Dict[str, Any]] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self, max_failures: int = 20) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "min_rank_gap": None if math.isinf(self.min_rank_gap) else self.min_rank_gap,
            "failure_count": len(self.failures),
            "failures": self.failures[:max_failures],
            **self.extra,
        }


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """第 index 个样本的独立随机流"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


class _System:
    """发射的方程组及其梯度（浮点求值用）"""

    def __init__(self, d: MomentData):
        self.d = d
        self.polys: List[Poly] = emit_system(d)
        self.grads: List[List[Poly]] = [poly_grad(p) for p in self.polys]
        self.factors = d.polynomials()

    def residuals(self, q) -> np.ndarray:
        return np.array([abs(poly_evalf(p, q)) / max(1.0, poly_abs_terms(p, q)) for p in self.polys])

    def jacobian(self, q) -> np.ndarray:
        return np.array([[poly_evalf(g, q) for g in row] for row in self.grads])


def factor_values(d: MomentData, x) -> np.ndarray:
    """f_j(x)，x 形状 (n,) 或 (N, n)"""
    return np.array([poly_evalf(f, x) for f in d.polynomials()])


def group_products(d: MomentData, x) -> np.ndarray:
    """各组 f_j 的乘积（浮点）"""
    values = factor_values(d, x)
    out = []
    for i in range(1, d.l2 + 1):
        prod = np.ones_like(values[0]) if values.ndim > 1 else 1.0
        for j in d.group_members(i):
            prod = prod * values[j - 1]
        out.append(prod)
    return np.array(out)


def fiber_point(d: MomentData, p: Sequence, index: int, seed: int) -> np.ndarray:
    """
    p 上方的一个环境坐标点：y_i 取半径 √max(组乘积, 0) 的球面上的随机点。
    """
    x = np.array([float(c) for c in p])
    prods = group_products(d, x)
    rng = sample_rng(seed, index)
    parts = [x]
    for i, dim in enumerate(d.dim_map):
        v = rng.standard_normal(dim + 1)
        v /= np.linalg.norm(v)
        parts.append(math.sqrt(max(float(prods[i]), 0.0)) * v)
    return np.concatenate(parts)


def sample_fiber(d: MomentData, p: Sequence, k: int, rng_seed: int) -> np.ndarray:
    """
    内点 p 上方的 k 个纤维点。

    Raises:
        NotInteriorError: p 不在 D 的内部
    """
    stratum = locate(d, [Fraction(c) for c in p])
    if stratum.kind != "interior":
        raise NotInteriorError(f"point {tuple(str(c) for c in p)} is {stratum}, not interior")
    return np.array([fiber_point(d, p, idx, rng_seed) for idx in range(k)])


def system_jacobian(d: MomentData, q) -> np.ndarray:
    return _System(d).jacobian(q)


def _rank_gap(jac: np.ndarray) -> Tuple[float, np.ndarray]:
    """最小奇异值相对舍入噪声 max(shape)·eps·σ_1 的倍数；σ_1 = 0 时记 0"""
    sv = linalg.svd(jac, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0.0, sv
    noise = max(jac.shape) * np.finfo(float).eps * sv[0]
    return float(sv[-1] / noise), sv


def rank_check(d: MomentData, points, tol_rank: float = 1e3, tol_residual: float = 1e-9,
               system: Optional[_System] = None) -> SampleReport:
    """
    在每个点检查残差与 Jacobian 的数值秩（= l2）。

    秩间隙 = σ_l2 / (max(shape)·eps·σ_1)，大于 tol_rank 视为满秩。
    """
    system = system or _System(d)
    report = SampleReport("rank_check")
    for idx, q in enumerate(points):
        q = np.asarray(q, dtype=float)
        res = float(system.residuals(q).max(initial=0.0))
        gap, sv = _rank_gap(system.jacobian(q))
        report.samples += 1
        report.max_residual = max(report.max_residual, res)
        report.min_rank_gap = min(report.min_rank_gap, gap)
        if res > tol_residual or gap <= tol_rank:
            report.failures.append({"index": idx, "point": q.tolist(), "residual": res,
                                    "rank_gap": gap, "singular_values": sv.tolist()})
    logger.info(f"rank_check: {report.samples} samples, min gap {report.min_rank_gap:.3g}, "
                f"{len(report.failures)} failure(s)")
    return report


def _grid_axes(box, grid: int) -> List[List[Fraction]]:
    return [[lo + (hi - lo) * Fraction(k, grid - 1) for k in range(grid)] for lo, hi in box]


def _planar_box(region: Region):
    (xlo, ylo), (xhi, yhi) = region.box
    return ((Fraction(xlo), Fraction(xhi)), (Fraction(ylo), Fraction(yhi)))


def image_check(d: MomentData, grid: int = 200, rng_seed: int = 7, band: float = 1e-6) -> SampleReport:
    """
    像检查：采样点 x 在 D 内部 → 全部组乘积 > 0；在 D 闭包外且不在其他正值分支 → 某个组乘积 < 0。

    平面区域用有理网格，只对边界带内的点和多分支时的每个正值连通块做精确定位；
    一般维数区域改为包围盒内的随机点。
    """
    report = SampleReport("image_check")
    if not d.is_planar:
        return _image_check_random(d, grid * 10, rng_seed, band, report)

    region = d.region
    xs, ys = _grid_axes(_planar_box(region), grid)
    xf = np.array([float(v) for v in xs])
    yf = np.array([float(v) for v in ys])
    gx, gy = np.meshgrid(xf, yf, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    values = factor_values(d, pts)
    prods = group_products(d, pts)
    scale = max(1.0, float(np.abs(values).max()))
    band_abs = band * scale
    positive = (values > band_abs).all(axis=0)
    negative = (values < -band_abs).any(axis=0)

    in_d = np.zeros(len(pts), dtype=bool)
    outside = negative.copy()
    other = np.zeros(len(pts), dtype=bool)
    labels, count = ndimage.label(positive.reshape(grid, grid))
    flat = labels.ravel()
    for lab in range(1, count + 1):
        members = np.flatnonzero(flat == lab)
        rep = members[len(members) // 2]
        stratum = locate_point(region, (xs[rep // grid], ys[rep % grid]))
        if stratum.kind == "interior":
            in_d[members] = True
        else:
            other[members] = True
    band_idx = np.flatnonzero(~positive & ~negative)
    for idx in band_idx:
        stratum = locate_point(region, (xs[idx // grid], ys[idx % grid]))
        if stratum.kind == "interior":
            in_d[idx] = True
        elif stratum.kind == "outside":
            # 闭包外的边界带点：若其所有 f_j ≥ 0 则属于其他正值分支
            if (values[:, idx] >= 0).all():
                other[idx] = True
            else:
                outside[idx] = True

    for idx in np.flatnonzero(in_d):
        if not (prods[:, idx] > 0).all():
            report.failures.append({"point": pts[idx].tolist(), "class": "interior",
                                    "products": prods[:, idx].tolist()})
    for idx in np.flatnonzero(outside & ~other):
        if not (prods[:, idx] < 0).any():
            report.failures.append({"point": pts[idx].tolist(), "class": "outside",
                                    "products": prods[:, idx].tolist()})
    report.samples = len(pts)
    report.extra = {"interior": int(in_d.sum()), "outside": int((outside & ~other).sum()),
                    "other_components": int(other.sum()), "boundary_band": int(len(band_idx))}
    logger.info(f"image_check: {report.samples} grid points, {len(report.failures)} failure(s)")
    return report


def _image_check_random(d: MomentData, count: int, seed: int, band: float, report: SampleReport) -> SampleReport:
    rng = sample_rng(seed, 0)
    box = d.region.box
    lo = np.array([float(a) for a, _ in box])
    hi = np.array([float(b) for _, b in box])
    pts = lo + (hi - lo) * rng.random((count, len(box)))
    values = factor_values(d, pts)
    prods = group_products(d, pts)
    scale = max(1.0, float(np.abs(values).max()))
    for idx in range(count):
        v = values[:, idx]
        if (v > band * scale).all() and not (prods[:, idx] > 0).all():
            report.failures.append({"point": pts[idx].tolist(), "class": "interior",
                                    "products": prods[:, idx].tolist()})
    report.samples = count
    report.extra = {"hypotheses_unverified": True}
    return report


def _orthonormal_span(mat: np.ndarray, abs_tol: float = 1e-6) -> np.ndarray:
    """
    列空间的正交基。

    mat 为正交核基的一部分行，奇异值不超过 1，故用绝对阈值。
    """
    if mat.size == 0:
        return np.zeros((mat.shape[0], 0))
    u, sv, _ = linalg.svd(mat, full_matrices=False)
    rank = int((sv > abs_tol).sum())
    return u[:, :rank]


def tangent_check(d: MomentData, q, tol: float = 1e-5, stratum: Optional[Sequence[int]] = None,
                  tol_residual: float = 1e-9) -> Dict[str, Any]:
    """
    df_q(T_qM) 与所在层切空间的比较。

    T_qM 取 Jacobian 的核，投影到前 n 个坐标后与 {v : ∇f_j·v = 0, j ∈ J} 比较维数与主夹角。

    Args:
        q: M 上（近似）的环境坐标点
        stratum: 所在层的圆编号 J；缺省时由 |f_j| 的大小判定

    Raises:
        ToleranceError: 维数不符、主夹角超过 tol，或层的法向量消失/线性相关
    """
    q = np.asarray(q, dtype=float)
    n = d.n
    x = q[:n]
    values = factor_values(d, x)
    if stratum is None:
        scale = max(1.0, float(np.abs(values).max()))
        stratum = [j for j, v in enumerate(values, 1) if abs(v) <= 1e3 * tol_residual * scale]
    stratum = sorted(stratum)

    jac = _System(d).jacobian(q)
    _, sv, vt = linalg.svd(jac)
    rank = int((sv > 1e-8 * max(sv[0], 1.0)).sum()) if sv.size else 0
    kernel = vt[rank:].T
    pushforward = _orthonormal_span(kernel[:n, :])

    if stratum:
        normals = np.array([[poly_evalf(g, x) for g in poly_grad(d.polynomials()[j - 1])] for j in stratum]).T
        normal_sv = linalg.svd(normals, compute_uv=False)
        if normal_sv[-1] <= 1e-8 * max(1.0, float(np.abs(x).max())):
            raise ToleranceError(f"normals of stratum {stratum} vanish or are dependent at x = {x.tolist()}",
                                 {"stratum": stratum, "pushforward_dim": pushforward.shape[1],
                                  "normal_singular_values": normal_sv.tolist()})
        expected = linalg.null_space(normals.T)
    else:
        expected = np.eye(n)

    diagnostics = {"stratum": stratum, "pushforward_dim": pushforward.shape[1],
                   "expected_dim": expected.shape[1], "jacobian_rank": rank}
    if pushforward.shape[1] != expected.shape[1]:
        raise ToleranceError(f"pushforward has dimension {pushforward.shape[1]}, stratum tangent space has "
                             f"dimension {expected.shape[1]}", diagnostics)
    max_angle = 0.0
    if expected.shape[1]:
        max_angle = float(np.max(linalg.subspace_angles(pushforward, expected)))
    diagnostics["max_angle"] = max_angle
    if max_angle > tol:
        raise ToleranceError(f"principal angle {max_angle:.3g} exceeds {tol:.3g}", diagnostics)
    diagnostics["singular"] = bool(stratum)
    diagnostics["passed"] = True
    return diagnostics


# ============================================================
# 边界采样
# ============================================================

def _closure_circles(region: Region) -> List[int]:
    touched = set()
    for seg in region.seed_segments():
        touched.update(a[0] for a in (seg.lower, seg.upper) if a is not None)
    touched.update(p.circle for p in region.boundary_poles)
    return sorted(touched)


def _circle_point(c: Circle, t: Fraction) -> Tuple[Fraction, Fraction]:
    denom = 1 + t * t
    return c.center[0] + c.radius * (1 - t * t) / denom, c.center[1] + c.radius * 2 * t / denom


def boundary_points(d: MomentData, count: int) -> List[Tuple[Tuple[Fraction, Fraction], Tuple[int, ...]]]:
    """
    闭包中各圆弧上的有理点（半角正切参数），按圆轮流取，精确定位确认在边界上。

    Returns:
        [(点, 所在层的圆编号)]
    """
    region = d.region
    if not isinstance(region, Region):
        raise PreconditionError("boundary sampling is available for planar circle data only")
    circles = _closure_circles(region)
    if not circles or count <= 0:
        return []
    per_circle = 4 * count
    params = [Fraction(math.tan(math.pi * (k + 0.5) / per_circle - math.pi / 2)).limit_denominator(1000)
              for k in range(per_circle)]
    out = []
    seen = set()
    for k in range(per_circle):
        for cid in circles:
            p = _circle_point(region.circle(cid), params[(k * 7 + cid) % per_circle])
            if p in seen:
                continue
            seen.add(p)
            stratum = locate_point(region, p)
            if stratum.kind == "on_circles":
                out.append((p, stratum.circles))
                if len(out) >= count:
                    return out
    return out


def random_interior_points(d: MomentData, count: int, seed: int, attempts: int = 50) -> List[Tuple[Fraction, ...]]:
    """包围盒内的随机有理点，精确定位为内部者保留"""
    box = _planar_box(d.region) if d.is_planar else d.region.box
    out = []
    for idx in range(count * attempts):
        rng = sample_rng(seed, 10 ** 6 + idx)
        p = tuple(Fraction(float(lo) + (float(hi) - float(lo)) * rng.random()).limit_denominator(1000)
                  for lo, hi in box)
        if locate(d, p).kind == "interior":
            out.append(p)
            if len(out) >= count:
                break
    return out


# ============================================================
# 浮点 Reeb 图
# ============================================================

def _float_crossings(c1: Circle, c2: Circle) -> List[Tuple[float, float]]:
    (p1, p2), r1 = (float(c1.center[0]), float(c1.center[1])), float(c1.radius)
    (q1, q2), r2 = (float(c2.center[0]), float(c2.center[1])), float(c2.radius)
    dx, dy = q1 - p1, q2 - p2
    dist = math.hypot(dx, dy)
    if dist == 0 or dist > r1 + r2 or dist < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + dist * dist) / (2 * dist)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    mx, my = p1 + a * dx / dist, p2 + a * dy / dist
    return [(mx + h * dy / dist, my - h * dx / dist), (mx - h * dy / dist, my + h * dx / dist)]


def _slice_intervals(circles: Sequence[Circle], x: float) -> List[Tuple[float, float]]:
    bounds = []
    for c in circles:
        rad = float(c.radius) ** 2 - (x - float(c.center[0])) ** 2
        if rad > 0:
            s = math.sqrt(rad)
            bounds.extend([float(c.center[1]) - s, float(c.center[1]) + s])
    bounds.sort()
    ends = [-math.inf] + bounds + [math.inf]
    out = []
    for lo, hi in zip(ends, ends[1:]):
        if hi <= lo:
            continue
        if math.isinf(lo) and math.isinf(hi):
            mid = 0.0
        elif math.isinf(lo):
            mid = hi - 1.0
        elif math.isinf(hi):
            mid = lo + 1.0
        else:
            mid = 0.5 * (lo + hi)
        if all(c.valuef(x, mid) > 0 for c in circles):
            out.append((lo, hi))
    return out


def _overlap(a: Tuple[float, float], b: Tuple[float, float]) -> bool:
    return max(a[0], b[0]) < min(a[1], b[1])


def _touches(interval: Tuple[float, float], y: float, delta: float) -> bool:
    return interval[0] - delta <= y <= interval[1] + delta


def reeb_oracle(d: MomentData, resolution: int = 6) -> MultiGraph:
    """
    不依赖精确扫描的浮点 Reeb 图。

    事件横坐标之间各取 resolution 个采样线，同一切片内区间按顺序匹配；
    跨事件时按区间重叠建立对应，一一对应且不接触事件点者直接延续，其余形成顶点。

    Raises:
        DisconnectedFiberError: 某组维数为 0
        ResolutionError: 切片内区间个数变化（漏掉事件）
    """
    region = d.region
    if not isinstance(region, Region):
        raise PreconditionError("the Reeb oracle needs planar circle data")
    if any(m == 0 for m in d.dim_map):
        raise DisconnectedFiberError("fibers are disconnected when some m_l2 vanishes")
    circles = list(region.circles)
    resolution = max(2, int(resolution))

    events: List[Tuple[float, float]] = []
    for c in circles:
        x0, y0, r = float(c.center[0]), float(c.center[1]), float(c.radius)
        events.extend([(x0 - r, y0), (x0 + r, y0)])
    for i, c1 in enumerate(circles):
        for c2 in circles[i + 1:]:
            events.extend(_float_crossings(c1, c2))
    events.sort()
    clusters: List[List[Tuple[float, float]]] = []
    for e in events:
        if clusters and abs(e[0] - clusters[-1][-1][0]) <= 1e-12 * (1 + abs(e[0])):
            clusters[-1].append(e)
        else:
            clusters.append([e])
    xs = [float(np.mean([e[0] for e in cl])) for cl in clusters]
    rmax = max(float(c.radius) for c in circles)

    def offset(k: int) -> float:
        width = xs[k + 1] - xs[k]
        return min(1e-10 * (1 + abs(xs[k])), width / 4)

    slabs: List[List[List[Tuple[float, float]]]] = []
    for k in range(len(xs) - 1):
        h = offset(k)
        ts = np.linspace(xs[k] + h, xs[k + 1] - h, resolution)
        samples = [_slice_intervals(circles, float(t)) for t in ts]
        # 切片内区间顺序不变，按序号对应，只核对个数
        if len({len(s) for s in samples}) != 1:
            raise ResolutionError(f"slice topology changes inside slab ({xs[k]}, {xs[k + 1]})")
        slabs.append(samples)

    pieces = UnionFind((k, i) for k, samples in enumerate(slabs) for i in range(len(samples[0])))
    vertex_x: List[float] = []
    starts: Dict[Tuple[int, int], int] = {}
    ends: Dict[Tuple[int, int], int] = {}
    for k, cluster in enumerate(clusters):
        left = slabs[k - 1][-1] if k > 0 else []
        right = slabs[k][0] if k < len(slabs) else []
        h = max([offset(s) for s in (k - 1, k) if 0 <= s < len(xs) - 1], default=1e-10)
        delta = 10 * math.sqrt(2 * rmax * h) + 1e-9
        nodes = [("L", i) for i in range(len(left))] + [("R", j) for j in range(len(right))] + \
                [("E", e) for e in range(len(cluster))]
        uf = UnionFind(nodes)
        for i, a in enumerate(left):
            for j, b in enumerate(right):
                if _overlap(a, b):
                    uf.union(("L", i), ("R", j))
        for e, (_, ey) in enumerate(cluster):
            for i, a in enumerate(left):
                if _touches(a, ey, delta):
                    uf.union(("E", e), ("L", i))
            for j, b in enumerate(right):
                if _touches(b, ey, delta):
                    uf.union(("E", e), ("R", j))
        for group in uf.to_sets():
            lefts = [i for tag, i in group if tag == "L"]
            rights = [j for tag, j in group if tag == "R"]
            has_event = any(tag == "E" for tag, _ in group)
            if not lefts and not rights:
                continue
            if not has_event and len(lefts) == 1 and len(rights) == 1:
                pieces.union((k - 1, lefts[0]), (k, rights[0]))
                continue
            vid = len(vertex_x)
            vertex_x.append(xs[k])
            for i in lefts:
                ends[(k - 1, i)] = vid
            for j in rights:
                starts[(k, j)] = vid

    chains = [sorted(s) for s in pieces.to_sets()]
    comp = UnionFind([("v", v) for v in range(len(vertex_x))] + [("c", c) for c in range(len(chains))])
    chain_ends = []
    chain_of: Dict[Tuple[int, int], int] = {}
    for cid, members in enumerate(chains):
        for key in members:
            chain_of[key] = cid
        u, v = starts.get(members[0]), ends.get(members[-1])
        chain_ends.append((u, v))
        for end in (u, v):
            if end is not None:
                comp.union(("c", cid), ("v", end))

    seed_key = _seed_piece(region, xs, slabs, resolution)
    root = comp[("c", chain_of[seed_key])]
    vids = sorted((v for v in range(len(vertex_x)) if comp[("v", v)] == root), key=lambda v: vertex_x[v])
    index = {v: k for k, v in enumerate(vids)}
    edges = []
    for cid, (u, v) in enumerate(chain_ends):
        if comp[("c", cid)] != root:
            continue
        if u is None or v is None:
            raise ResolutionError("seed component reaches an unbounded slice interval")
        edges.append((index[u], index[v]))
    graph = MultiGraph(tuple(range(len(vids))), tuple(sorted(edges)), tuple(vertex_x[v] for v in vids))
    logger.info(f"reeb_oracle: {graph.n_vertices} vertices, {graph.n_edges} edges")
    return graph


def _seed_piece(region: Region, xs: List[float], slabs, resolution: int) -> Tuple[int, int]:
    sx, sy = float(region.seed[0]), float(region.seed[1])
    for k in range(len(xs) - 1):
        if xs[k] < sx < xs[k + 1]:
            intervals = _slice_intervals(region.circles, sx)
            if len(intervals) != len(slabs[k][0]):
                raise ResolutionError("slice at the seed abscissa disagrees with its slab")
            for i, (lo, hi) in enumerate(intervals):
                if lo < sy < hi:
                    return k, i
    # 种子恰在事件横坐标上：改用右侧切片的第一条采样线
    for k in range(len(xs) - 1):
        if abs(xs[k] - sx) <= 1e-12 * (1 + abs(sx)):
            for i, (lo, hi) in enumerate(slabs[k][0]):
                if lo < sy < hi:
                    return k, i
    raise ResolutionError("seed is not inside any sampled slice interval")


def oracle_agrees(d: MomentData, exact: MultiGraph, resolution: int = 6, tol: float = 1e-6) -> bool:
    oracle = reeb_oracle(d, resolution)
    if exact.xs is not None:
        return same_up_to_x_order(oracle, exact, tol)
    return is_isomorphic(oracle, exact)


# ============================================================
# Morse-Bott 抽查与奇异点定位
# ============================================================

def _group_product_at(d: MomentData, group: int, x1: float, x2: float) -> float:
    prod = 1.0
    for j in d.group_members(group):
        prod *= d.region.circle(j).valuef(x1, x2)
    return prod


def _pole_second_difference(d: MomentData, pole, step: float) -> float:
    c = d.region.circle(pole.circle)
    group = d.group_of(pole.circle)
    x0, y0 = float(pole.point[0]), float(pole.point[1])
    r = float(c.radius)
    direction = 1.0 if _group_product_at(d, group, x0 + 1e-6 * r, y0) > 0 else -1.0

    def x_of(u: float) -> float:
        target = u * u
        reach = 1e-3 * r
        while _group_product_at(d, group, x0 + direction * reach, y0) <= target and reach < r:
            reach *= 2
        return optimize.brentq(lambda x: _group_product_at(d, group, x, y0) - target,
                               x0, x0 + direction * reach, xtol=1e-15)

    return (x_of(step) + x_of(-step) - 2 * x0) / step ** 2


def _crossing_hessian(d: MomentData, cp, step: float) -> np.ndarray:
    j1, j2 = cp.circles
    g1, g2 = d.group_of(j1), d.group_of(j2)
    start = np.array([float(cp.x), float(cp.y)])

    def x_of(u: float, w: float) -> float:
        def eqs(x):
            return [_group_product_at(d, g1, x[0], x[1]) - u * u, _group_product_at(d, g2, x[0], x[1]) - w * w]
        return float(optimize.fsolve(eqs, start, xtol=1e-14)[0])

    x00 = x_of(0.0, 0.0)
    huu = (x_of(step, 0) + x_of(-step, 0) - 2 * x00) / step ** 2
    hww = (x_of(0, step) + x_of(0, -step) - 2 * x00) / step ** 2
    huw = (x_of(step, step) - x_of(step, -step) - x_of(-step, step) + x_of(-step, -step)) / (4 * step ** 2)
    return np.array([[huu, huw], [huw, hww]])


def morse_bott_spot_check(d: MomentData, count: int = 5, step: float = 1e-3, threshold: float = 1e-4) -> SampleReport:
    """
    在闭包中的奇异点处沿纤维法向取 f0 的二阶差分，检查其非退化。

    极点：y_i = (u, 0, ...) 时解 P_i(x1, p2) = u²；交点：同时解两组的 P = u², w²，取 Hessian 最小特征值。
    """
    region = d.region
    if not isinstance(region, Region):
        raise PreconditionError("Morse-Bott spot checks need planar circle data")
    report = SampleReport("morse_bott_spot_check")
    sites = [("pole", p, float(p.point[0])) for p in region.boundary_poles]
    sites += [("crossing", cp, float(cp.x)) for cp in region.boundary_crossings]
    sites.sort(key=lambda item: item[2])
    values = []
    for kind, obj, x in sites[:count]:
        if kind == "pole":
            value = abs(_pole_second_difference(d, obj, step))
        else:
            value = float(np.min(np.abs(np.linalg.eigvalsh(_crossing_hessian(d, obj, step)))))
        values.append({"kind": kind, "x": x, "value": value})
        report.samples += 1
        if not value > threshold:
            report.failures.append({"kind": kind, "x": x, "value": value})
    report.extra = {"sites": values}
    return report


def _closure_arcs(region: Region, c: Circle) -> List[Tuple[float, float]]:
    """
    圆 c 被其他圆的交点切成的弧中落在 D̄ 边界上的那些，按角度区间 (a, b) 给出，b 可超过 2π。

    弧内部不再有交点，是否在闭包中由中点的精确定位决定。
    """
    cx, cy = float(c.center[0]), float(c.center[1])
    angles = sorted({math.atan2(y - cy, x - cx) % (2 * math.pi)
                     for other in region.circles if other.id != c.id
                     for x, y in _float_crossings(c, other)})
    if angles:
        arcs = list(zip(angles, angles[1:])) + [(angles[-1], angles[0] + 2 * math.pi)]
    else:
        # 整圆：起点避开 θ = 0, π 处的极点
        arcs = [(1.0, 1.0 + 2 * math.pi)]
    out = []
    for a, b in arcs:
        t = Fraction(math.tan(0.25 * (a + b))).limit_denominator(10 ** 9)
        if locate_point(region, _circle_point(c, t)).kind == "on_circles":
            out.append((a, b))
    return out


def localize_singular_x(d: MomentData, samples: int = 400, tol: float = 1e-6) -> SampleReport:
    """
    数值定位 f0 的奇异点：沿闭包中每条边界弧取纤维点 q(θ)，
    σ(θ) = [J(q); e1] 的最小奇异值，其零点即 dx1 在 T_qM 上消失处；
    弧内部的局部极小处再细化，弧端点（交点）直接检查 σ；
    定位到的横坐标与精确的奇异横坐标逐一对照。
    """
    from .reeb_sweep import singular_x_values

    region = d.region
    if not isinstance(region, Region):
        raise PreconditionError("singular localisation needs planar circle data")
    system = _System(d)
    ambient = len(d.variables())
    e1 = np.zeros(ambient)
    e1[0] = 1.0
    slices = d.y_slices()

    def point_on(c: Circle, theta: float) -> np.ndarray:
        x = np.array([float(c.center[0]) + float(c.radius) * math.cos(theta),
                      float(c.center[1]) + float(c.radius) * math.sin(theta)])
        prods = group_products(d, x)
        q = np.zeros(ambient)
        q[:2] = x
        for i, sl in enumerate(slices):
            q[sl.start] = math.sqrt(max(float(prods[i]), 0.0))
        return q

    def sigma(c: Circle, theta: float) -> float:
        q = point_on(c, theta)
        mat = np.vstack([system.jacobian(q), e1])
        return float(linalg.svd(mat, compute_uv=False)[-1])

    detected: List[float] = []

    def record(c: Circle, theta: float) -> None:
        x = float(point_on(c, theta)[0])
        if all(abs(x - other) > 1e-7 for other in detected):
            detected.append(x)

    for cid in _closure_circles(region):
        c = region.circle(cid)
        arcs = _closure_arcs(region, c)
        sampled = []
        for a, b in arcs:
            count = max(8, int(samples * (b - a) / (2 * math.pi)))
            thetas = np.linspace(a, b, count + 2)[1:-1]
            sampled.append((a, b, thetas, np.array([sigma(c, t) for t in thetas])))
        if not sampled:
            continue
        cutoff = 1e-2 * max(float(sig.max()) for *_, sig in sampled)
        for a, b, thetas, sig in sampled:
            step = thetas[1] - thetas[0]
            for k in range(1, len(thetas) - 1):
                if sig[k] > sig[k - 1] or sig[k] > sig[k + 1] or sig[k] > cutoff:
                    continue
                lo, hi = max(a, thetas[k] - step), min(b, thetas[k] + step)
                res = optimize.minimize_scalar(lambda t: sigma(c, t), bounds=(lo, hi),
                                               method="bounded", options={"xatol": 1e-13})
                if res.fun < 1e-5:
                    record(c, res.x)
            if b - a < 2 * math.pi - 1e-12:
                for end in (a, b):
                    if sigma(c, end) < 1e-5:
                        record(c, end)
    detected.sort()
    expected = [float(v) for v in singular_x_values(d)]
    report = SampleReport("localize_singular_x", samples=len(detected))
    for x in expected:
        if not any(abs(x - y) <= tol for y in detected):
            report.failures.append({"missing": x})
    for y in detected:
        if not any(abs(x - y) <= tol for x in expected):
            report.failures.append({"spurious": y})
    deviations = [min(abs(x - y) for y in detected) for x in expected] if detected else []
    report.extra = {"detected": detected, "expected": expected,
                    "max_deviation": max(deviations) if deviations else None}
    return report


def hole_count_oracle(region: Region, grid: int = 200) -> int:
    """
    栅格洞数：D̄ 的补集中不接触包围盒边界的连通块个数（D 用 8 连通，补集用 4 连通）。
    """
    xs, ys = _grid_axes(_planar_box(region), grid)
    gx, gy = np.meshgrid([float(v) for v in xs], [float(v) for v in ys], indexing="ij")
    closure = np.ones(gx.shape, dtype=bool)
    for c in region.circles:
        closure &= c.valuef(gx, gy) >= 0
    labels, _ = ndimage.label(closure, structure=np.ones((3, 3), dtype=int))
    sx = int(np.argmin(np.abs(gx[:, 0] - float(region.seed[0]))))
    sy = int(np.argmin(np.abs(gy[0, :] - float(region.seed[1]))))
    if labels[sx, sy] == 0:
        raise ResolutionError("grid is too coarse to resolve the seed")
    region_mask = labels == labels[sx, sy]
    holes, count = ndimage.label(~region_mask)
    border = set(np.unique(np.concatenate([holes[0, :], holes[-1, :], holes[:, 0], holes[:, -1]])))
    return sum(1 for lab in range(1, count + 1) if lab not in border)


# ============================================================
# 汇总
# ============================================================

def _guarded(name: str, run) -> SampleReport:
    try:
        return run()
    except MomentForgeError as e:
        return SampleReport(name, failures=[{"message": str(e), "error_type": e.error_type}])


def verify(d: MomentData, tol: Optional[Tolerances] = None) -> Dict[str, Any]:
    """
    依次运行全部检查，返回 {"passed": bool, "checks": {名称: 报告}}。
    """
    from .reeb_sweep import reeb_graph

    tol = tol or Tolerances()
    system = _System(d)
    checks: Dict[str, SampleReport] = {}

    interior = random_interior_points(d, max(1, tol.samples // 2), tol.seed)
    points = [fiber_point(d, p, idx, tol.seed) for idx, p in enumerate(interior)]
    boundary = boundary_points(d, tol.samples - len(points)) if d.is_planar else []
    points += [fiber_point(d, p, 10 ** 5 + idx, tol.seed) for idx, (p, _) in enumerate(boundary)]
    checks["rank"] = rank_check(d, points, tol.tol_rank, tol.tol_residual, system)
    checks["image"] = image_check(d, tol.grid, tol.seed, tol.boundary_band)

    if d.is_planar:
        tangent = SampleReport("tangent_check")
        worst = 0.0
        for idx, (p, circles) in enumerate(boundary[:20]):
            q = fiber_point(d, p, 2 * 10 ** 5 + idx, tol.seed)
            tangent.samples += 1
            try:
                diag = tangent_check(d, q, tol.tol_angle, stratum=circles, tol_residual=tol.tol_residual)
                worst = max(worst, diag["max_angle"])
            except ToleranceError as e:
                tangent.failures.append({"point": [str(c) for c in p], "message": str(e), **e.diagnostics})
        tangent.extra = {"max_angle": worst}
        checks["tangent"] = tangent

        holes = SampleReport("hole_count", samples=1)
        counted = hole_count_oracle(d.region, tol.grid)
        holes.extra = {"grid_holes": counted, "exact_holes": d.region.hole_count}
        if counted != d.region.hole_count:
            holes.failures.append({"grid_holes": counted, "exact_holes": d.region.hole_count})
        checks["hole_count"] = holes

        if all(m >= 1 for m in d.dim_map):
            oracle = SampleReport("reeb_oracle", samples=1)
            try:
                exact = reeb_graph(d).to_multigraph()
                if not oracle_agrees(d, exact, tol.oracle_resolution):
                    oracle.failures.append({"message": "floating Reeb graph differs from the exact sweep"})
            except MomentForgeError as e:
                oracle.failures.append({"message": str(e), "error_type": e.error_type})
            checks["reeb_oracle"] = oracle
            checks["singular_x"] = _guarded("localize_singular_x", lambda: localize_singular_x(d))
            checks["morse_bott"] = _guarded("morse_bott_spot_check", lambda: morse_bott_spot_check(d))

    passed = all(r.passed for r in checks.values())
    level = logging.INFO if passed else logging.WARNING
    logger.log(level, f"verify: {'PASS' if passed else 'FAIL'} "
                      f"({', '.join(f'{k}={len(r.failures)}' for k, r in checks.items())})")
    return {"passed": passed, "checks": {k: r.to_dict() for k, r in checks.items()}}
