"""
矩型映射数据模块

职责：
- MomentData：区域 D、分组映射 m_l1_l2、维数映射 m_l2 以及导出量 n, l1, l2, m
- 分组条件的校验（分组满射、闭包内交点两圆分组不同）
- 生成流形 M 的定义多项式组（完全展开的规范形式 + 因式显示形式）
- 按层给出纤维的微分同胚类型 FiberClass
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .arrangement import INTERIOR, OUTSIDE, Region, Stratum, locate_point, on_circles
from .errors import DimensionError, OutsideError, PreconditionError, SeedOutsideError, ValidationReport
from .exact_arith import format_rat, quad_sign
from .polynomials import Poly, poly_eval, poly_to_text, x_names, y_name

logger = logging.getLogger("momentforge")


@dataclass(frozen=True)
class FiberClass:
    """纤维类型：球面维数列表，空列表表示单点"""

    sphere_dims: Tuple[int, ...]

    @property
    def total_dim(self) -> int:
        return sum(self.sphere_dims)

    @property
    def is_point(self) -> bool:
        return not self.sphere_dims

    def to_list(self) -> List[int]:
        return list(self.sphere_dims)

    def __str__(self):
        if not self.sphere_dims:
            return "pt"
        return " x ".join(f"S^{k}" for k in self.sphere_dims)


@dataclass(frozen=True)
class GeneralRegion:
    """
    一般维数的区域：用户给出的多项式 f_j 与有理种子点。

    不做排列校验，只支持方程组生成与数值检查。
    """

    polys: Tuple[Poly, ...]
    seed: Tuple[Fraction, ...]
    box: Optional[Tuple[Tuple[Fraction, Fraction], ...]] = None

    def __post_init__(self):
        if not self.polys:
            raise PreconditionError("at least one polynomial is required")
        variables = self.polys[0].variables
        if any(p.variables != variables for p in self.polys):
            raise PreconditionError("all polynomials must share one variable list")
        if list(variables) != x_names(len(variables)):
            raise PreconditionError(f"variables must be x1..xn, got {list(variables)}")
        if len(self.seed) != len(variables):
            raise PreconditionError(f"seed arity {len(self.seed)} != {len(variables)}")
        object.__setattr__(self, "seed", tuple(Fraction(s) for s in self.seed))
        for j, p in enumerate(self.polys, 1):
            if quad_sign(poly_eval(p, self.seed)) <= 0:
                raise SeedOutsideError(f"seed is not on the positive side of f_{j}")
        if self.box is None:
            box = tuple((s - 2, s + 2) for s in self.seed)
            object.__setattr__(self, "box", box)

    @property
    def n(self) -> int:
        return len(self.polys[0].variables)

    def polynomials(self) -> List[Poly]:
        return list(self.polys)


AnyRegion = Union[Region, GeneralRegion]


@dataclass(frozen=True)
class MomentData:
    """
    主定理 1 的数据 (D, {f_j}, m_l1_l2, m_l2)。

    group_map[j-1] 为第 j 个超曲面所在的组（1 起），dim_map[i-1] 为第 i 组的球面维数。
    """

    region: AnyRegion
    group_map: Tuple[int, ...]
    dim_map: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "group_map", tuple(int(g) for g in self.group_map))
        object.__setattr__(self, "dim_map", tuple(int(m) for m in self.dim_map))
        if len(self.group_map) != self.l1:
            raise PreconditionError(f"m_l1_l2 has {len(self.group_map)} entries, expected {self.l1}")
        if not self.dim_map:
            raise PreconditionError("m_l2 must have at least one entry")
        for j, g in enumerate(self.group_map, 1):
            if not 1 <= g <= self.l2:
                raise PreconditionError(f"m_l1_l2({j}) = {g} is outside 1..{self.l2}")
        for i, m in enumerate(self.dim_map, 1):
            if m < 0:
                raise DimensionError(f"m_l2({i}) = {m} must be non-negative")

    @property
    def n(self) -> int:
        return self.region.n

    @property
    def l1(self) -> int:
        return len(self.region.polynomials()) if isinstance(self.region, GeneralRegion) else len(self.region.circles)

    @property
    def l2(self) -> int:
        return len(self.dim_map)

    @property
    def m(self) -> int:
        return self.n + sum(self.dim_map)

    @property
    def ambient_dim(self) -> int:
        return self.m + self.l2

    @property
    def is_planar(self) -> bool:
        return isinstance(self.region, Region)

    def polynomials(self) -> List[Poly]:
        return self.region.polynomials()

    def group_of(self, j: int) -> int:
        return self.group_map[j - 1]

    def group_members(self, i: int) -> List[int]:
        return [j for j, g in enumerate(self.group_map, 1) if g == i]

    def variables(self) -> List[str]:
        names = x_names(self.n)
        for i, dim in enumerate(self.dim_map, 1):
            names.extend(y_name(i, k) for k in range(1, dim + 2))
        return names

    def y_slices(self) -> List[slice]:
        """各组 y 变量在环境坐标中的位置"""
        out = []
        start = self.n
        for dim in self.dim_map:
            out.append(slice(start, start + dim + 1))
            start += dim + 1
        return out

    def fiber_for_groups(self, hit_groups) -> FiberClass:
        hit = set(hit_groups)
        return FiberClass(tuple(m for i, m in enumerate(self.dim_map, 1) if i not in hit))

    def fiber_for_circles(self, circles: Sequence[int]) -> FiberClass:
        return self.fiber_for_groups(self.group_of(j) for j in circles)

    def with_maps(self, group_map, dim_map) -> "MomentData":
        return MomentData(self.region, tuple(group_map), tuple(dim_map))


def validate_moment_data(d: MomentData) -> ValidationReport:
    """
    校验分组条件：分组映射满射，且闭包中每个交点的两个圆分在不同的组。

    Returns:
        ValidationReport；一般维数区域附带 hypotheses_unverified 标记
    """
    report = ValidationReport()
    image = set(d.group_map)
    for i in range(1, d.l2 + 1):
        if i not in image:
            report.add("not_surjective", f"group {i} has no hypersurface assigned", i)
    if isinstance(d.region, GeneralRegion):
        report.flags["hypotheses_unverified"] = True
        return report
    for cp in d.region.boundary_crossings:
        j1, j2 = cp.circles
        if d.group_of(j1) == d.group_of(j2):
            report.add("injectivity",
                       f"circles {j1} and {j2} cross in the closure of D but share group {d.group_of(j1)}",
                       f"({cp.x}, {cp.y})")
    return report


def emit_system(d: MomentData) -> List[Poly]:
    """
    定义多项式组：第 i 个为组 i 中 f_j 的乘积减去 Σ_k y_i_k²。

    变量为 x1..xn, y_i_k（k = 1..m_l2(i)+1），共 m + l2 个。
    """
    variables = d.variables()
    polys = d.polynomials()
    system = []
    for i in range(1, d.l2 + 1):
        product = Poly.constant(variables, 1)
        for j in d.group_members(i):
            product = product * polys[j - 1].extend(variables)
        for k in range(1, d.dim_map[i - 1] + 2):
            y = Poly.variable(variables, y_name(i, k))
            product = product - y * y
        system.append(product)
    logger.info(f"Emitted {len(system)} polynomial(s) in {len(variables)} variables")
    return system


def factored_text(d: MomentData, i: int) -> str:
    """第 i 个方程的因式显示形式，如 "(1 - 1*x1^2 - 1*x2^2) - 1*y_1_1^2 - 1*y_1_2^2" """
    polys = d.polynomials()
    factors = "*".join(f"({poly_to_text(polys[j - 1])})" for j in d.group_members(i)) or "1"
    squares = "".join(f" - 1*{y_name(i, k)}^2" for k in range(1, d.dim_map[i - 1] + 2))
    return factors + squares


def manifold_is_connected(d: MomentData) -> bool:
    """D 连通且每组维数 ≥ 1 时 M 连通"""
    return all(m >= 1 for m in d.dim_map)


def morse_type(d: MomentData) -> str:
    """l2 = 1 时复合函数为 Morse 函数，否则为 Morse-Bott"""
    return "morse" if d.l2 == 1 else "morse_bott"


def emit_manifest(d: MomentData) -> Dict:
    system = emit_system(d)
    return {
        "n": d.n,
        "l1": d.l1,
        "l2": d.l2,
        "m": d.m,
        "ambient_dim": d.ambient_dim,
        "variables": d.variables(),
        "connected": manifold_is_connected(d),
        "morse_type": morse_type(d),
        "polynomials": [poly_to_text(p) for p in system],
        "factored": [factored_text(d, i) for i in range(1, d.l2 + 1)],
    }


def locate(d: MomentData, p) -> Stratum:
    """平面区域用精确点定位；一般区域只看 f_j 的符号"""
    if isinstance(d.region, Region):
        return locate_point(d.region, p)
    zero = []
    for j, f in enumerate(d.polynomials(), 1):
        s = quad_sign(poly_eval(f, list(p)))
        if s < 0:
            return OUTSIDE
        if s == 0:
            zero.append(j)
    return on_circles(zero) if zero else INTERIOR


def fiber_class_at(d: MomentData, p) -> FiberClass:
    """
    点 p 上方纤维的类型。

    Raises:
        OutsideError: p 不在 D 的闭包中
    """
    stratum = locate(d, p)
    if stratum.kind == "outside":
        raise OutsideError(f"point ({', '.join(str(c) for c in p)}) is outside the closure of D")
    return d.fiber_for_circles(stratum.circles)


def strata_table(d: MomentData) -> List[Dict]:
    """
    各层纤维表：内部、每条边界曲线、闭包中的每个交点与极点。
    """
    rows = [{"stratum": "interior", "circles": "", "x": "", "fiber": str(d.fiber_for_circles(())),
             "dims": d.fiber_for_circles(()).to_list(), "dim": d.fiber_for_circles(()).total_dim}]
    if isinstance(d.region, Region):
        touched = set()
        for seg in d.region.seed_segments():
            touched.update(a[0] for a in (seg.lower, seg.upper) if a is not None)
        touched.update(p.circle for p in d.region.boundary_poles)
        circles = sorted(touched) if touched else [c.id for c in d.region.circles]
    else:
        circles = list(range(1, d.l1 + 1))
    for j in circles:
        fc = d.fiber_for_circles((j,))
        rows.append({"stratum": "arc", "circles": str(j), "x": "", "fiber": str(fc),
                     "dims": fc.to_list(), "dim": fc.total_dim})
    if isinstance(d.region, Region):
        for cp in d.region.boundary_crossings:
            fc = d.fiber_for_circles(cp.circles)
            rows.append({"stratum": "crossing", "circles": f"{cp.circles[0]},{cp.circles[1]}",
                         "x": str(cp.x), "fiber": str(fc), "dims": fc.to_list(), "dim": fc.total_dim})
        for pole in d.region.boundary_poles:
            fc = d.fiber_for_circles((pole.circle,))
            rows.append({"stratum": f"{pole.side}_pole", "circles": str(pole.circle),
                         "x": format_rat(pole.point[0]), "fiber": str(fc), "dims": fc.to_list(),
                         "dim": fc.total_dim})
    return rows


def fiber_dim_bound(d: MomentData) -> int:
    """
    纤维维数上界 m - n，并逐层检查。

    Raises:
        DimensionError: 某层纤维维数超过上界
    """
    bound = d.m - d.n
    for row in strata_table(d):
        if row["dim"] > bound:
            raise DimensionError(f"stratum {row['stratum']} {row['circles']} has fiber dimension "
                                 f"{row['dim']} > m - n = {bound}")
    return bound


def singular_fibers(d: MomentData) -> List[Dict]:
    """闭包中每个极点与交点上方的奇异纤维（临界子流形）"""
    if not isinstance(d.region, Region):
        return []
    out = []
    for pole in d.region.boundary_poles:
        out.append({"kind": "pole", "x": format_rat(pole.point[0]), "y": format_rat(pole.point[1]),
                    "circles": [pole.circle], "fiber": d.fiber_for_circles((pole.circle,)).to_list()})
    for cp in d.region.boundary_crossings:
        out.append({"kind": "crossing", "x": str(cp.x), "y": str(cp.y),
                    "circles": list(cp.circles), "fiber": d.fiber_for_circles(cp.circles).to_list()})
    return out
