"""
内置样例数据

职责：
- 命名的输入文档（圆盘、圆环、两圆相交的透镜、双孔区域、横坐标重合的反例、相切的负对照）
- 随机有效圆族（随机化测试与 Reeb 图对照用）

CLI 的 --input 既接受文件路径也接受这里的样例名。
"""

import copy
import json
import logging
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from .arrangement import Circle, region_from_seed, validate_arrangement
from .errors import MomentForgeError
from .moment_map import MomentData

logger = logging.getLogger("momentforge")


def _circle(cid: int, cx: str, cy: str, r: str, orientation: str) -> Dict:
    return {"id": cid, "center": [cx, cy], "radius": r, "orientation": orientation}


FIXTURE_DOCUMENTS: Dict[str, Dict] = {
    "disk": {
        "circles": [_circle(1, "0", "0", "1", "inside")],
        "region": {"seed": ["0", "0"]},
        "maps": {"m_l1_l2": [1], "m_l2": [1]},
    },
    "annulus": {
        "circles": [_circle(1, "0", "0", "2", "inside"), _circle(2, "0", "0", "1", "outside")],
        "region": {"seed": ["3/2", "0"]},
        "maps": {"m_l1_l2": [1, 1], "m_l2": [1]},
    },
    # 两个内向圆的交：透镜，两交点分属不同组
    "lens": {
        "circles": [_circle(1, "0", "0", "2", "inside"), _circle(2, "2", "1", "2", "inside")],
        "region": {"seed": ["1", "1/2"]},
        "maps": {"m_l1_l2": [1, 2], "m_l2": [1, 2]},
    },
    "two_hole": {
        "circles": [
            _circle(1, "0", "0", "4", "inside"),
            _circle(2, "-1", "3/2", "1", "outside"),
            _circle(3, "1/2", "-3/2", "1", "outside"),
        ],
        "region": {"seed": ["3", "0"]},
        "maps": {"m_l1_l2": [1, 1, 1], "m_l2": [1]},
    },
    # 两个交点横坐标同为 7/4
    "shared_x": {
        "circles": [_circle(1, "0", "0", "2", "inside"), _circle(2, "2", "0", "1", "outside")],
        "region": {"seed": ["-1", "0"]},
        "maps": {"m_l1_l2": [1, 2], "m_l2": [1, 1]},
    },
    # 在 (1, 0) 相切的两个圆，用一般多项式区域绕开排列校验
    "tangent": {
        "region": {
            "polynomials": ["1 - x1^2 - x2^2", "x1^2 - 4*x1 + 3 + x2^2"],
            "seed": ["0", "0"],
        },
        "maps": {"m_l1_l2": [1, 2], "m_l2": [1, 1]},
    },
    # 组维数为 0：纤维不连通
    "annulus_zero_dim": {
        "circles": [_circle(1, "0", "0", "2", "inside"), _circle(2, "0", "0", "1", "outside")],
        "region": {"seed": ["3/2", "0"]},
        "maps": {"m_l1_l2": [1, 1], "m_l2": [0]},
    },
}

# 通过全部校验的平面样例
VALID_PLANAR = ("disk", "annulus", "lens", "two_hole")


def fixture_names() -> List[str]:
    return list(FIXTURE_DOCUMENTS)


def fixture_document(name: str) -> Dict:
    """
    Raises:
        KeyError: 未知样例名
    """
    if name not in FIXTURE_DOCUMENTS:
        raise KeyError(f"unknown fixture '{name}', expected one of {fixture_names()}")
    return copy.deepcopy(FIXTURE_DOCUMENTS[name])


def fixture_text(name: str) -> str:
    return json.dumps(fixture_document(name), ensure_ascii=False, indent=2)


def load_fixture(name: str, validate: bool = True) -> MomentData:
    from .reader import parse_input

    return parse_input(fixture_text(name), validate=validate)


def random_arrangement(rng: np.random.Generator, max_holes: int = 5, attempts: int = 20) -> Optional[MomentData]:
    """
    随机有效圆族：外圆 (0,0,8) 内向，加 0..max_holes 个外向圆（坐标分母 8）。

    每个圆单独成组，分组条件自动满足；不满足排列条件的候选被丢弃，
    attempts 次都失败时返回 None。
    """
    seed = (Fraction(15, 2), Fraction(0))
    for _ in range(attempts):
        count = int(rng.integers(0, max_holes + 1))
        circles = [Circle(1, (Fraction(0), Fraction(0)), Fraction(8), "inside")]
        for k in range(count):
            cx = Fraction(int(rng.integers(-40, 41)), 8)
            cy = Fraction(int(rng.integers(-40, 41)), 8)
            r = Fraction(int(rng.integers(4, 17)), 8)
            circles.append(Circle(k + 2, (cx, cy), r, "outside"))
        try:
            region = region_from_seed(circles, seed)
        except MomentForgeError as e:
            logger.debug(f"Random arrangement rejected: {e}")
            continue
        if region.degenerate or not validate_arrangement(region).passed:
            continue
        n = len(circles)
        return MomentData(region, tuple(range(1, n + 1)), (1,) * n)
    return None
