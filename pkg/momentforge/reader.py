"""
输入读取模块

职责：
- 检查输入文件、读取 JSON 输入文档
- 把文档解析为 MomentData（平面圆族或一般多项式区域），错误带字段路径与行号
- 把 MomentData 序列化回规范文档（解析后再序列化得到同一文档）
- 加载容差配置档位 tolerance_config.json

输入文档：
    {
      "circles": [{"id": 1, "center": ["0", "0"], "radius": "1", "orientation": "inside"}],
      "region": {"seed": ["0", "0"]},
      "maps": {"m_l1_l2": [1], "m_l2": [1]},
      "construct": {"kind": "mt2", "alloc": {"0": 1}, "total_dim": 4}      # 可选
    }
一般区域用 "region": {"polynomials": ["..."], "seed": [...]} 代替 "circles"。
"""

import json
import logging
import os
import sys
from typing import Any, Dict, List, Mapping, Optional

from .arrangement import ORIENTATIONS, Circle, Region, region_from_seed, validate_arrangement
from .errors import ParseError, PreconditionError
from .exact_arith import format_rat, parse_rat
from .moment_map import GeneralRegion, MomentData, validate_moment_data
from .numeric_verify import Tolerances
from .polynomials import parse_poly, poly_to_text, x_names

logger = logging.getLogger("momentforge")

CONFIG_FILE = "tolerance_config.json"


def ensure_file_exists(path: str) -> None:
    """
    检查文件是否存在。

    Raises:
        FileNotFoundError: 文件不存在
    """
    if not os.path.isfile(path):
        logger.error(f"File not found: {path}")
        raise FileNotFoundError(path)


def read_text(path: str) -> str:
    ensure_file_exists(path)
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def parse_document(text: str) -> Dict[str, Any]:
    """JSON 文本 → dict；语法错误转为带行号的 ParseError"""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, field="document", line=e.lineno)
    if not isinstance(doc, dict):
        raise ParseError("input document must be a JSON object", field="document")
    return doc


def _require(doc: Mapping, key: str, path: str) -> Any:
    if key not in doc:
        raise ParseError(f"missing required field {path}", field=path)
    return doc[key]


def _rat_pair(value: Any, path: str):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ParseError(f"{path} must be a pair of rationals", field=path)
    return parse_rat(value[0], f"{path}[0]"), parse_rat(value[1], f"{path}[1]")


def _int_list(value: Any, path: str) -> List[int]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise ParseError(f"{path} must be a list of integers", field=path)
    return list(value)


def parse_circles(entries: Any) -> List[Circle]:
    """
    解析圆列表。

    Raises:
        ParseError: 字段缺失、格式错误、半径非正、方向未知或 id 重复
    """
    if not isinstance(entries, list) or not entries:
        raise ParseError("circles must be a non-empty list", field="circles")
    circles = []
    seen = set()
    for k, entry in enumerate(entries):
        path = f"circles[{k}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{path} must be an object", field=path)
        cid = _require(entry, "id", f"{path}.id")
        if not isinstance(cid, int) or isinstance(cid, bool):
            raise ParseError(f"{path}.id must be an integer", field=f"{path}.id")
        if cid in seen:
            raise ParseError(f"duplicate circle id {cid}", field=f"{path}.id")
        seen.add(cid)
        center = _rat_pair(_require(entry, "center", f"{path}.center"), f"{path}.center")
        radius = parse_rat(_require(entry, "radius", f"{path}.radius"), f"{path}.radius")
        if radius <= 0:
            raise ParseError(f"{path}.radius must be positive", field=f"{path}.radius")
        orientation = entry.get("orientation", "outside")
        if orientation not in ORIENTATIONS:
            raise ParseError(f"{path}.orientation must be one of {ORIENTATIONS}", field=f"{path}.orientation")
        circles.append(Circle(cid, center, radius, orientation))
    return circles


def _parse_region(doc: Mapping):
    region_doc = _require(doc, "region", "region")
    if not isinstance(region_doc, dict):
        raise ParseError("region must be an object", field="region")
    if "circles" in doc:
        circles = parse_circles(doc["circles"])
        seed = _rat_pair(_require(region_doc, "seed", "region.seed"), "region.seed")
        box = None
        if "box" in region_doc:
            box_doc = region_doc["box"]
            if not isinstance(box_doc, list) or len(box_doc) != 2:
                raise ParseError("region.box must be [[xlo, ylo], [xhi, yhi]]", field="region.box")
            box = (_rat_pair(box_doc[0], "region.box[0]"), _rat_pair(box_doc[1], "region.box[1]"))
        return region_from_seed(circles, seed, box)

    texts = _require(region_doc, "polynomials", "region.polynomials")
    if not isinstance(texts, list) or not texts:
        raise ParseError("region.polynomials must be a non-empty list", field="region.polynomials")
    seed_doc = _require(region_doc, "seed", "region.seed")
    if not isinstance(seed_doc, list):
        raise ParseError("region.seed must be a list", field="region.seed")
    seed = tuple(parse_rat(v, f"region.seed[{k}]") for k, v in enumerate(seed_doc))
    variables = x_names(len(seed))
    polys = tuple(parse_poly(t, variables, field=f"region.polynomials[{k}]") for k, t in enumerate(texts))
    box = None
    if "box" in region_doc:
        box = tuple(_rat_pair(pair, f"region.box[{k}]") for k, pair in enumerate(region_doc["box"]))
    return GeneralRegion(polys, seed, box)


def parse_input(text: str, validate: bool = True) -> MomentData:
    """
    解析输入文档。

    Args:
        text: JSON 文本
        validate: 是否校验排列条件与分组条件

    Returns:
        MomentData

    Raises:
        ParseError: 文档结构错误（field 指出出错的字段）
        ValidationError: validate=True 且校验未通过（携带 ValidationReport）；
            类型为已出现问题中优先级最高者对应的子类，如 TriplePointError、GenericityError
    """
    doc = parse_document(text)
    region = _parse_region(doc)
    maps = _require(doc, "maps", "maps")
    if not isinstance(maps, dict):
        raise ParseError("maps must be an object", field="maps")
    group_map = _int_list(_require(maps, "m_l1_l2", "maps.m_l1_l2"), "maps.m_l1_l2")
    dim_map = _int_list(_require(maps, "m_l2", "maps.m_l2"), "maps.m_l2")
    try:
        data = MomentData(region, tuple(group_map), tuple(dim_map))
    except PreconditionError as e:
        raise ParseError(str(e), field="maps")

    if validate:
        report = validate_moment_data(data)
        if isinstance(region, Region):
            report.extend(validate_arrangement(region))
        report.raise_for_issues()
    return data


def load_input(path: str, validate: bool = True) -> MomentData:
    logger.info(f"Reading input: {path}")
    return parse_input(read_text(path), validate)


def construct_directive(text: str) -> Optional[Dict[str, Any]]:
    """文档中的可选 "construct" 段"""
    doc = parse_document(text)
    directive = doc.get("construct")
    if directive is not None and not isinstance(directive, dict):
        raise ParseError("construct must be an object", field="construct")
    return directive


def document_from_data(d: MomentData) -> Dict[str, Any]:
    """MomentData → 规范输入文档"""
    region = d.region
    doc: Dict[str, Any] = {}
    if isinstance(region, Region):
        doc["circles"] = [c.to_dict() for c in region.circles]
        doc["region"] = {"seed": [format_rat(region.seed[0]), format_rat(region.seed[1])]}
    else:
        doc["region"] = {
            "polynomials": [poly_to_text(p) for p in region.polys],
            "seed": [format_rat(s) for s in region.seed],
            "box": [[format_rat(lo), format_rat(hi)] for lo, hi in region.box],
        }
    doc["maps"] = {"m_l1_l2": list(d.group_map), "m_l2": list(d.dim_map)}
    return doc


def parse_alloc(text: str) -> Dict[int, int]:
    """命令行分配 "0:1,2:3" → {0: 1, 2: 3}"""
    alloc: Dict[int, int] = {}
    if not text:
        return alloc
    for item in text.split(","):
        try:
            edge, count = item.split(":")
            alloc[int(edge)] = alloc.get(int(edge), 0) + int(count)
        except ValueError:
            raise ParseError(f"allocation entry {item!r} must look like edge:count", field="alloc")
    return alloc


def _config_search_paths() -> List[str]:
    paths = [os.path.join(os.getcwd(), CONFIG_FILE)]
    if getattr(sys, "frozen", False):
        paths.append(os.path.join(os.path.dirname(sys.executable), CONFIG_FILE))
    current_dir = os.path.dirname(os.path.abspath(__file__))
    paths.append(os.path.join(current_dir, "..", CONFIG_FILE))
    return paths


def load_tolerance_config(config_path: str = None, config_key: str = "default") -> Tolerances:
    """
    加载容差配置档位。

    Args:
        config_path: 配置文件路径，默认依次查找当前目录、exe 所在目录、包的上级目录
        config_key: 档位名，默认为 "default"

    Returns:
        Tolerances；文件或档位缺失时返回内置默认值
    """
    if config_path is None:
        search_paths = _config_search_paths()
        config_path = next((p for p in search_paths if os.path.exists(p)), None)
        if config_path is None:
            logger.warning(f"Tolerance config not found in any of: {search_paths}; using defaults")
            return Tolerances()

    if not os.path.exists(config_path):
        logger.warning(f"Tolerance config not found: {config_path}; using defaults")
        return Tolerances()

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Failed to read tolerance config {config_path}: {e}")
        return Tolerances()

    if config_key not in config:
        logger.warning(f"Profile '{config_key}' not in {config_path}; using defaults")
        return Tolerances()
    logger.debug(f"Loaded tolerance profile '{config_key}' from {config_path}")
    return Tolerances.from_mapping(config[config_key])
