"""
圆排列上的类矩映射（moment-like map）构造与 Reeb 图计算工具

模块架构（按数据流）：
    exact_arith.py    → 有理数与二次域 Q(√d) 的精确运算、比较
    polynomials.py    → 稀疏多元有理系数多项式（求值、梯度、解析、规范文本）
    arrangement.py    → 圆族、交点、极点、切片分解、区域 D 与排列校验
    moment_map.py     → 数据 (D, f_j, 分组, 维数)、方程组生成、纤维分类
    reeb_sweep.py     → f0 的 Reeb 图与区域的 Poincaré-Reeb 图
    graph_ops.py      → 多重图：同构、塌缩、同胚、G_P,j1,j2、装饰预测
    constructions.py  → 挂件圆 / 弦圆 / 新组圆的构造（附预测的 Reeb 图）
    numeric_verify.py → 浮点核验（秩、像、切空间、Reeb 图对照、奇异值定位）
    reader.py         → 输入文档解析、容差配置
    writer.py         → 输出模块（JSON/JSONL/CSV/XLSX/文本）
    render.py         → SVG 图形与 PDF/PNG 导出
    cli.py            → 命令行接口（主入口）

公共 API：
    parse_input             - 输入文档 → MomentData
    region_from_seed        - 圆族 + 种子点 → 区域 D
    emit_system             - 定义流形的多项式方程组
    strata_table            - 各层纤维类型
    reeb_graph              - f0 的 Reeb 图
    attach_pendant_circles  - 挂件圆构造（及其他构造）
    verify                  - 数值核验汇总
    render_svg              - 区域与 Reeb 图的 SVG
"""

__version__ = "1.0.0"

# === Errors 模块 ===
from .errors import (
    MomentForgeError,
    ParseError,
    ValidationError,
    ValidationIssue,
    ValidationReport,
)

# === Exact arithmetic 模块 ===
from .exact_arith import (
    Ordering,
    QuadExt,
    format_rat,
    parse_rat,
    quad_cmp,
    quad_sign,
    rational_between,
)

# === Polynomials 模块 ===
from .polynomials import (
    Poly,
    parse_poly,
    poly_eval,
    poly_evalf,
    poly_grad,
    poly_to_text,
)

# === Arrangement 模块 ===
from .arrangement import (
    Circle,
    CrossingPoint,
    Pole,
    Region,
    circle_intersections,
    locate_point,
    region_from_seed,
    validate_arrangement,
    vertical_poles,
)

# === Moment map 模块 ===
from .moment_map import (
    FiberClass,
    GeneralRegion,
    MomentData,
    emit_manifest,
    emit_system,
    fiber_class_at,
    fiber_dim_bound,
    singular_fibers,
    strata_table,
    validate_moment_data,
)

# === Reeb 模块 ===
from .reeb_sweep import (
    ReebGraph,
    poincare_reeb_graph,
    reeb_graph,
    segment_fiber_class,
    singular_x_values,
)

# === Graph 模块 ===
from .graph_ops import (
    MultiGraph,
    betti1,
    build_gp,
    collapses_onto,
    is_homeomorphic,
    is_isomorphic,
    predict_decorated,
)

# === Constructions 模块 ===
from .constructions import (
    Decoration,
    apply_decorations,
    attach_chord_circles,
    attach_chord_factor_circle,
    attach_factor_circle,
    attach_pendant_circles,
    construct_gp,
)

# === Numeric verification 模块 ===
from .numeric_verify import (
    Tolerances,
    image_check,
    rank_check,
    reeb_oracle,
    sample_fiber,
    tangent_check,
    verify,
)

# === Reader / Writer / Render 模块 ===
from .reader import (
    document_from_data,
    ensure_file_exists,
    load_input,
    load_tolerance_config,
    parse_input,
)
from .writer import (
    print_json,
    print_jsonl,
    write_auto,
    write_csv,
    write_json,
    write_jsonl,
    write_xlsx,
)
from .render import export_figure, render_svg

__all__ = [
    # 版本
    "__version__",

    # Errors
    "MomentForgeError",
    "ParseError",
    "ValidationError",
    "ValidationIssue",
    "ValidationReport",

    # Exact arithmetic
    "Ordering",
    "QuadExt",
    "format_rat",
    "parse_rat",
    "quad_cmp",
    "quad_sign",
    "rational_between",

    # Polynomials
    "Poly",
    "parse_poly",
    "poly_eval",
    "poly_evalf",
    "poly_grad",
    "poly_to_text",

    # Arrangement
    "Circle",
    "CrossingPoint",
    "Pole",
    "Region",
    "circle_intersections",
    "locate_point",
    "region_from_seed",
    "validate_arrangement",
    "vertical_poles",

    # Moment map
    "FiberClass",
    "GeneralRegion",
    "MomentData",
    "emit_manifest",
    "emit_system",
    "fiber_class_at",
    "fiber_dim_bound",
    "singular_fibers",
    "strata_table",
    "validate_moment_data",

    # Reeb
    "ReebGraph",
    "poincare_reeb_graph",
    "reeb_graph",
    "segment_fiber_class",
    "singular_x_values",

    # Graph
    "MultiGraph",
    "betti1",
    "build_gp",
    "collapses_onto",
    "is_homeomorphic",
    "is_isomorphic",
    "predict_decorated",

    # Constructions
    "Decoration",
    "apply_decorations",
    "attach_chord_circles",
    "attach_chord_factor_circle",
    "attach_factor_circle",
    "attach_pendant_circles",
    "construct_gp",

    # Numeric verification
    "Tolerances",
    "image_check",
    "rank_check",
    "reeb_oracle",
    "sample_fiber",
    "tangent_check",
    "verify",

    # Reader / Writer / Render
    "document_from_data",
    "ensure_file_exists",
    "load_input",
    "load_tolerance_config",
    "parse_input",
    "print_json",
    "print_jsonl",
    "write_auto",
    "write_csv",
    "write_json",
    "write_jsonl",
    "write_xlsx",
    "export_figure",
    "render_svg",
]
