"""
命令行接口模块（主入口）

职责：
- 解析命令行参数
- 协调各模块完成任务
- 数据流：reader → arrangement / moment_map → reeb_sweep / constructions / numeric_verify → writer / render

退出码：0 通过；2 校验或核验未通过；3 输入无效（解析错误、前提不满足、文件不存在）。
"""

import argparse
import logging
import os
import sys
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Tuple

from .arrangement import Region, validate_arrangement
from .constructions import (
    attach_chord_circles,
    attach_chord_factor_circle,
    attach_factor_circle,
    attach_pendant_circles,
    construct_gp,
)
from .errors import DisconnectedFiberError, MomentForgeError, ParseError, ValidationError, ValidationReport
from .fixtures import FIXTURE_DOCUMENTS, VALID_PLANAR, fixture_text
from .graph_ops import MultiGraph, collapses_onto, is_isomorphic
from .moment_map import (
    MomentData,
    emit_manifest,
    fiber_dim_bound,
    singular_fibers,
    strata_table,
    validate_moment_data,
)
from .numeric_verify import Tolerances, verify
from .reader import (
    construct_directive,
    document_from_data,
    ensure_file_exists,
    load_tolerance_config,
    parse_alloc,
    parse_input,
    read_text,
)
from .reeb_sweep import ReebGraph, poincare_reeb_graph_full, reeb_graph
from .render import export_figure, render_svg
from .writer import print_auto, write_auto, write_json, write_text

logger = logging.getLogger("momentforge")

DEFAULT_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_INVALID = 3


class _Parser(argparse.ArgumentParser):
    """参数错误按无效输入处理（退出码 3），不用 argparse 默认的 2"""

    def error(self, message):
        raise ParseError(message, field="argv")


def setup_parser() -> argparse.ArgumentParser:
    """设置命令行参数解析器"""
    parser = _Parser(
        prog="momentforge",
        description="momentforge - exact moment-like maps from circle arrangements and their Reeb graphs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", help="Subcommands")

    def add_common_args(p, input_required: bool = True):
        """添加通用参数"""
        p.add_argument(
            "--input",
            required=input_required,
            help="Input document path, or a built-in fixture name (disk, annulus, lens, two_hole, ...)",
        )
        p.add_argument("--output", default="", help="Output file path (.json/.jsonl/.csv/.xlsx/.txt), stdout if omitted")
        p.add_argument("--format", default="json", choices=["json", "text"], help="Stdout format (default: json)")
        p.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    def add_tolerance_args(p):
        p.add_argument("--config", default=None, help="Tolerance config path (default: search tolerance_config.json)")
        p.add_argument("--profile", default="default", help="Profile key in the tolerance config (default: 'default')")
        p.add_argument("--tol-residual", type=float, default=None, help="Relative residual tolerance")
        p.add_argument("--tol-rank", type=float, default=None, help="Minimum rank gap")
        p.add_argument("--tol-angle", type=float, default=None, help="Maximum principal angle (radians)")
        p.add_argument("--samples", type=int, default=None, help="Number of fiber samples")
        p.add_argument("--seed", type=int, default=None, help="Random seed")
        p.add_argument("--grid", type=int, default=None, help="Image / hole-count grid size")

    validate_parser = subparsers.add_parser("validate", help="Check arrangement genericity and the group/dimension maps")
    add_common_args(validate_parser)

    emit_parser = subparsers.add_parser("emit", help="Emit the defining polynomial system and manifest")
    add_common_args(emit_parser)

    fibers_parser = subparsers.add_parser("fibers", help="Fiber class per stratum (CSV/XLSX with --output)")
    add_common_args(fibers_parser)

    reeb_parser = subparsers.add_parser("reeb", help="Reeb graph of the first coordinate of f")
    add_common_args(reeb_parser)
    reeb_parser.add_argument("--poincare", action="store_true",
                             help="Poincare-Reeb graph of the region only (no fiber classes)")
    reeb_parser.add_argument("--dot", default="", help="Also write the graph in DOT format")
    reeb_parser.add_argument("--svg", default="", help="Also render the region and graph (.svg/.pdf/.png)")

    construct_parser = subparsers.add_parser("construct", help="Build decorated data with a predicted Reeb graph")
    construct_sub = construct_parser.add_subparsers(dest="construction", help="Constructions")

    def add_construct_args(p, input_required: bool = True):
        add_common_args(p, input_required)
        p.add_argument("--svg", default="", help="Also render the constructed data")
        p.add_argument("--max-halvings", type=int, default=None, help="Placement retries (radius halvings)")

    for name, text in (("mt2", "pendant circles in the same new group"),
                       ("mt4", "chord circles in the same new group")):
        p = construct_sub.add_parser(name, help=text)
        add_construct_args(p)
        p.add_argument("--alloc", required=True, help="Edge allocation, e.g. '0:1,2:2'")
        p.add_argument("--total-dim", type=int, required=True, help="Dimension m of the new manifold")

    for name, text in (("mt3", "one pendant circle forming its own group"),
                       ("mt5", "one chord circle forming its own group")):
        p = construct_sub.add_parser(name, help=text)
        add_construct_args(p)
        p.add_argument("--edge", type=int, required=True, help="Edge index in the base Reeb graph")
        p.add_argument("--new-dim", type=int, required=True, help="Sphere dimension of the new group")

    mt6_parser = construct_sub.add_parser("mt6", help="G_P,j1,j2 family on the unit disk")
    add_construct_args(mt6_parser, input_required=False)
    mt6_parser.add_argument("--nprime", type=int, required=True, help="Number of pendant circles")
    mt6_parser.add_argument("--j1", type=int, required=True, help="Circles with negative center x")
    mt6_parser.add_argument("--j2", type=int, required=True, help="Circles with positive center x")
    mt6_parser.add_argument("--total-dim", type=int, default=4, help="Dimension m (default: 4)")

    doc_parser = construct_sub.add_parser("doc", help="Run the 'construct' section of the input document")
    add_construct_args(doc_parser)

    verify_parser = subparsers.add_parser("verify", help="Numerical verification suite")
    add_common_args(verify_parser)
    add_tolerance_args(verify_parser)

    render_parser = subparsers.add_parser("render", help="Render region and Reeb graph (.svg/.pdf/.png)")
    add_common_args(render_parser)
    render_parser.add_argument("--no-overlay", action="store_true", help="Do not overlay the embedded graph")

    demo_parser = subparsers.add_parser("demo", help="Regenerate all fixture outputs into a directory")
    demo_parser.add_argument("--output", default="", help="Output directory (default: $MOMENTFORGE_FIXTURES "
                                                          "or output/{timestamp}_demo)")
    demo_parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    add_tolerance_args(demo_parser)

    return parser


# ============================================================
# 公共步骤
# ============================================================

def _input_text(name: str) -> str:
    """文件路径优先；不存在时按样例名（去掉扩展名后）查找"""
    if os.path.isfile(name):
        return read_text(name)
    stem = os.path.splitext(os.path.basename(name))[0]
    if stem in FIXTURE_DOCUMENTS:
        logger.debug(f"Using built-in fixture '{stem}'")
        return fixture_text(stem)
    ensure_file_exists(name)
    return read_text(name)


def _load(args, validate: bool = True) -> MomentData:
    return parse_input(_input_text(args.input), validate=validate)


def _emit(args, data: Any, text: Optional[str] = None) -> None:
    """--output 给出时按扩展名写文件，否则按 --format 打印"""
    if args.output:
        ext = os.path.splitext(args.output)[1].lower()
        if ext in (".txt", ".dot") and text is not None:
            write_text(text, args.output)
        else:
            write_auto(data, args.output)
        print(f"Wrote: {args.output}")
    elif args.format == "text" and text is not None:
        print_auto(text, mode="text")
    else:
        print_auto(data, mode="json")


def _tolerances(args) -> Tolerances:
    base = load_tolerance_config(args.config, args.profile)
    return base.override(
        tol_residual=args.tol_residual,
        tol_rank=args.tol_rank,
        tol_angle=args.tol_angle,
        samples=args.samples,
        seed=args.seed,
        grid=args.grid,
    )


def full_report(d: MomentData) -> ValidationReport:
    report = validate_moment_data(d)
    if isinstance(d.region, Region):
        report.extend(validate_arrangement(d.region))
    return report


def _graph_for(d: MomentData) -> ReebGraph:
    """能算 f0 的 Reeb 图就用它，否则退回区域的 Poincaré-Reeb 图"""
    try:
        return reeb_graph(d)
    except DisconnectedFiberError:
        return poincare_reeb_graph_full(d.region)


def _graph_text(g: ReebGraph) -> str:
    lines = [g.to_multigraph().to_text().rstrip("\n")]
    for e in g.edges:
        fiber = str(e.fiber) if e.fiber is not None else "-"
        lines.append(f"# edge {e.id}: {e.u} -- {e.v}  fiber {fiber}")
    return "\n".join(lines) + "\n"


# ============================================================
# 子命令
# ============================================================

def run_validate(args) -> int:
    """执行 validate 子命令"""
    d = _load(args, validate=False)
    report = full_report(d)
    _emit(args, report.to_dict() if not args.output.endswith((".csv", ".xlsx", ".jsonl"))
          else [i.to_dict() for i in report.issues], str(report) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def run_emit(args) -> int:
    """执行 emit 子命令"""
    d = _load(args)
    manifest = emit_manifest(d)
    _emit(args, manifest, "\n".join(manifest["polynomials"]) + "\n")
    return EXIT_OK


def run_fibers(args) -> int:
    """执行 fibers 子命令（CSV/XLSX 经 pandas 输出）"""
    d = _load(args)
    bound = fiber_dim_bound(d)
    rows = strata_table(d)
    text = "\n".join(f"{r['stratum']:<12} {r['circles']:<8} {r['x']:<24} {r['fiber']}" for r in rows) + "\n"
    if args.output.endswith((".csv", ".xlsx", ".jsonl")):
        _emit(args, rows)
    else:
        _emit(args, {"bound": bound, "strata": rows, "singular_fibers": singular_fibers(d)}, text)
    return EXIT_OK


def run_reeb(args) -> int:
    """执行 reeb 子命令"""
    d = _load(args)
    g = poincare_reeb_graph_full(d.region) if args.poincare else reeb_graph(d)
    doc = g.to_dict()
    doc["betti1"] = g.betti1
    _emit(args, doc, _graph_text(g))
    if args.dot:
        write_text(g.to_dot(), args.dot)
    if args.svg:
        export_figure(render_svg(d, g), args.svg)
    return EXIT_OK


def _run_construction(args) -> Tuple[MomentData, MultiGraph, Optional[MomentData]]:
    halvings = args.max_halvings
    if halvings is None:
        halvings = load_tolerance_config().max_halvings
    kind = args.construction
    if kind == "mt6":
        data, predicted = construct_gp(args.nprime, args.j1, args.j2, args.total_dim, halvings)
        return data, predicted, None

    if kind == "doc":
        directive = construct_directive(_input_text(args.input))
        if directive is None:
            raise ParseError("input document has no construct section", field="construct")
        kind = directive.get("kind", "")
        if kind == "mt6":
            data, predicted = construct_gp(int(directive["nprime"]), int(directive["j1"]), int(directive["j2"]),
                                           int(directive.get("total_dim", 4)), halvings)
            return data, predicted, None
        args = argparse.Namespace(**vars(args))
        args.alloc = ",".join(f"{k}:{v}" for k, v in directive.get("alloc", {}).items())
        args.total_dim = directive.get("total_dim")
        args.edge = directive.get("edge")
        args.new_dim = directive.get("new_dim")

    base = _load(args)
    if kind in ("mt2", "mt4"):
        if args.total_dim is None:
            raise ParseError("total_dim is required", field="construct.total_dim")
        fn = attach_pendant_circles if kind == "mt2" else attach_chord_circles
        data, predicted = fn(base, parse_alloc(args.alloc), int(args.total_dim), halvings)
    elif kind in ("mt3", "mt5"):
        if args.edge is None or args.new_dim is None:
            raise ParseError("edge and new_dim are required", field="construct")
        fn = attach_factor_circle if kind == "mt3" else attach_chord_factor_circle
        data, predicted = fn(base, int(args.edge), int(args.new_dim), halvings)
    else:
        raise ParseError(f"unknown construction {kind!r}", field="construct.kind")
    return data, predicted, base


def run_construct(args) -> int:
    """执行 construct 子命令：输出新文档、预测图与实算图是否同构"""
    if not args.construction:
        raise ParseError("construct needs one of mt2, mt3, mt4, mt5, mt6, doc", field="construction")
    data, predicted, base = _run_construction(args)
    computed = reeb_graph(data)
    computed_graph = computed.to_multigraph()
    result: Dict[str, Any] = {
        "document": document_from_data(data),
        "predicted": {"vertices": predicted.n_vertices, "edges": predicted.n_edges, "text": predicted.to_text()},
        "computed": {"vertices": computed_graph.n_vertices, "edges": computed_graph.n_edges,
                     "betti1": computed.betti1, "text": computed_graph.to_text()},
        "isomorphic": is_isomorphic(computed_graph, predicted),
    }
    if base is not None:
        result["collapses_onto_base"] = collapses_onto(computed_graph, poincare_reeb_graph_full(base.region)
                                                       .to_multigraph())
    text = (f"predicted: {predicted.n_vertices} vertices, {predicted.n_edges} edges\n"
            f"computed:  {computed_graph.n_vertices} vertices, {computed_graph.n_edges} edges\n"
            f"isomorphic: {result['isomorphic']}\n")
    _emit(args, result, text)
    if args.svg:
        export_figure(render_svg(data, computed), args.svg)
    return EXIT_OK if result["isomorphic"] else EXIT_FAIL


def run_verify(args) -> int:
    """执行 verify 子命令"""
    d = _load(args)
    tol = _tolerances(args)
    result = verify(d, tol)
    lines = [f"{name:<14} {'PASS' if r['passed'] else 'FAIL'}  samples={r['samples']}  "
             f"failures={r['failure_count']}" for name, r in result["checks"].items()]
    lines.append(f"overall        {'PASS' if result['passed'] else 'FAIL'}")
    _emit(args, result, "\n".join(lines) + "\n")
    return EXIT_OK if result["passed"] else EXIT_FAIL


def run_render(args) -> int:
    """执行 render 子命令"""
    d = _load(args)
    svg = render_svg(d, _graph_for(d), overlay=not args.no_overlay)
    if args.output:
        export_figure(svg, args.output)
        print(f"Wrote: {args.output}")
    else:
        print_auto(svg, mode="text")
    return EXIT_OK


# ============================================================
# demo：按审计驱动的方式生成全部样例输出
# ============================================================

def _setup_demo_logging(output_dir: str, log_level: int) -> None:
    # 移除默认的 handler
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)
    log_format = logging.Formatter(DEFAULT_LOG_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(log_format)
    try:
        console_handler.stream.reconfigure(encoding="utf-8")
    except AttributeError:
        pass
    logging.root.addHandler(console_handler)

    file_handler = logging.FileHandler(os.path.join(output_dir, "demo.log"), encoding="utf-8")
    file_handler.setLevel(log_level)
    file_handler.setFormatter(log_format)
    logging.root.addHandler(file_handler)
    logging.root.setLevel(log_level)


def _demo_step(results: List[Dict], name: str, expect: str, run: Callable[[], Any]) -> None:
    """expect 为 "ok" 或期望的异常类型（error_type）"""
    try:
        run()
        outcome = "ok"
    except MomentForgeError as e:
        outcome = e.error_type
        logger.info(f"{name}: {type(e).__name__}: {e}")
    results.append({"step": name, "expected": expect, "outcome": outcome, "passed": outcome == expect})


def run_demo(args) -> int:
    """执行 demo 子命令"""
    output_dir = args.output or os.environ.get("MOMENTFORGE_FIXTURES", "")
    if not output_dir:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        output_dir = os.path.join("output", f"{timestamp}_demo")
    os.makedirs(output_dir, exist_ok=True)
    _setup_demo_logging(output_dir, logging.DEBUG if args.verbose else logging.INFO)
    logger.info(f"Output directory: {output_dir}")
    tol = _tolerances(args)

    def out(name: str) -> str:
        return os.path.join(output_dir, name)

    results: List[Dict] = []
    for name in FIXTURE_DOCUMENTS:
        write_text(fixture_text(name) + "\n", out(f"{name}.input.json"))

    def validate_only(name: str):
        report = full_report(parse_input(fixture_text(name), validate=False))
        write_json(report.to_dict(), out(f"{name}.validation.json"))
        if not report.passed:
            raise ValidationError(report)

    _demo_step(results, "validate shared_x", "validation", lambda: validate_only("shared_x"))
    _demo_step(results, "reeb annulus_zero_dim", "disconnected_fiber",
               lambda: reeb_graph(parse_input(fixture_text("annulus_zero_dim"))))

    for name in VALID_PLANAR:
        def planar(name=name):
            d = parse_input(fixture_text(name))
            write_json(emit_manifest(d), out(f"{name}.emit.json"))
            write_auto(strata_table(d), out(f"{name}.fibers.csv"))
            g = reeb_graph(d)
            write_json({**g.to_dict(), "betti1": g.betti1}, out(f"{name}.reeb.json"))
            write_text(g.to_dot(name), out(f"{name}.reeb.dot"))
            write_text(render_svg(d, g), out(f"{name}.svg"))
        _demo_step(results, f"fixture {name}", "ok", planar)

    def construction(label: str, build: Callable[[], Tuple[MomentData, MultiGraph]]):
        data, predicted = build()
        g = reeb_graph(data)
        write_json(document_from_data(data), out(f"{label}.input.json"))
        write_text(render_svg(data, g), out(f"{label}.svg"))
        if not is_isomorphic(g.to_multigraph(), predicted):
            raise MomentForgeError(f"{label}: computed Reeb graph is not isomorphic to the prediction")

    annulus = lambda: parse_input(fixture_text("annulus"))
    disk = lambda: parse_input(fixture_text("disk"))
    halvings = tol.max_halvings
    _demo_step(results, "construct mt2 annulus", "ok", lambda: construction(
        "mt2_annulus", lambda: attach_pendant_circles(annulus(), {0: 1}, 4, halvings)))
    _demo_step(results, "construct mt3 annulus", "ok", lambda: construction(
        "mt3_annulus", lambda: attach_factor_circle(annulus(), 0, 2, halvings)))
    _demo_step(results, "construct mt4 annulus", "ok", lambda: construction(
        "mt4_annulus", lambda: attach_chord_circles(annulus(), {0: 1}, 4, halvings)))
    _demo_step(results, "construct mt5 disk", "ok", lambda: construction(
        "mt5_disk", lambda: attach_chord_factor_circle(disk(), 0, 1, halvings)))
    _demo_step(results, "construct mt6 (2,1,1)", "ok", lambda: construction(
        "mt6_2_1_1", lambda: construct_gp(2, 1, 1, 4, halvings)))

    def verify_disk():
        result = verify(disk(), tol)
        write_json(result, out("disk.verify.json"))
        if not result["passed"]:
            raise MomentForgeError("verification of the disk failed")
    _demo_step(results, "verify disk", "ok", verify_disk)

    write_auto(results, out("summary.csv"))
    failed = [r for r in results if not r["passed"]]
    print(f"\n{'=' * 70}")
    print("Demo Summary:")
    print(f"  Steps: {len(results)}")
    print(f"  As expected: {len(results) - len(failed)}")
    print(f"  Unexpected: {len(failed)}")
    print(f"{'=' * 70}")
    for r in failed:
        print(f"  {r['step']}: expected {r['expected']}, got {r['outcome']}")
    print(f"\nOutputs saved to: {output_dir}")
    return EXIT_OK if not failed else EXIT_FAIL


COMMANDS = {
    "validate": run_validate,
    "emit": run_emit,
    "fibers": run_fibers,
    "reeb": run_reeb,
    "construct": run_construct,
    "verify": run_verify,
    "render": run_render,
    "demo": run_demo,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI 主入口。

    Returns:
        退出码：0 通过，2 未通过，3 输入无效
    """
    parser = setup_parser()
    try:
        args = parser.parse_args(argv)
    except ParseError as e:
        parser.print_usage(sys.stderr)
        print(f"momentforge: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as e:
        return int(e.code or 0)

    verbose = getattr(args, "verbose", False)
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format=DEFAULT_LOG_FORMAT,
                        stream=sys.stderr)
    if logging.root.level > logging.DEBUG and verbose:
        logging.root.setLevel(logging.DEBUG)

    run = COMMANDS.get(args.command)
    if run is None:
        parser.print_help()
        return EXIT_INVALID
    try:
        return run(args)
    except ValidationError as e:
        logger.error(f"Validation failed:\n{e.report}")
        return EXIT_FAIL
    except (MomentForgeError, FileNotFoundError, KeyError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INVALID
    except Exception as e:
        logger.error(f"Command '{args.command}' failed: {e}", exc_info=verbose)
        return EXIT_INVALID


def cli(argv: Optional[List[str]] = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
