"""
有限无环多重图模块

职责：
- MultiGraph 值类型（允许重边，禁止自环），与 networkx 互相转换
- 同构、规范形式字符串、第一 Betti 数
- 坍缩（逐次删去叶子及其边）判定、光滑化（去掉 2 度顶点）与同胚判定
- 定理预测图的构造：路径加挂件的 G_P 族、在指定边上细分/挂件的装饰图
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .errors import ArityError, NotConnectedError, ParseError, UnknownEdgeError

logger = logging.getLogger("momentforge")


@dataclass(frozen=True)
class MultiGraph:
    """
    顶点为整数 id，边为无序端点对（可重复）。

    xs 可选，与 vertices 对齐的顶点横坐标（浮点），用于按 x 顺序比较。
    """

    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    xs: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        known = set(self.vertices)
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex {u} is not allowed")
            if u not in known or v not in known:
                raise ValueError(f"edge ({u}, {v}) uses an unknown vertex")
        if self.xs is not None and len(self.xs) != len(self.vertices):
            raise ValueError("xs must align with vertices")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> Dict[int, int]:
        deg = {v: 0 for v in self.vertices}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.MultiGraph) -> "MultiGraph":
        mapping = {node: k for k, node in enumerate(sorted(g.nodes))}
        return cls(tuple(range(len(mapping))), tuple((mapping[u], mapping[v]) for u, v in g.edges()))

    def relabeled(self) -> "MultiGraph":
        """顶点重新编号为 0..n-1，保持原顺序"""
        mapping = {v: k for k, v in enumerate(self.vertices)}
        return MultiGraph(tuple(range(len(mapping))),
                          tuple((mapping[u], mapping[v]) for u, v in self.edges), self.xs)

    def to_text(self) -> str:
        """纯文本格式："V n" 后每行一条边 "u v"（顶点按 0..n-1 重新编号）"""
        g = self.relabeled()
        lines = [f"V {g.n_vertices}"]
        lines.extend(f"{min(u, v)} {max(u, v)}" for u, v in sorted((min(e), max(e)) for e in g.edges))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MultiGraph":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("V "):
            raise ParseError("graph text must start with 'V n'", field="graph", line=1)
        try:
            n = int(lines[0][2:])
            edges = []
            for k, ln in enumerate(lines[1:], start=2):
                u, v = ln.split()
                edges.append((int(u), int(v)))
        except ValueError as e:
            raise ParseError(f"malformed graph text: {e}", field="graph")
        return cls(tuple(range(n)), tuple(edges))

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            lines.append(f"  {v};")
        for u, v in self.edges:
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def path_graph(k: int) -> MultiGraph:
    return MultiGraph(tuple(range(k)), tuple((i, i + 1) for i in range(k - 1)))


def cycle_graph(k: int) -> MultiGraph:
    return MultiGraph(tuple(range(k)), tuple((i, (i + 1) % k) for i in range(k)))


def theta_graph(parallel: int = 3) -> MultiGraph:
    return MultiGraph((0, 1), tuple((0, 1) for _ in range(parallel)))


def _simple_with_multiplicity(g: MultiGraph) -> nx.Graph:
    simple = nx.Graph()
    deg = g.degrees()
    for v in g.vertices:
        simple.add_node(v, deg=str(deg[v]))
    for (u, v), count in Counter((min(e), max(e)) for e in g.edges).items():
        simple.add_edge(u, v, mult=str(count))
    return simple


def canonical_form(g: MultiGraph) -> str:
    """
    同构不变的规范字符串：顶点数、边数、度序列与 Weisfeiler-Lehman 哈希。
    """
    degs = ",".join(str(d) for d in sorted(g.degrees().values()))
    wl = nx.weisfeiler_lehman_graph_hash(_simple_with_multiplicity(g), node_attr="deg", edge_attr="mult",
                                         iterations=4)
    return f"V{g.n_vertices}E{g.n_edges}[{degs}]{wl}"


def is_isomorphic(g: MultiGraph, h: MultiGraph) -> bool:
    """顶点数、边数、度序列不同时直接否定，否则交给 networkx 的 VF2 回溯"""
    if g.n_vertices != h.n_vertices or g.n_edges != h.n_edges:
        return False
    if sorted(g.degrees().values()) != sorted(h.degrees().values()):
        return False
    return nx.is_isomorphic(g.to_networkx(), h.to_networkx())


def betti1(g: MultiGraph) -> int:
    """
    |E| - |V| + 1。

    Raises:
        NotConnectedError: 图为空或不连通
    """
    if g.n_vertices == 0 or not nx.is_connected(g.to_networkx()):
        raise NotConnectedError(f"graph with {g.n_vertices} vertices is not connected")
    return g.n_edges - g.n_vertices + 1


def remove_vertex(g: MultiGraph, v: int) -> MultiGraph:
    return MultiGraph(tuple(u for u in g.vertices if u != v),
                      tuple(e for e in g.edges if v not in e))


def collapses_onto(g: MultiGraph, h: MultiGraph) -> bool:
    """
    G 能否经逐次删去 1 度顶点（连同其边）得到与 H 同胚的图。

    挂件落在环边上时会留下两个 2 度细分点，删叶子去不掉，因此终点按同胚（光滑化 2 度顶点）比较。
    每一步 |E| - |V| 不变，顶点数减 1；按规范形式记忆已访问的图。
    """
    if g.n_edges - g.n_vertices != h.n_edges - h.n_vertices:
        return False
    core = smooth_degree_two(h)
    visited: Dict[str, List[MultiGraph]] = defaultdict(list)

    def seen(x: MultiGraph) -> bool:
        key = canonical_form(x)
        for other in visited[key]:
            if is_isomorphic(x, other):
                return True
        visited[key].append(x)
        return False

    def search(x: MultiGraph) -> bool:
        if x.n_vertices < core.n_vertices:
            return False
        if seen(x):
            return False
        if is_isomorphic(smooth_degree_two(x), core):
            return True
        deg = x.degrees()
        for v in x.vertices:
            if deg[v] == 1 and search(remove_vertex(x, v)):
                return True
        return False

    return search(g)


def smooth_degree_two(g: MultiGraph) -> MultiGraph:
    """去掉所有两侧邻点不同的 2 度顶点（不产生自环）"""
    work = g.to_networkx()
    changed = True
    while changed:
        changed = False
        for v in sorted(work.nodes):
            if work.degree(v) != 2:
                continue
            ends = [w for _, w in work.edges(v)]
            if len(ends) != 2 or ends[0] == ends[1] or v in ends:
                continue
            work.remove_node(v)
            work.add_edge(ends[0], ends[1])
            changed = True
            break
    return MultiGraph.from_networkx(work)


def is_homeomorphic(g: MultiGraph, h: MultiGraph) -> bool:
    return is_isomorphic(smooth_degree_two(g), smooth_degree_two(h))


def same_up_to_x_order(g: MultiGraph, h: MultiGraph, tol: float = 1e-6) -> bool:
    """
    按顶点横坐标排序后逐个对应，比较边的多重集合以及横坐标是否在容差内一致。
    """
    if g.xs is None or h.xs is None:
        raise ValueError("both graphs need vertex abscissae")
    if g.n_vertices != h.n_vertices or g.n_edges != h.n_edges:
        return False

    def ranked(x: MultiGraph):
        order = sorted(range(x.n_vertices), key=lambda k: x.xs[k])
        rank = {x.vertices[k]: r for r, k in enumerate(order)}
        xs = [x.xs[k] for k in order]
        edges = Counter(tuple(sorted((rank[u], rank[v]))) for u, v in x.edges)
        return xs, edges

    xs_g, edges_g = ranked(g)
    xs_h, edges_h = ranked(h)
    if any(abs(a - b) > tol * max(1.0, abs(a)) for a, b in zip(xs_g, xs_h)):
        return False
    return edges_g == edges_h


def build_gp(nprime: int, j1: int, j2: int) -> MultiGraph:
    """
    G_P,j1,j2：标号 1..2n'+2 的路径，在标号 2j1'+1（j1' = 1..j1）
    与 2j1+2j2'（j2' = 1..j2）处各挂一个叶子。

    Raises:
        ArityError: j1 + j2 != n' 或参数为负
    """
    if min(nprime, j1, j2) < 0 or j1 + j2 != nprime:
        raise ArityError(f"build_gp needs j1 + j2 = n' with non-negative entries, got ({nprime}, {j1}, {j2})")
    path = list(range(1, 2 * nprime + 3))
    edges = [(k, k + 1) for k in path[:-1]]
    attach = [2 * a + 1 for a in range(1, j1 + 1)] + [2 * j1 + 2 * b for b in range(1, j2 + 1)]
    vertices = list(path)
    for label in attach:
        leaf = len(vertices) + 1
        vertices.append(leaf)
        edges.append((label, leaf))
    return MultiGraph(tuple(vertices), tuple(edges))


DECORATION_KINDS = ("pendant", "factor_pendant", "chord")


def predict_decorated(base: MultiGraph, decorations: Iterable[Mapping]) -> MultiGraph:
    """
    在基图的边上做装饰。

    decorations 中每项为 {"edge": 边序号, "kind": pendant|factor_pendant|chord,
    "attach": "first"|"second"}；同一条边上的多项按给出顺序从该边的第一个端点排向第二个端点。
    pendant 类：边细分两次并在其中一个细分点挂叶子（+3 顶点，+3 边）；chord：细分两次（+2，+2）。

    Raises:
        UnknownEdgeError: 边序号不存在
    """
    per_edge: Dict[int, List[Mapping]] = defaultdict(list)
    for deco in decorations:
        e = int(deco["edge"])
        if not 0 <= e < base.n_edges:
            raise UnknownEdgeError(f"edge {e} does not exist (graph has {base.n_edges} edges)")
        kind = deco.get("kind", "pendant")
        if kind not in DECORATION_KINDS:
            raise ValueError(f"unknown decoration kind {kind!r}")
        per_edge[e].append(deco)

    vertices = list(base.vertices)
    next_id = max(vertices, default=-1) + 1
    edges: List[Tuple[int, int]] = []
    for idx, (u, v) in enumerate(base.edges):
        if idx not in per_edge:
            edges.append((u, v))
            continue
        chain = [u]
        for deco in per_edge[idx]:
            a, b = next_id, next_id + 1
            next_id += 2
            vertices.extend([a, b])
            chain.extend([a, b])
            if deco.get("kind", "pendant") != "chord":
                leaf = next_id
                next_id += 1
                vertices.append(leaf)
                edges.append((a if deco.get("attach", "first") == "first" else b, leaf))
        chain.append(v)
        edges.extend(zip(chain, chain[1:]))
    return MultiGraph(tuple(vertices), tuple(edges))
