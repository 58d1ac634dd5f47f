"""The item-sharing graph: a directed forest over agents.

Each agent with a successor contributes one edge, pointing at the
successor and labeled with the shared item.  Out-degree is at most one,
so the graph is a forest; treating each successor as a parent yields
rooted trees whose roots are the agents with no outgoing edge.

An item shared by three or more agents (a *shattered* item) shows up as
two or more edges with the same label; those edges always form a
directed path, the item's *atom-path*, and any valid splitting must keep
them together.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .fbta import AllocationTrace
from .model import ModelError


class GraphError(ModelError):
    """Inconsistent trace or malformed forest (signals an upstream bug)."""


@dataclass(frozen=True)
class Edge:
    """Directed edge ``tail -> head`` labeled with the shared item."""

    tail: int
    head: int
    item: int


@dataclass(frozen=True)
class Tree:
    """One rooted tree of the forest; ``size`` counts edges."""

    root: int
    nodes: tuple[int, ...]
    edges: tuple[Edge, ...]

    @property
    def size(self) -> int:
        return len(self.edges)

    def children_map(self) -> dict[int, list[int]]:
        """Node -> children (the tails of its incoming edges), sorted."""
        children: dict[int, list[int]] = defaultdict(list)
        for e in self.edges:
            children[e.head].append(e.tail)
        return {v: sorted(c) for v, c in children.items()}

    def depth_map(self) -> dict[int, int]:
        depths = {self.root: 0}
        children = self.children_map()
        frontier = [self.root]
        while frontier:
            v = frontier.pop()
            for c in children.get(v, ()):
                depths[c] = depths[v] + 1
                frontier.append(c)
        if len(depths) != len(self.nodes):
            raise GraphError("tree is not connected from its root")
        return depths

    def outgoing(self) -> dict[int, Edge]:
        return {e.tail: e for e in self.edges}


@dataclass(frozen=True)
class ItemSharingGraph:
    """The whole forest: ``n`` agent nodes and the successor edges."""

    n: int
    edges: tuple[Edge, ...]


@dataclass(frozen=True)
class AtomPath:
    """All edges of one shattered item, in successor order.

    ``agents`` lists the path's k+1 agents; ``agents[i + 1]`` is the
    successor of ``agents[i]`` and every edge carries ``item``.
    """

    item: int
    agents: tuple[int, ...]
    edges: tuple[Edge, ...]

    @property
    def k(self) -> int:
        return len(self.edges)


def build_graph(trace: AllocationTrace) -> ItemSharingGraph:
    """Assemble the forest from a bid-and-take trace."""
    edges = []
    seen_tails = set()
    for rec in trace.successors:
        if rec.agent in seen_tails:
            raise GraphError(f"agent {rec.agent} has two successors in the trace")
        seen_tails.add(rec.agent)
        edges.append(Edge(rec.agent, rec.successor, rec.item))
    edges.sort(key=lambda e: (e.item, e.tail))
    graph = ItemSharingGraph(trace.n, tuple(edges))
    _check_forest(graph)
    return graph


def _check_forest(graph: ItemSharingGraph) -> None:
    if len(graph.edges) > max(graph.n - 1, 0):
        raise GraphError(f"{len(graph.edges)} edges for {graph.n} agents")
    out = {}
    for e in graph.edges:
        if e.tail in out:
            raise GraphError(f"agent {e.tail} has out-degree above one")
        out[e.tail] = e.head
    for start in out:
        seen = set()
        v = start
        while v in out:
            if v in seen:
                raise GraphError("successor relation contains a cycle")
            seen.add(v)
            v = out[v]


def trees(graph: ItemSharingGraph) -> list[Tree]:
    """Connected components as rooted trees, singletons included.

    Item sets of distinct trees are disjoint; components are ordered by
    their smallest agent.
    """
    neighbors: dict[int, set[int]] = defaultdict(set)
    for e in graph.edges:
        neighbors[e.tail].add(e.head)
        neighbors[e.head].add(e.tail)
    unvisited = set(range(graph.n))
    components = []
    while unvisited:
        start = min(unvisited)
        comp = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for w in neighbors.get(v, ()):
                if w not in comp:
                    comp.add(w)
                    frontier.append(w)
        unvisited -= comp
        components.append(comp)
    out = []
    for comp in sorted(components, key=min):
        edges = tuple(e for e in graph.edges if e.tail in comp)
        out.append(make_tree(edges, nodes=tuple(sorted(comp))))
    return out


def make_tree(edges: tuple[Edge, ...], nodes: tuple[int, ...] | None = None) -> Tree:
    """Build a rooted tree from a connected edge set.

    The root is the unique node without an outgoing edge.
    """
    if nodes is None:
        present = {e.tail for e in edges} | {e.head for e in edges}
        nodes = tuple(sorted(present))
    tails = {e.tail for e in edges}
    roots = [v for v in nodes if v not in tails]
    if len(roots) != 1:
        raise GraphError(f"edge set has {len(roots)} roots, expected exactly one")
    tree = Tree(roots[0], tuple(sorted(nodes)), tuple(sorted(edges, key=lambda e: (e.item, e.tail))))
    tree.depth_map()  # connectivity check
    return tree


def find_atom_paths(tree: Tree) -> list[AtomPath]:
    """One atom-path per shattered item of the tree, by item index."""
    by_item: dict[int, list[Edge]] = defaultdict(list)
    for e in tree.edges:
        by_item[e.item].append(e)
    paths = []
    for item in sorted(by_item):
        edges = by_item[item]
        if len(edges) < 2:
            continue
        paths.append(_chain(item, edges))
    return paths


def _chain(item: int, edges: list[Edge]) -> AtomPath:
    step = {}
    heads = set()
    for e in edges:
        if e.tail in step:
            raise GraphError(f"item {item} leaves agent {e.tail} twice")
        step[e.tail] = e
        heads.add(e.head)
    starts = [t for t in step if t not in heads]
    if len(starts) != 1:
        raise GraphError(f"edges of item {item} do not form a single path")
    agents = [starts[0]]
    ordered = []
    while agents[-1] in step:
        e = step[agents[-1]]
        ordered.append(e)
        agents.append(e.head)
    if len(ordered) != len(edges):
        raise GraphError(f"edges of item {item} do not form a single path")
    return AtomPath(item, tuple(agents), tuple(ordered))


def to_dot(
    graph: ItemSharingGraph,
    agent_names: tuple[str, ...] | None = None,
    item_names: tuple[str, ...] | None = None,
) -> str:
    """DOT rendering of the forest; shattered-item edges are highlighted."""
    item_count: dict[int, int] = defaultdict(int)
    for e in graph.edges:
        item_count[e.item] += 1

    def agent_label(i: int) -> str:
        return agent_names[i] if agent_names else f"agent{i}"

    def item_label(e: int) -> str:
        return item_names[e] if item_names else f"e{e}"

    lines = ["digraph item_sharing {"]
    for i in range(graph.n):
        lines.append(f'  {i} [label="{agent_label(i)}"];')
    for e in graph.edges:
        style = ' color=red style=bold' if item_count[e.item] >= 2 else ""
        lines.append(f'  {e.tail} -> {e.head} [label="{item_label(e.item)}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
