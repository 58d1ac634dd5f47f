"""Splitting a tree of the item-sharing forest into roundable components.

Trees without shattered items split into adjacent-edge pairs (plus at
most one leftover single edge): repeatedly take the deepest node's edge
together with a sibling edge if one exists, otherwise with the parent's
edge.  The remainder stays connected, so a size-z tree yields exactly
``z // 2`` pairs and ``z % 2`` singletons.

Trees with a shattered item instead split around an atom-path.  The
atom-path's edges come out as one unit; every remaining component that
contains an atom-path or has an even number of edges survives intact,
and every odd atom-path-free component donates one edge incident to its
(unique) atom-path agent, chosen so that the donation leaves only
even-size pieces.  The donated edges attach to the atom-path, at most
one per path agent, forming an expanded atom-path.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .graph import AtomPath, Edge, GraphError, Tree, find_atom_paths, make_tree
from .model import ModelError


class SplitError(ModelError):
    """Splitting precondition failure."""


@dataclass(frozen=True)
class SingleEdge:
    """A lone edge; rounded by plain threshold rounding."""

    edge: Edge

    kind = "single_edge"

    @property
    def edges(self) -> tuple[Edge, ...]:
        return (self.edge,)


@dataclass(frozen=True)
class Pair:
    """Two adjacent edges with distinct items, sharing ``middle``."""

    first: Edge
    second: Edge
    middle: int

    kind = "pair"

    @property
    def edges(self) -> tuple[Edge, ...]:
        return (self.first, self.second)

    @property
    def outer(self) -> tuple[int, int]:
        ends = []
        for e in (self.first, self.second):
            ends.append(e.head if e.tail == self.middle else e.tail)
        return (ends[0], ends[1])


@dataclass(frozen=True)
class ExpandedAtomPath:
    """An atom-path plus at most one attached edge per path agent.

    ``attachments`` maps path agents to donated edges as sorted
    ``(path_agent, edge)`` entries.
    """

    path: AtomPath
    attachments: tuple[tuple[int, Edge], ...]

    kind = "expanded_atom_path"

    @property
    def k(self) -> int:
        return self.path.k

    @property
    def h(self) -> int:
        return len(self.attachments)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.path.edges + tuple(e for _, e in self.attachments)

    def attached_agent(self, path_agent: int) -> int | None:
        for agent, edge in self.attachments:
            if agent == path_agent:
                return edge.head if edge.tail == agent else edge.tail
        return None


Component = SingleEdge | Pair | ExpandedAtomPath


def simple_split(tree: Tree) -> list[Pair | SingleEdge]:
    """Split an atom-path-free tree into edge pairs plus <= 1 single edge."""
    if find_atom_paths(tree):
        raise SplitError("tree contains an atom-path; use atom_path_split")
    remaining = list(tree.edges)
    out: list[Pair | SingleEdge] = []
    while remaining:
        if len(remaining) == 1:
            out.append(SingleEdge(remaining[0]))
            break
        sub = make_tree(tuple(remaining))
        depths = sub.depth_map()
        outgoing = sub.outgoing()
        children = sub.children_map()
        deepest = min(
            (v for v in sub.nodes if v in outgoing),
            key=lambda v: (-depths[v], v),
        )
        own = outgoing[deepest]
        parent = own.head
        siblings = [c for c in children.get(parent, []) if c != deepest]
        if siblings:
            mate = outgoing[min(siblings)]
        else:
            mate = outgoing.get(parent)
            if mate is None:
                # parent is the root and the deepest node is its only
                # child, impossible with two or more edges remaining
                raise GraphError("simple split lost track of the tree shape")
        out.append(Pair(own, mate, middle=parent))
        remaining = [e for e in remaining if e not in (own, mate)]
    return out


def _edge_components(
    nodes: set[int], edges: list[Edge]
) -> list[tuple[set[int], list[Edge]]]:
    """Connected components of the given edges; isolated nodes dropped."""
    neighbors: dict[int, set[int]] = defaultdict(set)
    for e in edges:
        neighbors[e.tail].add(e.head)
        neighbors[e.head].add(e.tail)
    unvisited = set(neighbors)
    comps = []
    while unvisited:
        start = min(unvisited)
        comp = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for w in neighbors[v]:
                if w not in comp:
                    comp.add(w)
                    frontier.append(w)
        unvisited -= comp
        comps.append((comp, [e for e in edges if e.tail in comp]))
    return sorted(comps, key=lambda c: min(c[0]))


def _has_atom_path(edges: list[Edge]) -> bool:
    count: dict[int, int] = defaultdict(int)
    for e in edges:
        count[e.item] += 1
    return any(c >= 2 for c in count.values())


def choose_attachment(edges: list[Edge], contact: int) -> Edge:
    """Pick the donated edge of an odd atom-path-free component.

    Returns an edge incident to ``contact`` whose removal leaves the far
    side with an even number of edges (the near side is then also even);
    a parity argument guarantees one exists.  Ties go to the smallest
    item index.
    """
    if len(edges) % 2 == 0:
        raise SplitError("component has even size, nothing to donate")
    if _has_atom_path(edges):
        raise SplitError("component contains an atom-path, nothing to donate")
    candidates = []
    for e in edges:
        if contact not in (e.tail, e.head):
            continue
        far = e.head if e.tail == contact else e.tail
        far_side = _reachable_edges(edges, start=far, blocked=e)
        if len(far_side) % 2 == 0:
            candidates.append(e)
    if not candidates:
        raise GraphError("no even-side edge at the atom-path agent; parity broken")
    return min(candidates, key=lambda e: (e.item, e.tail))


def _reachable_edges(edges: list[Edge], start: int, blocked: Edge) -> list[Edge]:
    neighbors: dict[int, list[Edge]] = defaultdict(list)
    for e in edges:
        if e is blocked:
            continue
        neighbors[e.tail].append(e)
        neighbors[e.head].append(e)
    seen_nodes = {start}
    seen_edges = []
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for e in neighbors[v]:
            w = e.head if e.tail == v else e.tail
            if w not in seen_nodes:
                seen_nodes.add(w)
                frontier.append(w)
        seen_edges.extend(e for e in neighbors[v] if e not in seen_edges)
    return seen_edges


def atom_path_split(tree: Tree) -> tuple[ExpandedAtomPath, list[Tree]]:
    """Split a tree with a shattered item around one atom-path.

    The atom-path with the smallest item index becomes the core of the
    expanded atom-path; the returned subtrees each contain an atom-path
    or have even size.
    """
    paths = find_atom_paths(tree)
    if not paths:
        raise SplitError("tree has no atom-path; use simple_split")
    path = paths[0]
    path_agents = set(path.agents)
    rest = [e for e in tree.edges if e not in path.edges]
    attachments: list[tuple[int, Edge]] = []
    good: list[Tree] = []
    for comp_nodes, comp_edges in _edge_components(set(tree.nodes), rest):
        if _has_atom_path(comp_edges) or len(comp_edges) % 2 == 0:
            good.append(make_tree(tuple(comp_edges)))
            continue
        contacts = sorted(comp_nodes & path_agents)
        if len(contacts) != 1:
            raise GraphError(
                f"odd component touches the atom-path at {len(contacts)} agents"
            )
        contact = contacts[0]
        donated = choose_attachment(comp_edges, contact)
        attachments.append((contact, donated))
        leftover = [e for e in comp_edges if e is not donated]
        for _, piece in _edge_components(comp_nodes, leftover):
            if len(piece) % 2 != 0:
                raise GraphError("donation left an odd piece; parity broken")
            if piece:
                good.append(make_tree(tuple(piece)))
    attachments.sort()
    seen_agents = [a for a, _ in attachments]
    if len(seen_agents) != len(set(seen_agents)):
        raise GraphError("a path agent collected two attachments")
    eap = ExpandedAtomPath(path, tuple(attachments))
    if eap.h > eap.k + 1:
        raise GraphError("more attachments than path agents")
    return eap, good
