"""Rounding fractional allocations to integral ones with bound certificates.

Every component cut out of the item-sharing forest is rounded by exact
minimization over a small candidate set that contains each scheme used
in the worst-case analysis, so the analysis' per-component bounds carry
over to the exact minimum:

* single edge: threshold rounding, subsidy at most 1/2;
* pair of adjacent edges: best of the four endpoint assignments,
  subsidy at most 2/3;
* expanded atom-path with k core edges and h attachments: best placement
  of the shared item over the k+1 path agents, with each attached edge
  rounded to whichever endpoint is exactly cheaper, subsidy at most
  (k + h) / 3.

Per-component subsidies are accounted with agent-level clamping inside
the component.  Summing components over-counts only safely (the positive
part is subadditive), so the certificate's component sum dominates the
true total subsidy of the rounded allocation, which in turn dominates
the total after lifting back to the original item order.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, replace
from fractions import Fraction

from .fbta import AllocationTrace, fbta, fractional_items
from .graph import ItemSharingGraph, Tree, build_graph, find_atom_paths, trees
from .ido import RankProfile, lift_allocation, reduce_to_ido
from .model import (
    CHORES,
    ONE,
    ZERO,
    FractionalAllocation,
    Instance,
    IntegralAllocation,
    ModelError,
    SubsidyVector,
    compute_subsidies,
    require_valid,
)
from .split import (
    ExpandedAtomPath,
    Pair,
    SingleEdge,
    atom_path_split,
    simple_split,
)

HALF = Fraction(1, 2)
TWO_THIRDS = Fraction(2, 3)

TREE = "tree"
BASELINE = "baseline"


class RoundingError(ModelError):
    """Rounding precondition failure."""


def local_subsidy(
    inst: Instance,
    alloc: FractionalAllocation,
    assignment: dict[int, int],
) -> Fraction:
    """Exact subsidy increase caused by rounding the given items.

    For each agent touched by the component, the signed change of her
    load (chores) or her value (goods) relative to the fractional
    position is accumulated over the component's items, then clamped at
    the agent level: agents pushed above their fractional load need the
    excess refunded, agents relieved need nothing.
    """
    delta: dict[int, Fraction] = defaultdict(lambda: ZERO)
    for item, owner in assignment.items():
        sharers = alloc.sharers(item)
        if owner not in sharers:
            raise RoundingError(f"item {item} rounded to non-sharer {owner}")
        for agent in sharers:
            u = inst.costs[agent][item]
            held = alloc.shares[agent][item]
            if agent == owner:
                delta[agent] += (ONE - held) * u
            else:
                delta[agent] -= held * u
    if inst.kind == CHORES:
        return sum((d for d in delta.values() if d > 0), ZERO)
    return sum((-d for d in delta.values() if d < 0), ZERO)


@dataclass(frozen=True)
class ComponentRounding:
    """One rounded component: its assignment, exact cost, and bound."""

    kind: str
    items: tuple[int, ...]
    assignment: tuple[tuple[int, int], ...]
    scheme: str
    local_subsidy: Fraction
    bound: Fraction

    def assignment_map(self) -> dict[int, int]:
        return dict(self.assignment)


def _component(kind, assignment, scheme, local, bound) -> ComponentRounding:
    if local > bound:
        raise RoundingError(
            f"{kind} component exceeded its bound: {local} > {bound}"
        )
    return ComponentRounding(
        kind=kind,
        items=tuple(sorted(assignment)),
        assignment=tuple(sorted(assignment.items())),
        scheme=scheme,
        local_subsidy=local,
        bound=bound,
    )


def round_single_edge(
    inst: Instance, alloc: FractionalAllocation, comp: SingleEdge
) -> ComponentRounding:
    """Threshold rounding of a lone shared item; subsidy at most 1/2."""
    item = comp.edge.item
    sharers = alloc.sharers(item)
    if len(sharers) != 2:
        raise RoundingError(
            f"single-edge component expects 2 sharers on item {item}, "
            f"found {len(sharers)}"
        )
    owner = max(sharers, key=lambda a: (alloc.shares[a][item], -a))
    assignment = {item: owner}
    return _component(
        "single_edge",
        assignment,
        scheme=f"threshold->{owner}",
        local=local_subsidy(inst, alloc, assignment),
        bound=HALF,
    )


_PAIR_SCHEMES = ("LL", "RR", "LR", "RL")


def round_pair(
    inst: Instance, alloc: FractionalAllocation, comp: Pair
) -> ComponentRounding:
    """Exact best of the four endpoint assignments; subsidy at most 2/3.

    With the two items e1, e2 and the shared middle agent: LL gives e1
    to the far endpoint and e2 to the middle, RR the reverse, LR both to
    the far endpoints, RL both to the middle.
    """
    e1, e2 = comp.first.item, comp.second.item
    if e1 == e2:
        raise RoundingError("pair component carries a shattered item")
    out1, out2 = comp.outer
    mid = comp.middle
    options = {
        "LL": {e1: out1, e2: mid},
        "RR": {e1: mid, e2: out2},
        "LR": {e1: out1, e2: out2},
        "RL": {e1: mid, e2: mid},
    }
    best = min(
        _PAIR_SCHEMES,
        key=lambda s: (local_subsidy(inst, alloc, options[s]), _PAIR_SCHEMES.index(s)),
    )
    return _component(
        "pair",
        options[best],
        scheme=best,
        local=local_subsidy(inst, alloc, options[best]),
        bound=TWO_THIRDS,
    )


def round_expanded_atom_path(
    inst: Instance, alloc: FractionalAllocation, eap: ExpandedAtomPath
) -> ComponentRounding:
    """Exact best rounding of an expanded atom-path; at most (k + h) / 3.

    The shared core item must go to one of the k+1 path agents.  Given
    that placement, distinct attached edges touch disjoint agent pairs,
    so each one is independently rounded to its exactly-cheaper endpoint.
    The candidate set contains every scheme used in the worst-case
    analysis (threshold placement, placement on the unattached agent,
    biased rounding of attachments, and their complements), hence the
    exact minimum inherits the (k + h) / 3 guarantee.
    """
    k, h = eap.k, eap.h
    if k < 2:
        raise RoundingError(f"atom-path must have at least 2 edges, got {k}")
    if h > k + 1:
        raise RoundingError(f"{h} attachments on {k + 1} path agents")
    core = eap.path.item
    agents = eap.path.agents
    if set(alloc.sharers(core)) != set(agents):
        raise RoundingError("path agents do not match the core item's sharers")
    chores = inst.kind == CHORES

    def clamp(d: Fraction) -> Fraction:
        signed = d if chores else -d
        return signed if signed > 0 else ZERO

    best: tuple | None = None
    for owner in agents:
        core_delta = {}
        for a in agents:
            held = alloc.shares[a][core]
            u = inst.costs[a][core]
            core_delta[a] = (ONE - held) * u if a == owner else -held * u
        attached_agents = set()
        total = ZERO
        assignment = {core: owner}
        for path_agent, edge in eap.attachments:
            other = edge.head if edge.tail == path_agent else edge.tail
            attached_agents.add(path_agent)
            item = edge.item
            if set(alloc.sharers(item)) != {path_agent, other}:
                raise RoundingError("attached edge endpoints do not share its item")
            side: list[tuple[Fraction, int]] = []
            for choice in sorted((path_agent, other)):
                d_path = core_delta[path_agent]
                d_other = ZERO
                for who in (path_agent, other):
                    held = alloc.shares[who][item]
                    u = inst.costs[who][item]
                    change = (ONE - held) * u if who == choice else -held * u
                    if who == path_agent:
                        d_path += change
                    else:
                        d_other += change
                side.append((clamp(d_path) + clamp(d_other), choice))
            value, choice = min(side)
            total += value
            assignment[item] = choice
        for a in agents:
            if a not in attached_agents:
                total += clamp(core_delta[a])
        candidate = (total, owner, assignment)
        if best is None or candidate[:2] < best[:2]:
            best = candidate
    assert best is not None
    total, owner, assignment = best
    exact = local_subsidy(inst, alloc, assignment)
    if exact != total:
        raise RoundingError("placement decomposition disagrees with direct accounting")
    return _component(
        "expanded_atom_path",
        assignment,
        scheme=f"core->{owner}",
        local=exact,
        bound=Fraction(k + h, 3),
    )


@dataclass(frozen=True)
class TreeRounding:
    """All component roundings of one tree of the forest.

    ``emitted`` names the assignment actually materialized for the tree:
    the bound-certified split assignment, or the per-item threshold
    assignment when that one is exactly cheaper for this tree's agents
    (trees have disjoint agent sets, so the comparison is exact).  Either
    way the split components carry the certificate.
    """

    root: int
    size: int
    has_atom_path: bool
    bound: Fraction
    components: tuple[ComponentRounding, ...]
    emitted: str = "split"

    @property
    def local_total(self) -> Fraction:
        return sum((c.local_subsidy for c in self.components), ZERO)


def round_tree(
    inst: Instance, alloc: FractionalAllocation, tree: Tree
) -> TreeRounding:
    """Round one tree: split around atom-paths, else into pairs.

    A tree of z edges containing an atom-path costs at most z/3; an
    atom-path-free tree costs at most z/3 for even z and z/3 + 1/6 for
    odd z (the leftover single edge).
    """
    has_ap = bool(find_atom_paths(tree))
    components: list[ComponentRounding] = []
    if tree.size == 0:
        bound = ZERO
    elif has_ap:
        eap, subtrees = atom_path_split(tree)
        components.append(round_expanded_atom_path(inst, alloc, eap))
        for sub in subtrees:
            components.extend(round_tree(inst, alloc, sub).components)
        bound = Fraction(tree.size, 3)
    else:
        for comp in simple_split(tree):
            if isinstance(comp, Pair):
                components.append(round_pair(inst, alloc, comp))
            else:
                components.append(round_single_edge(inst, alloc, comp))
        bound = Fraction(tree.size, 3)
        if tree.size % 2 == 1:
            bound += Fraction(1, 6)
    total_bound = sum((c.bound for c in components), ZERO)
    if total_bound != bound:
        raise RoundingError(
            f"component bounds sum to {total_bound}, tree bound is {bound}"
        )
    return TreeRounding(
        root=tree.root,
        size=tree.size,
        has_atom_path=has_ap,
        bound=bound,
        components=tuple(components),
    )


def _threshold_assignment(
    alloc: FractionalAllocation, items: list[int]
) -> dict[int, int]:
    return {
        item: max(alloc.sharers(item), key=lambda a: (alloc.shares[a][item], -a))
        for item in items
    }


def _tree_subsidy(
    inst: Instance,
    alloc: FractionalAllocation,
    tree: Tree,
    assignment: dict[int, int],
) -> Fraction:
    """True total subsidy of the tree's agents under the assignment.

    Exact because an agent's whole bundle is her single-sharer items plus
    items assigned within her own tree.
    """
    total = ZERO
    chores = inst.kind == CHORES
    for agent in tree.nodes:
        load = ZERO
        row = alloc.shares[agent]
        costs = inst.costs[agent]
        for e in range(alloc.m):
            if row[e] == ONE:
                load += costs[e]
        for item, owner in assignment.items():
            if owner == agent:
                load += costs[item]
        share = inst.weights[agent] * inst.total_cost(agent)
        gap = load - share if chores else share - load
        if gap > 0:
            total += gap
    return total


def integralize(
    alloc: FractionalAllocation, assignment: dict[int, int]
) -> IntegralAllocation:
    """Materialize the rounding: assigned items move, whole items stay."""
    owner = []
    for e in range(alloc.m):
        sharers = alloc.sharers(e)
        if len(sharers) == 1:
            owner.append(sharers[0])
        elif e in assignment:
            owner.append(assignment[e])
        else:
            raise RoundingError(f"fractional item {e} has no assignment")
    return IntegralAllocation(tuple(owner))


def round_baseline(
    inst: Instance, alloc: FractionalAllocation
) -> tuple[IntegralAllocation, SubsidyVector]:
    """Per-item threshold rounding; total subsidy at most (n - 1) / 2."""
    assignment = {}
    for item, sharers in fractional_items(alloc):
        assignment[item] = max(sharers, key=lambda a: (alloc.shares[a][item], -a))
    allocation = integralize(alloc, assignment)
    return allocation, compute_subsidies(inst, allocation)


def _baseline_components(
    inst: Instance, alloc: FractionalAllocation
) -> list[ComponentRounding]:
    out = []
    for item, sharers in fractional_items(alloc):
        owner = max(sharers, key=lambda a: (alloc.shares[a][item], -a))
        assignment = {item: owner}
        q = len(sharers)
        out.append(
            _component(
                "threshold_item",
                assignment,
                scheme=f"threshold->{owner}",
                local=local_subsidy(inst, alloc, assignment),
                bound=Fraction(q - 1, q),
            )
        )
    return out


@dataclass(frozen=True)
class RoundingCertificate:
    """Machine-checkable record of every subsidy bound, all exact.

    Inequality chain certified (chores; goods mirror it):

        final total <= rounded total <= sum of component subsidies
                    <= sum of component bounds <= global bound

    where the global bound is n/3 - 1/6 for chores (n/3 for goods), the
    strengthening (n-1)/3 applies whenever the forest has fewer than
    n - 1 edges or some item is shared by three or more agents, and the
    baseline method is bounded by (n-1)/2 instead.
    """

    kind: str
    n: int
    m: int
    method: str
    edge_count: int
    fractional_count: int
    has_shattered_item: bool
    trees: tuple[TreeRounding, ...]
    components: tuple[ComponentRounding, ...]
    rounded_subsidies: SubsidyVector
    final_subsidies: SubsidyVector
    global_bound: Fraction
    strong_bound: Fraction | None

    @property
    def component_subsidy_total(self) -> Fraction:
        return sum((c.local_subsidy for c in self.components), ZERO)

    @property
    def component_bound_total(self) -> Fraction:
        return sum((c.bound for c in self.components), ZERO)

    @property
    def rounded_total(self) -> Fraction:
        return self.rounded_subsidies.total

    @property
    def final_total(self) -> Fraction:
        return self.final_subsidies.total

    def failures(self) -> list[str]:
        bad = []
        for c in self.components:
            if c.local_subsidy > c.bound:
                bad.append(
                    f"{c.kind} on items {c.items}: {c.local_subsidy} > {c.bound}"
                )
        if self.rounded_total > self.component_subsidy_total:
            bad.append(
                f"rounded total {self.rounded_total} exceeds component sum "
                f"{self.component_subsidy_total}"
            )
        if self.component_subsidy_total > self.component_bound_total:
            bad.append("component subsidies exceed component bounds")
        if self.component_bound_total > self.global_bound:
            bad.append(
                f"component bounds {self.component_bound_total} exceed the "
                f"global bound {self.global_bound}"
            )
        if self.final_total > self.rounded_total:
            bad.append(
                f"lifted total {self.final_total} exceeds rounded total "
                f"{self.rounded_total}"
            )
        if self.final_total > self.global_bound:
            bad.append(
                f"total subsidy {self.final_total} exceeds {self.global_bound}"
            )
        if self.strong_bound is not None and self.final_total > self.strong_bound:
            bad.append(
                f"total subsidy {self.final_total} exceeds the strengthened "
                f"bound {self.strong_bound}"
            )
        return bad

    @property
    def holds(self) -> bool:
        return not self.failures()

    def to_doc(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "m": self.m,
            "method": self.method,
            "accounting": "agent-clamped exact deltas per component; "
            "cross-component sums over-count only safely",
            "edge_count": self.edge_count,
            "fractional_item_count": self.fractional_count,
            "has_shattered_item": self.has_shattered_item,
            "trees": [
                {
                    "root": t.root,
                    "size": t.size,
                    "has_atom_path": t.has_atom_path,
                    "emitted": t.emitted,
                    "bound": str(t.bound),
                    "components": [
                        {
                            "kind": c.kind,
                            "items": list(c.items),
                            "assignment": {str(i): a for i, a in c.assignment},
                            "scheme": c.scheme,
                            "local_subsidy": str(c.local_subsidy),
                            "bound": str(c.bound),
                        }
                        for c in t.components
                    ],
                }
                for t in self.trees
            ],
            "components": [
                {
                    "kind": c.kind,
                    "items": list(c.items),
                    "assignment": {str(i): a for i, a in c.assignment},
                    "scheme": c.scheme,
                    "local_subsidy": str(c.local_subsidy),
                    "bound": str(c.bound),
                }
                for c in self.components
            ],
            "component_subsidy_total": str(self.component_subsidy_total),
            "component_bound_total": str(self.component_bound_total),
            "rounded_total_subsidy": str(self.rounded_total),
            "final_total_subsidy": str(self.final_total),
            "global_bound": str(self.global_bound),
            "strong_bound": None if self.strong_bound is None else str(self.strong_bound),
            "holds": self.holds,
            "failures": self.failures(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2, sort_keys=True) + "\n"


def global_bound(kind: str, n: int, method: str) -> Fraction:
    if n <= 1:
        return ZERO
    if method == BASELINE:
        return Fraction(n - 1, 2)
    if kind == CHORES:
        return Fraction(n, 3) - Fraction(1, 6)
    return Fraction(n, 3)


@dataclass(frozen=True)
class PipelineResult:
    """Everything the full run produced, for callers that want the parts."""

    instance: Instance
    ido_instance: Instance
    profile: RankProfile
    fractional: FractionalAllocation
    trace: AllocationTrace
    graph: ItemSharingGraph
    ido_allocation: IntegralAllocation
    allocation: IntegralAllocation
    subsidies: SubsidyVector
    certificate: RoundingCertificate


def run_pipeline(inst: Instance, method: str = TREE) -> PipelineResult:
    """Reduce, allocate fractionally, round, lift, and certify."""
    if method not in (TREE, BASELINE):
        raise RoundingError(f"unknown rounding method {method!r}")
    require_valid(inst)
    ido_inst, profile = reduce_to_ido(inst)
    alloc, trace = fbta(ido_inst)
    graph = build_graph(trace)
    forest = trees(graph)
    tree_roundings: tuple[TreeRounding, ...] = ()
    assignment: dict[int, int] = {}
    if method == TREE:
        rounded_trees = []
        for tree in forest:
            rounding = round_tree(ido_inst, alloc, tree)
            split_assignment: dict[int, int] = {}
            for comp in rounding.components:
                split_assignment.update(comp.assignment_map())
            # emit the exactly-cheaper of the certified split assignment
            # and plain thresholding; the split components keep carrying
            # the bound either way
            threshold = _threshold_assignment(alloc, sorted(split_assignment))
            if _tree_subsidy(ido_inst, alloc, tree, threshold) < _tree_subsidy(
                ido_inst, alloc, tree, split_assignment
            ):
                assignment.update(threshold)
                rounding = replace(rounding, emitted="threshold")
            else:
                assignment.update(split_assignment)
            rounded_trees.append(rounding)
        tree_roundings = tuple(rounded_trees)
        components = tuple(c for t in tree_roundings for c in t.components)
    else:
        components = tuple(_baseline_components(ido_inst, alloc))
        for comp in components:
            assignment.update(comp.assignment_map())
    ido_allocation = integralize(alloc, assignment)
    rounded = compute_subsidies(ido_inst, ido_allocation)
    allocation = lift_allocation(inst, profile, ido_allocation)
    subsidies = compute_subsidies(inst, allocation)
    fracs = fractional_items(alloc)
    shattered = any(len(sharers) >= 3 for _, sharers in fracs)
    strong = None
    if method == TREE and inst.n >= 2 and (
        len(graph.edges) < inst.n - 1 or shattered
    ):
        strong = Fraction(inst.n - 1, 3)
    certificate = RoundingCertificate(
        kind=inst.kind,
        n=inst.n,
        m=inst.m,
        method=method,
        edge_count=len(graph.edges),
        fractional_count=len(fracs),
        has_shattered_item=shattered,
        trees=tree_roundings,
        components=components,
        rounded_subsidies=rounded,
        final_subsidies=subsidies,
        global_bound=global_bound(inst.kind, inst.n, method),
        strong_bound=strong,
    )
    return PipelineResult(
        instance=inst,
        ido_instance=ido_inst,
        profile=profile,
        fractional=alloc,
        trace=trace,
        graph=graph,
        ido_allocation=ido_allocation,
        allocation=allocation,
        subsidies=subsidies,
        certificate=certificate,
    )


def allocate_with_subsidy(
    inst: Instance, method: str = TREE
) -> tuple[IntegralAllocation, SubsidyVector, RoundingCertificate]:
    """Full pipeline: returns the allocation, subsidies, and certificate."""
    result = run_pipeline(inst, method)
    return result.allocation, result.subsidies, result.certificate
