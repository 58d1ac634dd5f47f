"""Fractional bid-and-take: continuous greedy WPROP allocation with a trace.

Items are consumed in the canonical (non-decreasing) order.  Each item is
continuously given to the active agent whose selection key is best; the
moment an agent's bundle reaches her proportional share she turns
inactive and the remainder of the item passes to the next chosen agent,
her *successor*.  The recorded successor relation is what later builds
the item-sharing forest.

Selection keys, chores:

``normalized`` (default)
    minimize ``c_i(e) / c_i(M)``.  This is the rule with the completion
    guarantee: some active agent can always absorb what is left, so the
    output is a complete fractional WPROP allocation on every valid
    instance.

``raw_cost``
    minimize ``c_i(e)``.  A simpler greedy variant; it can paint itself
    into a corner (all agents exactly filled with items left over), in
    which case :class:`StuckError` is raised.  Kept because its runs are
    useful reference fixtures; not used by the allocation pipeline.

Goods use the symmetric ``normalized`` rule (maximize ``v_i(e)/v_i(M)``)
and hand all remaining items to the last active agent.

Agents with an all-zero row have share zero and an undefined ratio; they
participate with key 0 and never turn inactive, so for chores they soak
up anything nobody else may take, at zero cost and zero subsidy.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ido import is_ido
from .model import (
    CHORES,
    GOODS,
    ZERO,
    FractionalAllocation,
    Instance,
    ModelError,
    require_valid,
)

NORMALIZED = "normalized"
RAW_COST = "raw_cost"


class FBTAError(ModelError):
    """Precondition failure for a bid-and-take run."""


class StuckError(FBTAError):
    """Every agent reached her share with items left (raw_cost rule only)."""


@dataclass(frozen=True)
class TraceEvent:
    """One continuous take: ``agent`` consumed ``fraction`` of ``item``."""

    item: int
    agent: int
    fraction: Fraction
    inactivated: bool


@dataclass(frozen=True)
class SuccessorRecord:
    """``successor`` took over the remainder of ``item`` from ``agent``."""

    agent: int
    successor: int
    item: int


@dataclass(frozen=True)
class AllocationTrace:
    """Ordered take events plus the successor relation they induce.

    ``last_item[i]`` is the last item agent ``i`` received a positive
    fraction of (None when she received nothing).  An agent has a
    successor record iff she turned inactive strictly before her last
    item was fully consumed and another agent then took a positive piece
    of it.
    """

    kind: str
    n: int
    m: int
    events: tuple[TraceEvent, ...]
    successors: tuple[SuccessorRecord, ...]
    last_item: tuple[int | None, ...]

    def successor_of(self, agent: int) -> SuccessorRecord | None:
        for rec in self.successors:
            if rec.agent == agent:
                return rec
        return None


def format_trace(trace: AllocationTrace) -> str:
    """One event per line: item, agent, fraction "p/q", inactivation flag."""
    lines = [f"# kind={trace.kind} agents={trace.n} items={trace.m}"]
    for ev in trace.events:
        flag = "inactivated" if ev.inactivated else "-"
        lines.append(f"item={ev.item} agent={ev.agent} fraction={ev.fraction} {flag}")
    for rec in trace.successors:
        lines.append(f"successor agent={rec.agent} -> {rec.successor} item={rec.item}")
    return "\n".join(lines) + "\n"


def _run(inst: Instance, selection: str) -> tuple[FractionalAllocation, AllocationTrace]:
    n, m = inst.n, inst.m
    totals = [inst.total_cost(i) for i in inst.agents()]
    shares = [inst.weights[i] * totals[i] for i in inst.agents()]
    goods = inst.kind == GOODS

    def key(agent: int, item: int) -> Fraction:
        cost = inst.costs[agent][item]
        if selection == RAW_COST:
            return cost
        return cost / totals[agent] if totals[agent] else ZERO

    def choose(active: list[int], item: int) -> int:
        if goods:
            return max(active, key=lambda a: (key(a, item), -a))
        return min(active, key=lambda a: (key(a, item), a))

    x = [[ZERO] * m for _ in range(n)]
    load = [ZERO] * n
    active = list(inst.agents())
    events: list[TraceEvent] = []
    successors: list[SuccessorRecord] = []
    last_item: list[int | None] = [None] * n

    def take(agent: int, item: int, fraction: Fraction, inactivated: bool) -> None:
        nonlocal pending
        x[agent][item] += fraction
        load[agent] += fraction * inst.costs[agent][item]
        events.append(TraceEvent(item, agent, fraction, inactivated))
        if fraction > 0:
            last_item[agent] = item
            if pending is not None:
                successors.append(SuccessorRecord(pending, agent, item))
                pending = None
        if inactivated and fraction > 0:
            pending = agent

    j = 0
    while j < m:
        pending = None
        z = Fraction(1)
        while True:
            if not active:
                raise StuckError(
                    f"all agents reached their share with item {j} unfinished; "
                    f"the {selection!r} selection rule cannot complete this instance"
                )
            i = choose(active, j)
            cost = inst.costs[i][j]
            if load[i] + z * cost > shares[i]:
                fraction = (shares[i] - load[i]) / cost
                take(i, j, fraction, inactivated=True)
                z -= fraction
                active.remove(i)
                if goods and len(active) == 1:
                    # lone active agent absorbs everything that is left
                    only = active[0]
                    take(only, j, z, inactivated=False)
                    for rest in range(j + 1, m):
                        take(only, rest, Fraction(1), inactivated=False)
                    j = m
                    break
            else:
                take(i, j, z, inactivated=False)
                j += 1
                break

    allocation = FractionalAllocation(tuple(tuple(row) for row in x))
    assert allocation.is_complete(), "bid-and-take left an item partially allocated"
    trace = AllocationTrace(
        kind=inst.kind,
        n=n,
        m=m,
        events=tuple(events),
        successors=tuple(successors),
        last_item=tuple(last_item),
    )
    return allocation, trace


def fbta_chores(
    inst: Instance, selection: str = NORMALIZED
) -> tuple[FractionalAllocation, AllocationTrace]:
    """Run bid-and-take on an IDO chores instance.

    Returns a complete fractional allocation with ``c_i(x_i) <= share_i``
    for every agent (equality for every inactivated agent) and at most
    ``n - 1`` fractional items, plus the trace.
    """
    require_valid(inst)
    if inst.kind != CHORES:
        raise FBTAError(f"expected a chores instance, got kind={inst.kind!r}")
    if not is_ido(inst):
        raise FBTAError("instance is not in canonical non-decreasing order")
    if selection not in (NORMALIZED, RAW_COST):
        raise FBTAError(f"unknown selection rule {selection!r}")
    return _run(inst, selection)


def fbta_goods(inst: Instance) -> tuple[FractionalAllocation, AllocationTrace]:
    """Run bid-and-take on an IDO goods instance.

    Returns a complete fractional allocation with ``v_i(x_i) >= share_i``
    for every agent and at most ``n - 1`` fractional items, plus the trace.
    """
    require_valid(inst)
    if inst.kind != GOODS:
        raise FBTAError(f"expected a goods instance, got kind={inst.kind!r}")
    if not is_ido(inst):
        raise FBTAError("instance is not in canonical non-decreasing order")
    return _run(inst, NORMALIZED)


def fbta(inst: Instance) -> tuple[FractionalAllocation, AllocationTrace]:
    """Dispatch to the chores or goods variant by instance kind."""
    if inst.kind == CHORES:
        return fbta_chores(inst)
    return fbta_goods(inst)


def fractional_items(
    alloc: FractionalAllocation,
) -> list[tuple[int, tuple[int, ...]]]:
    """Items shared by two or more agents, with their sharers.

    Returned in item order; sharers in agent order.
    """
    out = []
    for e in range(alloc.m):
        sharers = alloc.sharers(e)
        if len(sharers) >= 2:
            out.append((e, sharers))
    return out
