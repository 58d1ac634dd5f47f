"""Reduction to identical-ordering instances and the lifting of allocations.

An instance is identical-ordering (IDO) when every agent ranks the items
the same way.  The canonical order used throughout this package is
non-decreasing cost (chores) or non-decreasing value (goods): row ``i``
of an IDO instance satisfies ``c_i(e_0) <= c_i(e_1) <= ...``.

Any instance reduces to an IDO one by sorting each agent's row; an
integral allocation of the IDO instance then lifts back through a
picking sequence that never increases any agent's cost (chores) nor
decreases her value (goods), so subsidies only shrink under lifting.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import CHORES, Instance, IntegralAllocation, ModelError


@dataclass(frozen=True)
class RankProfile:
    """Per-agent ranking used by the reduction.

    ``sigma[i][r]`` is the r-th most costly (most valuable, for goods)
    original item under agent ``i``'s row, ties broken by smaller item
    index.  Slot ``k`` of the reduced instance takes the cost of
    ``sigma[i][m - 1 - k]``, which makes every reduced row non-decreasing.
    """

    sigma: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.sigma[0]) if self.sigma else 0


def is_ido(inst: Instance) -> bool:
    """True iff every agent's row is non-decreasing in item order."""
    return all(
        row[e] <= row[e + 1] for row in inst.costs for e in range(len(row) - 1)
    )


def reduce_to_ido(inst: Instance) -> tuple[Instance, RankProfile]:
    """Sort each agent's row into the canonical non-decreasing order.

    The reduced instance keeps kind, weights, and every row total, so
    each agent's proportional share is unchanged.
    """
    sigma = []
    costs = []
    m = inst.m
    for row in inst.costs:
        desc = sorted(range(m), key=lambda e: (-row[e], e))
        sigma.append(tuple(desc))
        costs.append(tuple(row[desc[m - 1 - k]] for k in range(m)))
    ido_inst = Instance(kind=inst.kind, weights=inst.weights, costs=tuple(costs))
    return ido_inst, RankProfile(tuple(sigma))


def lift_allocation(
    inst: Instance, profile: RankProfile, ido_alloc: IntegralAllocation
) -> IntegralAllocation:
    """Lift an integral allocation of the reduced instance back.

    Slots are visited from cheapest to costliest for chores (the reverse
    for goods) and each slot's owner picks her favorite still-unallocated
    original item: minimum cost for chores, maximum value for goods, ties
    to the smaller item index.  Guarantees, per agent, that the lifted
    bundle costs at most (is worth at least) the reduced-instance bundle.
    """
    m = inst.m
    if ido_alloc.m != m:
        raise ModelError(
            f"allocation covers {ido_alloc.m} items, instance has {m}"
        )
    if profile.m != m and m > 0:
        raise ModelError("rank profile does not match the instance")
    order = range(m) if inst.kind == CHORES else range(m - 1, -1, -1)
    remaining = set(range(m))
    owner = [0] * m
    for slot in order:
        agent = ido_alloc.owner[slot]
        row = inst.costs[agent]
        if inst.kind == CHORES:
            pick = min(remaining, key=lambda e: (row[e], e))
        else:
            pick = max(remaining, key=lambda e: (row[e], -e))
        remaining.remove(pick)
        owner[pick] = agent
    return IntegralAllocation(tuple(owner))
