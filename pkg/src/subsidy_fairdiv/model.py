"""Core domain types: instances, allocations, subsidies, and their file formats.

Every numeric quantity in this package is an exact rational
(``fractions.Fraction``).  The subsidy guarantees are exact inequalities
between rationals, so floats are rejected at every input boundary: a
certificate produced with binary floating point could not be trusted.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

CHORES = "chores"
GOODS = "goods"
KINDS = (CHORES, GOODS)

ZERO = Fraction(0)
ONE = Fraction(1)


class ModelError(ValueError):
    """Malformed instance, allocation, or serialized document."""


def frac(value: int | str | Fraction) -> Fraction:
    """Convert a value to an exact ``Fraction``.

    Accepts ints, Fractions, and strings like ``"3"``, ``"7/10"`` or
    ``"0.7"``.  Decimal strings convert exactly (power-of-ten
    denominators).  Floats are rejected: ``0.7`` as a float is not 7/10.
    """
    if isinstance(value, bool):
        raise ModelError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"not a rational: {value!r}") from exc
    if isinstance(value, float):
        raise ModelError(
            f"floats are inexact, got {value!r}; pass a string such as \"{value}\""
        )
    raise ModelError(f"not a rational: {value!r}")


def _frac_matrix(rows: Iterable[Iterable[object]]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(frac(v) for v in row) for row in rows)


@dataclass(frozen=True)
class Instance:
    """An allocation instance: agents with weights, items with costs/values.

    ``costs[i][e]`` is agent ``i``'s cost (chores) or value (goods) for
    item ``e``.  Weights must be positive and sum to one exactly; every
    cost must lie in [0, 1].  Use :func:`validate_instance` to check.
    """

    kind: str
    weights: tuple[Fraction, ...]
    costs: tuple[tuple[Fraction, ...], ...]
    agent_names: tuple[str, ...] | None = None
    item_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(frac(w) for w in self.weights))
        object.__setattr__(self, "costs", _frac_matrix(self.costs))
        if self.agent_names is not None:
            object.__setattr__(self, "agent_names", tuple(self.agent_names))
        if self.item_names is not None:
            object.__setattr__(self, "item_names", tuple(self.item_names))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def m(self) -> int:
        return len(self.costs[0]) if self.costs else 0

    def total_cost(self, agent: int) -> Fraction:
        """c_i(M): the agent's cost (or value) for the whole item set."""
        return sum(self.costs[agent], ZERO)

    def agents(self) -> range:
        return range(self.n)

    def items(self) -> range:
        return range(self.m)


def wprop_share(inst: Instance, agent: int) -> Fraction:
    """The agent's weighted proportional share ``w_i * c_i(M)``."""
    if not 0 <= agent < inst.n:
        raise IndexError(f"agent index {agent} out of range for n={inst.n}")
    return inst.weights[agent] * inst.total_cost(agent)


@dataclass(frozen=True)
class FractionalAllocation:
    """A complete fractional allocation: ``shares[i][e]`` in [0, 1]."""

    shares: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "shares", _frac_matrix(self.shares))

    @property
    def n(self) -> int:
        return len(self.shares)

    @property
    def m(self) -> int:
        return len(self.shares[0]) if self.shares else 0

    def column_sum(self, item: int) -> Fraction:
        return sum((row[item] for row in self.shares), ZERO)

    def is_complete(self) -> bool:
        return all(self.column_sum(e) == ONE for e in range(self.m))

    def sharers(self, item: int) -> tuple[int, ...]:
        """Agents holding a positive fraction of the item, by index."""
        return tuple(i for i in range(self.n) if self.shares[i][item] > 0)

    def agent_load(self, inst: Instance, agent: int) -> Fraction:
        """c_i(x_i): cost (or value) of the agent's fractional bundle."""
        row = self.shares[agent]
        costs = inst.costs[agent]
        return sum((row[e] * costs[e] for e in range(inst.m)), ZERO)


@dataclass(frozen=True)
class IntegralAllocation:
    """A partition of the items: ``owner[e]`` is the receiving agent."""

    owner: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "owner", tuple(int(o) for o in self.owner))

    @property
    def m(self) -> int:
        return len(self.owner)

    def bundle(self, agent: int) -> tuple[int, ...]:
        return tuple(e for e, o in enumerate(self.owner) if o == agent)

    def bundle_cost(self, inst: Instance, agent: int) -> Fraction:
        costs = inst.costs[agent]
        return sum((costs[e] for e, o in enumerate(self.owner) if o == agent), ZERO)


@dataclass(frozen=True)
class SubsidyVector:
    """Per-agent subsidies; always the pointwise minimum achieving WPROPS."""

    amounts: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "amounts", tuple(frac(a) for a in self.amounts))

    @property
    def total(self) -> Fraction:
        return sum(self.amounts, ZERO)


def compute_subsidies(inst: Instance, alloc: IntegralAllocation) -> SubsidyVector:
    """Minimum subsidies making the allocation weighted-proportional.

    Chores: ``s_i = max(c_i(X_i) - share_i, 0)``.
    Goods:  ``s_i = max(share_i - v_i(X_i), 0)``.
    """
    if alloc.m != inst.m:
        raise ModelError(
            f"allocation covers {alloc.m} items, instance has {inst.m}"
        )
    for e, o in enumerate(alloc.owner):
        if not 0 <= o < inst.n:
            raise ModelError(f"item {e} assigned to unknown agent {o}")
    amounts = []
    for i in inst.agents():
        share = wprop_share(inst, i)
        load = alloc.bundle_cost(inst, i)
        gap = load - share if inst.kind == CHORES else share - load
        amounts.append(max(gap, ZERO))
    return SubsidyVector(tuple(amounts))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of instance validation: violations and degeneracy flags."""

    violations: tuple[str, ...]
    degenerate_agents: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_instance(inst: Instance) -> ValidationReport:
    """Check every instance invariant; report all violations at once.

    Agents with an all-zero cost row are flagged as degenerate (their
    share is zero and the selection ratio is undefined for them), which
    is not a violation.
    """
    violations: list[str] = []
    if inst.kind not in KINDS:
        violations.append(f"unknown kind {inst.kind!r}")
    if inst.n < 1:
        violations.append("instance needs at least one agent")
    row_lengths = {len(row) for row in inst.costs}
    if len(inst.costs) != inst.n:
        violations.append(
            f"cost matrix has {len(inst.costs)} rows for {inst.n} agents"
        )
    if len(row_lengths) > 1:
        violations.append(f"cost rows have inconsistent lengths {sorted(row_lengths)}")
    for i, w in enumerate(inst.weights):
        if w <= 0:
            violations.append(f"weight of agent {i} is {w}, must be positive")
    if inst.weights and sum(inst.weights, ZERO) != ONE:
        violations.append(f"weights sum to {sum(inst.weights, ZERO)}, not 1")
    for i, row in enumerate(inst.costs):
        for e, c in enumerate(row):
            if c < 0:
                violations.append(f"cost of item {e} for agent {i} is {c}, below 0")
            elif c > 1:
                violations.append(f"cost of item {e} for agent {i} is {c}, exceeds 1")
    if inst.agent_names is not None and len(inst.agent_names) != inst.n:
        violations.append("agent_names length does not match agent count")
    if inst.item_names is not None and len(inst.item_names) != inst.m:
        violations.append("item_names length does not match item count")
    degenerate = tuple(
        i for i, row in enumerate(inst.costs) if sum(row, ZERO) == 0
    )
    return ValidationReport(tuple(violations), degenerate)


def require_valid(inst: Instance) -> None:
    report = validate_instance(inst)
    if not report.ok:
        raise ModelError("invalid instance: " + "; ".join(report.violations))


# ---------------------------------------------------------------------------
# Canonical file format (JSON, exact rational strings, LF line endings)
# ---------------------------------------------------------------------------

def _load_json(text: str, what: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{what}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ModelError(f"{what}: top-level value must be an object")
    return doc


def _exact_field(value: object, where: str) -> Fraction:
    if isinstance(value, float):
        raise ModelError(
            f"{where}: float literals are inexact; write the number as a string"
        )
    try:
        return frac(value)  # type: ignore[arg-type]
    except ModelError as exc:
        raise ModelError(f"{where}: {exc}") from exc


def parse_instance(text: str) -> Instance:
    """Parse the canonical instance document.

    Fields: ``kind``, ``weights`` (rational strings), ``costs`` (n rows
    of m rational strings), optional ``agent_names`` / ``item_names``.
    Rational strings may be "p/q" or exact decimals like "0.7".
    """
    doc = _load_json(text, "instance")
    try:
        kind = doc["kind"]
        raw_weights = doc["weights"]
        raw_costs = doc["costs"]
    except KeyError as exc:
        raise ModelError(f"instance: missing field {exc.args[0]!r}") from exc
    if kind not in KINDS:
        raise ModelError(f"instance: kind must be one of {KINDS}, got {kind!r}")
    if not isinstance(raw_weights, list) or not isinstance(raw_costs, list):
        raise ModelError("instance: weights and costs must be arrays")
    weights = tuple(
        _exact_field(w, f"weights[{i}]") for i, w in enumerate(raw_weights)
    )
    costs = []
    for i, row in enumerate(raw_costs):
        if not isinstance(row, list):
            raise ModelError(f"costs[{i}]: must be an array")
        costs.append(tuple(_exact_field(c, f"costs[{i}][{e}]") for e, c in enumerate(row)))
    if len(costs) != len(weights):
        raise ModelError(
            f"instance: {len(weights)} weights but {len(costs)} cost rows"
        )
    widths = {len(row) for row in costs}
    if len(widths) > 1:
        raise ModelError(f"instance: cost rows have mixed lengths {sorted(widths)}")
    agent_names = doc.get("agent_names")
    item_names = doc.get("item_names")
    inst = Instance(
        kind=kind,
        weights=weights,
        costs=tuple(costs),
        agent_names=tuple(agent_names) if agent_names is not None else None,
        item_names=tuple(item_names) if item_names is not None else None,
    )
    m = inst.m
    if item_names is not None and len(item_names) != m:
        raise ModelError("instance: item_names length does not match costs")
    if agent_names is not None and len(agent_names) != inst.n:
        raise ModelError("instance: agent_names length does not match weights")
    return inst


def serialize_instance(inst: Instance) -> str:
    """Emit the canonical document: lowest-terms strings, LF endings."""
    doc: dict[str, object] = {
        "kind": inst.kind,
        "weights": [str(w) for w in inst.weights],
        "costs": [[str(c) for c in row] for row in inst.costs],
    }
    if inst.agent_names is not None:
        doc["agent_names"] = list(inst.agent_names)
    if inst.item_names is not None:
        doc["item_names"] = list(inst.item_names)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_allocation(text: str) -> tuple[IntegralAllocation, SubsidyVector | None]:
    """Parse an allocation document: ``owner`` plus optional ``subsidies``."""
    doc = _load_json(text, "allocation")
    owner = doc.get("owner")
    if not isinstance(owner, list) or not all(isinstance(o, int) for o in owner):
        raise ModelError("allocation: owner must be an array of agent indices")
    subsidies = None
    if "subsidies" in doc:
        raw = doc["subsidies"]
        if not isinstance(raw, list):
            raise ModelError("allocation: subsidies must be an array")
        subsidies = SubsidyVector(
            tuple(_exact_field(s, f"subsidies[{i}]") for i, s in enumerate(raw))
        )
    return IntegralAllocation(tuple(owner)), subsidies


def serialize_allocation(
    alloc: IntegralAllocation,
    subsidies: SubsidyVector | None = None,
    extra: dict[str, object] | None = None,
    decimal_digits: int | None = None,
) -> str:
    doc: dict[str, object] = {"owner": list(alloc.owner)}
    if subsidies is not None:
        doc["subsidies"] = [str(s) for s in subsidies.amounts]
        doc["total_subsidy"] = str(subsidies.total)
        if decimal_digits is not None:
            doc["total_subsidy_decimal"] = format_decimal(subsidies.total, decimal_digits)
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def format_decimal(value: Fraction, digits: int) -> str:
    """Round a rational to a fixed-point decimal string (display only)."""
    if digits < 0:
        raise ModelError("decimal digits must be non-negative")
    sign = "-" if value < 0 else ""
    scaled = abs(value) * Fraction(10) ** digits
    whole = scaled.numerator // scaled.denominator
    if 2 * (scaled - whole) >= 1:
        whole += 1
    text = str(whole).rjust(digits + 1, "0")
    if digits == 0:
        return sign + text
    return f"{sign}{text[:-digits]}.{text[-digits:]}"
