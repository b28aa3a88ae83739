"""Grid description: node kinds, branches, the text file format and validation.

Grid file format (UTF-8, ``#`` starts a comment)::

    slack <node> <v_set>
    <from> <to> <r> <TYPE> [<value> ...]

``TYPE`` declares the kind of the ``to`` node:

    STEP            passive junction (zero load conductance)
    P <p>           constant power, signed, positive = injection into the grid
    R <R>           constant resistance load, value is a resistance in pu
    DROOP <p> <g>   constant power plus shunt conductance g
    -               no declaration; both endpoints are declared elsewhere

A branch line may also omit ``TYPE`` entirely, which is the same as ``-``.
Untyped branches are how meshes and parallel lines are written.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Union

from .errors import (
    DisconnectedGraph,
    DuplicateNodeError,
    GridError,
    MissingPowerTerminal,
    MissingVoltageTerminal,
    NonPositiveResistance,
    ParseError,
    SelfLoopError,
    UndeclaredNodeError,
)


@dataclass(frozen=True)
class Voltage:
    v_set: float

    def __post_init__(self):
        if not self.v_set > 0:
            raise GridError(f"voltage set point must be positive, got {self.v_set}")


@dataclass(frozen=True)
class Power:
    p: float


@dataclass(frozen=True)
class Resistance:
    """Linear load stored as a conductance; ``g == 0`` is a step node."""

    g: float

    def __post_init__(self):
        if not self.g >= 0:
            raise GridError(f"load conductance must be >= 0, got {self.g}")

    @property
    def is_step(self) -> bool:
        return self.g == 0


@dataclass(frozen=True)
class Droop:
    p: float
    g: float

    def __post_init__(self):
        if not self.g > 0:
            raise GridError(f"droop conductance must be positive, got {self.g}")


NodeKind = Union[Voltage, Power, Resistance, Droop]


@dataclass(frozen=True)
class Branch:
    from_node: int
    to_node: int
    r: float

    @property
    def g(self) -> float:
        return 1.0 / self.r


@dataclass(frozen=True)
class GridSpec:
    nodes: tuple[tuple[int, NodeKind], ...]
    branches: tuple[Branch, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple((int(n), k) for n, k in self.nodes))
        object.__setattr__(self, "branches", tuple(self.branches))
        seen = set()
        for node, _ in self.nodes:
            if node in seen:
                raise DuplicateNodeError(f"node {node} defined twice")
            seen.add(node)
        for b in self.branches:
            for end in (b.from_node, b.to_node):
                if end not in seen:
                    raise UndeclaredNodeError(
                        f"branch {b.from_node}-{b.to_node} references undeclared node {end}"
                    )

    @cached_property
    def kinds(self) -> dict[int, NodeKind]:
        return dict(self.nodes)

    def kind(self, node: int) -> NodeKind:
        return self.kinds[node]

    @property
    def node_ids(self) -> list[int]:
        return sorted(self.kinds)

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class PartitionedGrid:
    """A validated grid with its voltage / resistance / power partition.

    Droop nodes are members of ``p_nodes``.
    """

    grid: GridSpec
    v_nodes: tuple[int, ...]
    r_nodes: tuple[int, ...]
    p_nodes: tuple[int, ...]

    @cached_property
    def position(self) -> dict[int, int]:
        """NodeId -> position inside its own partition list."""
        pos = {}
        for group in (self.v_nodes, self.r_nodes, self.p_nodes):
            pos.update((n, i) for i, n in enumerate(group))
        return pos

    @property
    def order(self) -> tuple[int, ...]:
        """Node ids in block order V, R, P."""
        return self.v_nodes + self.r_nodes + self.p_nodes


_TYPE_ARITY = {"STEP": 0, "P": 1, "R": 1, "DROOP": 2, "-": 0}


def _number(token: str, lineno: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected a number for {what}, got {token!r}", lineno) from None


def _node_id(token: str, lineno: int) -> int:
    try:
        node = int(token)
    except ValueError:
        raise ParseError(f"expected an integer node id, got {token!r}", lineno) from None
    if node < 1:
        raise ParseError(f"node ids must be positive, got {node}", lineno)
    return node


def parse_grid(text: str, name: str = "") -> GridSpec:
    """Parse the branch-list grid format into a :class:`GridSpec`."""
    kinds: dict[int, NodeKind] = {}
    defined_at: dict[int, int] = {}
    first_ref: dict[int, int] = {}
    branches: list[Branch] = []

    def declare(node, kind, lineno):
        if node in kinds:
            raise DuplicateNodeError(
                f"node {node} already defined on line {defined_at[node]}", lineno
            )
        kinds[node] = kind
        defined_at[node] = lineno

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0].lower() == "slack":
            if len(tokens) != 3:
                raise ParseError("slack line must be 'slack <node> <v_set>'", lineno)
            node = _node_id(tokens[1], lineno)
            v_set = _number(tokens[2], lineno, "v_set")
            try:
                declare(node, Voltage(v_set), lineno)
            except GridError as exc:
                if isinstance(exc, ParseError):
                    raise
                raise ParseError(str(exc), lineno) from None
            continue

        if len(tokens) < 3:
            raise ParseError("branch line must be '<from> <to> <r> [TYPE values]'", lineno)
        f, t = _node_id(tokens[0], lineno), _node_id(tokens[1], lineno)
        r = _number(tokens[2], lineno, "r")
        if f == t:
            raise SelfLoopError(f"branch {f}-{t} connects a node to itself", lineno)
        kind_token = tokens[3].upper() if len(tokens) > 3 else "-"
        if kind_token not in _TYPE_ARITY:
            raise ParseError(f"unknown node type {tokens[3]!r}", lineno)
        values = tokens[4:]
        if len(values) != _TYPE_ARITY[kind_token]:
            raise ParseError(
                f"type {kind_token} takes {_TYPE_ARITY[kind_token]} value(s), got {len(values)}",
                lineno,
            )
        nums = [_number(v, lineno, kind_token) for v in values]
        try:
            if kind_token == "STEP":
                declare(t, Resistance(0.0), lineno)
            elif kind_token == "P":
                declare(t, Power(nums[0]), lineno)
            elif kind_token == "R":
                if not nums[0] > 0:
                    raise ParseError(f"load resistance must be positive, got {nums[0]}", lineno)
                declare(t, Resistance(1.0 / nums[0]), lineno)
            elif kind_token == "DROOP":
                declare(t, Droop(nums[0], nums[1]), lineno)
        except ParseError:
            raise
        except GridError as exc:
            raise ParseError(str(exc), lineno) from None
        for end in (f, t):
            first_ref.setdefault(end, lineno)
        branches.append(Branch(f, t, r))

    for node, lineno in sorted(first_ref.items(), key=lambda kv: kv[1]):
        if node not in kinds:
            raise UndeclaredNodeError(
                f"node {node} is never declared (neither slack nor a typed branch end)", lineno
            )
    return GridSpec(tuple(kinds.items()), tuple(branches), name=name)


def load_grid(path) -> GridSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_grid(fh.read(), name=str(path))


def _fmt(x: float) -> str:
    return repr(float(x))


def _type_field(kind: NodeKind) -> str:
    if isinstance(kind, Power):
        return f"P {_fmt(kind.p)}"
    if isinstance(kind, Droop):
        return f"DROOP {_fmt(kind.p)} {_fmt(kind.g)}"
    if isinstance(kind, Resistance):
        return "STEP" if kind.is_step else f"R {_fmt(1.0 / kind.g)}"
    raise TypeError(kind)


def render_grid(spec: GridSpec) -> str:
    """Write ``spec`` back to the text format.

    Each non-slack node is typed on the first branch reaching it in a
    breadth-first walk from the slack nodes; all other branches are written
    untyped. Nodes unreachable from a slack cannot be rendered.
    """
    lines = [f"slack {n} {_fmt(k.v_set)}" for n, k in spec.nodes if isinstance(k, Voltage)]
    adjacency: dict[int, list[int]] = {n: [] for n in spec.kinds}
    for i, b in enumerate(spec.branches):
        adjacency[b.from_node].append(i)
        adjacency[b.to_node].append(i)

    typed = {n for n, k in spec.nodes if isinstance(k, Voltage)}
    used: set[int] = set()
    queue = deque(sorted(typed))
    while queue:
        node = queue.popleft()
        for i in adjacency[node]:
            if i in used:
                continue
            b = spec.branches[i]
            other = b.to_node if b.from_node == node else b.from_node
            if other in typed:
                continue
            used.add(i)
            typed.add(other)
            queue.append(other)
            lines.append(f"{node} {other} {_fmt(b.r)} {_type_field(spec.kind(other))}")
    missing = set(spec.kinds) - typed
    if missing:
        raise DisconnectedGraph(f"nodes {sorted(missing)} are not reachable from a slack node")
    for i, b in enumerate(spec.branches):
        if i not in used:
            lines.append(f"{b.from_node} {b.to_node} {_fmt(b.r)} -")
    return "\n".join(lines) + "\n"


def _connected(node_ids: Iterable[int], branches: Iterable[Branch]) -> bool:
    node_ids = list(node_ids)
    adjacency: dict[int, set[int]] = {n: set() for n in node_ids}
    for b in branches:
        adjacency[b.from_node].add(b.to_node)
        adjacency[b.to_node].add(b.from_node)
    start = node_ids[0]
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adjacency[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(node_ids)


def validate(spec: GridSpec) -> PartitionedGrid:
    """Check the structural assumptions and partition the nodes.

    Raises
    ------
    NonPositiveResistance
        A branch has ``r <= 0``.
    SelfLoopError
        A branch connects a node to itself.
    MissingVoltageTerminal, MissingPowerTerminal
        No constant-voltage or no constant-power/droop node.
    DisconnectedGraph
        The branch graph has more than one component.
    """
    for b in spec.branches:
        if not b.r > 0:
            raise NonPositiveResistance(f"branch {b.from_node}-{b.to_node} has r = {b.r}")
        if b.from_node == b.to_node:
            raise SelfLoopError(f"branch {b.from_node}-{b.to_node} connects a node to itself")

    v_nodes, r_nodes, p_nodes = [], [], []
    for node in spec.node_ids:
        kind = spec.kind(node)
        if isinstance(kind, Voltage):
            v_nodes.append(node)
        elif isinstance(kind, Resistance):
            r_nodes.append(node)
        else:
            p_nodes.append(node)
    if not v_nodes:
        raise MissingVoltageTerminal("grid has no constant-voltage terminal")
    if not p_nodes:
        raise MissingPowerTerminal("grid has no constant-power terminal")
    if not _connected(spec.node_ids, spec.branches):
        raise DisconnectedGraph("grid graph is not connected")
    return PartitionedGrid(spec, tuple(v_nodes), tuple(r_nodes), tuple(p_nodes))


def scale_loads(spec: GridSpec, m: float, loads_only: bool = False) -> GridSpec:
    """Multiply every constant-power injection by ``m``.

    With ``loads_only`` only consuming terminals (``p < 0``) are scaled.
    """
    if not m > 0:
        raise ValueError(f"load multiplier must be positive, got {m}")

    def scaled(kind):
        if isinstance(kind, (Power, Droop)) and (not loads_only or kind.p < 0):
            return replace(kind, p=kind.p * m)
        return kind

    return replace(spec, nodes=tuple((n, scaled(k)) for n, k in spec.nodes))
