"""Discrete Bayes nets: DAG structure, CPTs, evaluation, and sampling.

A net is a labeled DAG over named finite-alphabet variables plus one
conditional probability table (CPT) per variable.  CPT rows are indexed
mixed-radix over the parent assignment (parents in ascending variable
order, first parent most significant), and the joint probability of a
full assignment is the product of one CPT entry per variable.

Everything here is immutable after construction and pure given explicit
seeds, so values can be shared freely across threads.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError

ROW_SUM_TOL = 1e-9

VarRef = int | str


@dataclass(frozen=True)
class Variable:
    """A named variable taking values 0 .. alphabet_size - 1."""

    name: str
    alphabet_size: int

    def __post_init__(self) -> None:
        if not self.name:
            raise InputError("variable name must be nonempty")
        if int(self.alphabet_size) < 2:
            raise InputError(f"alphabet size of {self.name!r} must be >= 2")


def mixed_radix_code(digits: Iterable[int], radices: Sequence[int]) -> int:
    """Integer code of a digit vector, first digit most significant."""
    code = 0
    for d, r in zip(digits, radices, strict=True):
        code = code * r + d
    return code


def mixed_radix_decode(code: int, radices: Sequence[int]) -> tuple[int, ...]:
    """Inverse of mixed_radix_code for a nonnegative in-range code."""
    out = []
    for r in reversed(radices):
        out.append(code % r)
        code //= r
    return tuple(reversed(out))


def mixed_radix_codes(columns: np.ndarray, radices: Sequence[int]) -> np.ndarray:
    """Vectorized mixed_radix_code over the rows of a 2-D integer array."""
    codes = np.zeros(len(columns), dtype=np.int64)
    for j, r in enumerate(radices):
        codes = codes * r + columns[:, j]
    return codes


class Dag:
    """Labeled directed acyclic graph over a fixed tuple of variables.

    Edges are (parent index, child index) pairs.  Construction rejects
    self-loops and directed cycles; duplicate edges collapse.
    """

    __slots__ = ("variables", "edges", "_parents", "_children", "_order", "_by_name")

    def __init__(self, variables: Sequence[Variable], edges: Iterable[tuple[int, int]] = ()):
        self.variables = tuple(variables)
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise InputError("duplicate variable names")
        n = len(self.variables)
        if n == 0:
            raise InputError("a DAG needs at least one variable")
        edge_set = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if not (0 <= a < n and 0 <= b < n):
                raise InputError(f"edge ({a}, {b}) out of range")
            if a == b:
                raise InputError(f"self-loop on variable {names[a]!r}")
            edge_set.add((a, b))
        self.edges = frozenset(edge_set)
        parents: list[list[int]] = [[] for _ in range(n)]
        children: list[list[int]] = [[] for _ in range(n)]
        for a, b in self.edges:
            parents[b].append(a)
            children[a].append(b)
        self._parents = tuple(tuple(sorted(p)) for p in parents)
        self._children = tuple(tuple(sorted(c)) for c in children)
        self._order = self._toposort()
        self._by_name = {v.name: i for i, v in enumerate(self.variables)}

    def _toposort(self) -> tuple[int, ...]:
        # Kahn's algorithm with a min-heap: deterministic, lowest index first.
        indeg = [len(p) for p in self._parents]
        heap = [i for i in range(self.n) if indeg[i] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            i = heapq.heappop(heap)
            order.append(i)
            for c in self._children[i]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        if len(order) != self.n:
            raise InputError("edges contain a directed cycle")
        return tuple(order)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def alphabet_sizes(self) -> tuple[int, ...]:
        return tuple(v.alphabet_size for v in self.variables)

    def index(self, ref: VarRef) -> int:
        """Resolve a variable given by index or by name."""
        if isinstance(ref, str):
            try:
                return self._by_name[ref]
            except KeyError:
                raise InputError(f"unknown variable {ref!r}") from None
        i = int(ref)
        if not 0 <= i < self.n:
            raise InputError(f"variable index {i} out of range")
        return i

    def parents(self, ref: VarRef) -> tuple[int, ...]:
        return self._parents[self.index(ref)]

    def children(self, ref: VarRef) -> tuple[int, ...]:
        return self._children[self.index(ref)]

    def topological_order(self) -> tuple[int, ...]:
        return self._order

    def has_edge(self, a: VarRef, b: VarRef) -> bool:
        return (self.index(a), self.index(b)) in self.edges

    def descendants(self, ref: VarRef) -> frozenset[int]:
        """Proper descendants (the node itself is excluded)."""
        i = self.index(ref)
        seen: set[int] = set()
        stack = [i]
        while stack:
            for c in self._children[stack.pop()]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return frozenset(seen)

    def in_degree_sequence(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self._parents)

    def without_edge(self, a: VarRef, b: VarRef) -> "Dag":
        edge = (self.index(a), self.index(b))
        if edge not in self.edges:
            raise InputError("edge not present")
        return Dag(self.variables, self.edges - {edge})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self.variables == other.variables and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.variables, self.edges))

    def __repr__(self) -> str:
        edges = sorted(self.edges)
        return f"Dag({list(self.names)!r}, edges={edges!r})"


def complete_dag(variables: Sequence[Variable]) -> Dag:
    """The complete DAG oriented along the variable index order."""
    n = len(variables)
    return Dag(variables, [(i, j) for i in range(n) for j in range(i + 1, n)])


def parameter_count(net_or_dag: "Dag | BayesNet") -> int:
    """Number of free probabilities in the CPTs of a structure.

    Each variable contributes (alphabet - 1) times the product of its
    parents' alphabet sizes.  Depends only on the DAG and alphabets.
    """
    dag = net_or_dag.dag if isinstance(net_or_dag, BayesNet) else net_or_dag
    total = 0
    for i, v in enumerate(dag.variables):
        block = v.alphabet_size - 1
        for u in dag.parents(i):
            block *= dag.variables[u].alphabet_size
        total += block
    return total


def d_separated(dag: Dag, u: VarRef, v: VarRef, given: Iterable[VarRef] = ()) -> bool:
    """Whether u and v are d-separated by the conditioning set.

    Uses the standard two-direction reachability walk (Bayes ball): a
    path is active when its colliders have a descendant in the set (or
    are in it) and its non-colliders are outside it.  Returns True iff
    no active path connects u and v.
    """
    ui = dag.index(u)
    vi = dag.index(v)
    z = frozenset(dag.index(w) for w in given)
    if ui == vi:
        raise InputError("u and v must be distinct")
    if ui in z or vi in z:
        raise InputError("u and v must not be in the conditioning set")

    # Nodes that are in z or have a descendant in z: these open colliders.
    openers = set(z)
    stack = list(z)
    while stack:
        for p in dag.parents(stack.pop()):
            if p not in openers:
                openers.add(p)
                stack.append(p)

    # Walk states are (node, arrived_from_child).  Starting at u counts as
    # arriving from a child so both directions are available.
    seen: set[tuple[int, bool]] = set()
    frontier: list[tuple[int, bool]] = [(ui, True)]
    while frontier:
        node, from_child = frontier.pop()
        if (node, from_child) in seen:
            continue
        seen.add((node, from_child))
        if node == vi:
            return False
        if from_child and node not in z:
            for p in dag.parents(node):
                frontier.append((p, True))
            for c in dag.children(node):
                frontier.append((c, False))
        elif not from_child:
            if node not in z:
                for c in dag.children(node):
                    frontier.append((c, False))
            if node in openers:
                for p in dag.parents(node):
                    frontier.append((p, True))
    return True


class Cpt:
    """Conditional distribution of one variable given its parents.

    rows[r] is the child distribution for the parent assignment whose
    mixed-radix code is r (parents ascending, first parent most
    significant).  Rows are renormalized on construction when their sum
    is within ROW_SUM_TOL of 1 and rejected otherwise.
    """

    __slots__ = ("child", "parent_order", "rows")

    def __init__(self, child: int, parent_order: Sequence[int], rows) -> None:
        arr = np.array(rows, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError("CPT rows must form a nonempty 2-D array")
        if np.any(arr < -ROW_SUM_TOL) or np.any(arr > 1.0 + ROW_SUM_TOL):
            raise InputError("CPT entries must lie in [0, 1]")
        sums = arr.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise InputError(f"CPT row {bad} sums to {sums[bad]!r}, expected 1")
        arr = np.clip(arr, 0.0, 1.0)
        arr = arr / arr.sum(axis=1, keepdims=True)
        arr.setflags(write=False)
        self.child = int(child)
        self.parent_order = tuple(int(p) for p in parent_order)
        self.rows = arr

    def __repr__(self) -> str:
        return f"Cpt(child={self.child}, parents={self.parent_order}, shape={self.rows.shape})"


class BayesNet:
    """A DAG plus one CPT per variable, in variable order."""

    __slots__ = ("dag", "cpts", "_parent_sizes")

    def __init__(self, dag: Dag, cpts: Sequence[Cpt]) -> None:
        if len(cpts) != dag.n:
            raise InputError(f"expected {dag.n} CPTs, got {len(cpts)}")
        sizes = dag.alphabet_sizes
        parent_sizes = []
        for i, cpt in enumerate(cpts):
            if cpt.child != i:
                raise InputError(f"CPT at position {i} declares child {cpt.child}")
            if cpt.parent_order != dag.parents(i):
                raise InputError(
                    f"CPT for {dag.names[i]!r} must list its parents in ascending variable order"
                )
            psizes = tuple(sizes[p] for p in cpt.parent_order)
            want = (math.prod(psizes), sizes[i])
            if cpt.rows.shape != want:
                raise InputError(
                    f"CPT for {dag.names[i]!r} has shape {cpt.rows.shape}, expected {want}"
                )
            parent_sizes.append(psizes)
        self.dag = dag
        self.cpts = tuple(cpts)
        self._parent_sizes = tuple(parent_sizes)

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self.dag.variables

    def row_of(self, i: int, assignment: Sequence[int]) -> int:
        """CPT row index of variable i under a full assignment."""
        cpt = self.cpts[i]
        return mixed_radix_code((assignment[p] for p in cpt.parent_order), self._parent_sizes[i])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BayesNet):
            return NotImplemented
        return self.dag == other.dag and all(
            np.array_equal(a.rows, b.rows) for a, b in zip(self.cpts, other.cpts)
        )

    def __hash__(self) -> int:
        return hash((self.dag, tuple(c.rows.tobytes() for c in self.cpts)))

    def __repr__(self) -> str:
        return f"BayesNet({self.dag!r})"


def _check_assignment(dag: Dag, assignment: Sequence[int]) -> tuple[int, ...]:
    a = tuple(int(x) for x in assignment)
    if len(a) != dag.n:
        raise InputError(f"assignment has {len(a)} values, expected {dag.n}")
    for x, v in zip(a, dag.variables):
        if not 0 <= x < v.alphabet_size:
            raise InputError(f"value {x} out of range for {v.name!r}")
    return a


def log_prob(net: BayesNet, assignment: Sequence[int]) -> float:
    """Log joint probability of a full assignment; -inf when any factor is 0."""
    a = _check_assignment(net.dag, assignment)
    total = 0.0
    for i, cpt in enumerate(net.cpts):
        p = cpt.rows[net.row_of(i, a), a[i]]
        if p <= 0.0:
            return float("-inf")
        total += math.log(p)
    return total


def log_prob_rows(net: BayesNet, rows) -> np.ndarray:
    """Vectorized log_prob over an (N, n) array of assignments."""
    arr = np.asarray(rows, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != net.dag.n:
        raise InputError(f"rows must have shape (N, {net.dag.n})")
    sizes = net.dag.alphabet_sizes
    for j, k in enumerate(sizes):
        if len(arr) and (arr[:, j].min() < 0 or arr[:, j].max() >= k):
            raise InputError(f"column {j} has values outside 0..{k - 1}")
    out = np.zeros(len(arr))
    dead = np.zeros(len(arr), dtype=bool)
    for i, cpt in enumerate(net.cpts):
        ridx = mixed_radix_codes(arr[:, list(cpt.parent_order)], net._parent_sizes[i])
        p = cpt.rows[ridx, arr[:, i]]
        zero = p <= 0.0
        dead |= zero
        out += np.log(np.where(zero, 1.0, p))
    out[dead] = -np.inf
    return out


def sample(net: BayesNet, count: int, seed: int = 0) -> np.ndarray:
    """Ancestral samples as an (count, n) integer array, deterministic in seed."""
    if count < 0:
        raise InputError("count must be >= 0")
    rng = np.random.default_rng(seed)
    sizes = net.dag.alphabet_sizes
    out = np.zeros((count, net.dag.n), dtype=np.int64)
    for i in net.dag.topological_order():
        cpt = net.cpts[i]
        ridx = mixed_radix_codes(out[:, list(cpt.parent_order)], net._parent_sizes[i])
        cdf = np.cumsum(cpt.rows, axis=1)
        u = rng.random(count)
        out[:, i] = np.clip((u[:, None] > cdf[ridx]).sum(axis=1), 0, sizes[i] - 1)
    return out


def random_bayes_net(dag: Dag, seed: int = 0, low: float = 0.2, high: float = 0.8) -> BayesNet:
    """Net on dag with well-conditioned random CPT rows (entries bounded away from 0)."""
    rng = np.random.default_rng(seed)
    sizes = dag.alphabet_sizes
    cpts = []
    for i in range(dag.n):
        nrows = math.prod(sizes[p] for p in dag.parents(i))
        raw = rng.uniform(low, high, size=(nrows, sizes[i]))
        cpts.append(Cpt(i, dag.parents(i), raw / raw.sum(axis=1, keepdims=True)))
    return BayesNet(dag, cpts)


# ---------------------------------------------------------------------------
# JSON interchange
#
# {"variables": [{"name": "X1", "alphabet": 2}, ...],
#  "edges": [["X1", "X2"], ...],
#  "cpts": {"X2": {"parents": ["X1"], "rows": [[0.9, 0.1], [0.2, 0.8]]}, ...}}
#
# Row order is mixed-radix over the listed parents, first listed parent most
# significant.  On output parents are always in canonical ascending order; on
# input any parent permutation is accepted and re-indexed canonically.
# ---------------------------------------------------------------------------


def _variables_from_dict(obj: dict) -> tuple[Variable, ...]:
    try:
        raw = obj["variables"]
    except (KeyError, TypeError):
        raise InputError("missing 'variables'") from None
    out = []
    for entry in raw:
        try:
            out.append(Variable(str(entry["name"]), int(entry["alphabet"])))
        except (KeyError, TypeError):
            raise InputError(f"bad variable entry {entry!r}") from None
    return tuple(out)


def dag_from_dict(obj: dict) -> Dag:
    """Structure part of the interchange format; any 'cpts' key is ignored."""
    variables = _variables_from_dict(obj)
    by_name = {v.name: i for i, v in enumerate(variables)}
    edges = []
    for pair in obj.get("edges", ()):
        try:
            a, b = pair
        except (TypeError, ValueError):
            raise InputError(f"bad edge entry {pair!r}") from None
        for name in (a, b):
            if name not in by_name:
                raise InputError(f"edge references unknown variable {name!r}")
        edges.append((by_name[a], by_name[b]))
    return Dag(variables, edges)


def dag_to_dict(dag: Dag) -> dict:
    names = dag.names
    return {
        "variables": [{"name": v.name, "alphabet": v.alphabet_size} for v in dag.variables],
        "edges": [[names[a], names[b]] for a, b in sorted(dag.edges)],
    }


def net_from_dict(obj: dict) -> BayesNet:
    dag = dag_from_dict(obj)
    cpts_obj = obj.get("cpts")
    if not isinstance(cpts_obj, dict):
        raise InputError("missing 'cpts'")
    sizes = dag.alphabet_sizes
    cpts = []
    for i, name in enumerate(dag.names):
        if name not in cpts_obj:
            raise InputError(f"missing CPT for variable {name!r}")
        entry = cpts_obj[name]
        listed = tuple(dag.index(p) for p in entry.get("parents", ()))
        canonical = dag.parents(i)
        if tuple(sorted(listed)) != canonical or len(set(listed)) != len(listed):
            raise InputError(f"CPT parents for {name!r} do not match the edges")
        rows = np.array(entry.get("rows", ()), dtype=float)
        if rows.ndim != 2:
            raise InputError(f"CPT rows for {name!r} must be a 2-D array")
        nrows = math.prod(sizes[p] for p in canonical)
        if rows.shape[0] != nrows:
            raise InputError(f"CPT for {name!r} has {rows.shape[0]} rows, expected {nrows}")
        if listed != canonical:
            # Re-index rows from the listed parent order to canonical order.
            listed_radices = [sizes[p] for p in listed]
            canon_radices = [sizes[p] for p in canonical]
            remapped = np.empty_like(rows)
            for rc in range(nrows):
                values = dict(zip(canonical, mixed_radix_decode(rc, canon_radices)))
                rl = mixed_radix_code((values[p] for p in listed), listed_radices)
                remapped[rc] = rows[rl]
            rows = remapped
        cpts.append(Cpt(i, canonical, rows))
    return BayesNet(dag, cpts)


def net_to_dict(net: BayesNet) -> dict:
    out = dag_to_dict(net.dag)
    names = net.dag.names
    out["cpts"] = {
        names[i]: {
            "parents": [names[p] for p in cpt.parent_order],
            "rows": cpt.rows.tolist(),
        }
        for i, cpt in enumerate(net.cpts)
    }
    return out


def load_net(path) -> BayesNet:
    with open(path, "r", encoding="utf-8") as fh:
        return net_from_dict(json.load(fh))


def load_dag(path) -> Dag:
    with open(path, "r", encoding="utf-8") as fh:
        return dag_from_dict(json.load(fh))


def save_net(net: BayesNet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(net_to_dict(net), fh, indent=2, sort_keys=True)
        fh.write("\n")
