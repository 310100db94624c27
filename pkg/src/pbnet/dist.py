"""Dense joint probability tables and exact arithmetic on them.

A JointTable stores one probability per joint assignment, mixed-radix
indexed with the first variable most significant (equivalently: the
flat C-order view of an array with one axis per variable).  This is the
ground truth representation: marginals, conditionals, TV distance and
conditional-independence answers computed here are exact up to float
rounding, which is what the rest of the package tests itself against.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import CapacityError, InputError
from .model import (
    BayesNet,
    Cpt,
    Dag,
    VarRef,
    Variable,
    mixed_radix_code,
    mixed_radix_codes,
)

DEFAULT_TABLE_CAP = 2 ** 24
CI_TOL = 1e-9
SUM_TOL = 1e-9


class JointTable:
    """Explicit distribution over the joint assignments of its variables."""

    __slots__ = ("variables", "probs", "_by_name")

    def __init__(self, variables: Sequence[Variable], probs) -> None:
        self.variables = tuple(variables)
        if not self.variables:
            raise InputError("a table needs at least one variable")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise InputError("duplicate variable names")
        arr = np.asarray(probs, dtype=float).reshape(-1)
        cells = math.prod(self.sizes)
        if arr.shape != (cells,):
            raise InputError(f"expected {cells} probabilities, got {arr.shape[0]}")
        if np.any(arr < -SUM_TOL):
            raise InputError("probabilities must be nonnegative")
        total = arr.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise InputError(f"probabilities sum to {total!r}, expected 1")
        arr = np.clip(arr, 0.0, None)
        arr = arr / arr.sum()
        arr.setflags(write=False)
        self.probs = arr
        self._by_name = {v.name: i for i, v in enumerate(self.variables)}

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(v.alphabet_size for v in self.variables)

    def index(self, ref: VarRef) -> int:
        if isinstance(ref, str):
            try:
                return self._by_name[ref]
            except KeyError:
                raise InputError(f"unknown variable {ref!r}") from None
        i = int(ref)
        if not 0 <= i < self.n:
            raise InputError(f"variable index {i} out of range")
        return i

    def reshaped(self) -> np.ndarray:
        """The table as an array with one axis per variable."""
        return self.probs.reshape(self.sizes)

    def prob(self, assignment: Sequence[int]) -> float:
        a = tuple(int(x) for x in assignment)
        if len(a) != self.n:
            raise InputError(f"assignment has {len(a)} values, expected {self.n}")
        for x, v in zip(a, self.variables):
            if not 0 <= x < v.alphabet_size:
                raise InputError(f"value {x} out of range for {v.name!r}")
        return float(self.probs[mixed_radix_code(a, self.sizes)])

    def to_dict(self) -> dict:
        return {
            "variables": [{"name": v.name, "alphabet": v.alphabet_size} for v in self.variables],
            "probs": self.probs.tolist(),
        }

    def __repr__(self) -> str:
        return f"JointTable({list(self.names)!r}, {len(self.probs)} cells)"


def table_from_dict(obj: dict) -> JointTable:
    try:
        raw_vars = obj["variables"]
        raw_probs = obj["probs"]
    except (KeyError, TypeError):
        raise InputError("a table needs 'variables' and 'probs'") from None
    variables = []
    for entry in raw_vars:
        try:
            variables.append(Variable(str(entry["name"]), int(entry["alphabet"])))
        except (KeyError, TypeError):
            raise InputError(f"bad variable entry {entry!r}") from None
    return JointTable(variables, raw_probs)


def load_table(path) -> JointTable:
    with open(path, "r", encoding="utf-8") as fh:
        return table_from_dict(json.load(fh))


def save_table(table: JointTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(table.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def from_bayes_net(net: BayesNet, cap: int = DEFAULT_TABLE_CAP) -> JointTable:
    """Materialize the factorized joint as an explicit table.

    The entry at assignment x is the product of the CPT factors of x.
    Raises CapacityError when the table would exceed cap cells.
    """
    sizes = net.dag.alphabet_sizes
    cells = math.prod(sizes)
    if cells > cap:
        raise CapacityError(f"joint table needs {cells} cells, cap is {cap}")
    n = net.dag.n
    acc = np.ones(sizes)
    for i, cpt in enumerate(net.cpts):
        labels = list(cpt.parent_order) + [i]
        arr = cpt.rows.reshape([sizes[p] for p in cpt.parent_order] + [sizes[i]])
        order = sorted(range(len(labels)), key=labels.__getitem__)
        arr = arr.transpose(order)
        shape = [1] * n
        for lab in labels:
            shape[lab] = sizes[lab]
        acc = acc * arr.reshape(shape)
    return JointTable(net.variables, acc.reshape(-1))


def _require_same_variables(p: JointTable, q: JointTable) -> None:
    if p.variables != q.variables:
        raise InputError("tables are over different variables")


def tv_distance(p: JointTable, q: JointTable) -> float:
    """Total variation distance: half the l1 distance between the tables."""
    _require_same_variables(p, q)
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def marginalize(p: JointTable, keep: Iterable[VarRef]) -> JointTable:
    """Sum out every variable not in keep; kept variables stay in table order."""
    keep_idx = sorted({p.index(r) for r in keep})
    if not keep_idx:
        raise InputError("keep must be nonempty")
    drop = tuple(i for i in range(p.n) if i not in set(keep_idx))
    arr = p.reshaped()
    if drop:
        arr = arr.sum(axis=drop)
    return JointTable([p.variables[i] for i in keep_idx], arr.reshape(-1))


def empirical_table(variables: Sequence[Variable], rows) -> JointTable:
    """Empirical distribution of an (N, n) integer sample array."""
    arr = np.asarray(rows, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != len(variables):
        raise InputError(f"rows must have shape (N, {len(variables)})")
    if len(arr) == 0:
        raise InputError("need at least one sample")
    sizes = [v.alphabet_size for v in variables]
    for j, k in enumerate(sizes):
        if arr[:, j].min() < 0 or arr[:, j].max() >= k:
            raise InputError(f"column {j} has values outside 0..{k - 1}")
    codes = mixed_radix_codes(arr, sizes)
    counts = np.bincount(codes, minlength=math.prod(sizes))
    return JointTable(variables, counts / len(arr))


class IndependenceOracle(Protocol):
    """Anything that answers conditional-independence queries for a fixed joint."""

    variables: tuple[Variable, ...]

    def query(self, u: VarRef, v: VarRef, given: Iterable[VarRef] = ()) -> bool: ...


class ExactOracle:
    """Answers CI queries by exact arithmetic on a dense joint table.

    query(u, v, z) is True iff for every z-assignment of positive mass
    the conditional joint of (u, v) factorizes into its conditional
    marginals within tol.  Zero-mass conditioning events are skipped
    (vacuously independent).  A call counter is kept so callers can
    audit how many queries an algorithm issues.
    """

    def __init__(self, table: JointTable, tol: float = CI_TOL) -> None:
        self.table = table
        self.tol = tol
        self.calls = 0

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self.table.variables

    def query(self, u: VarRef, v: VarRef, given: Iterable[VarRef] = ()) -> bool:
        self.calls += 1
        t = self.table
        ui = t.index(u)
        vi = t.index(v)
        z = sorted({t.index(w) for w in given})
        if ui == vi:
            raise InputError("u and v must be distinct")
        if ui in z or vi in z:
            raise InputError("u and v must not be in the conditioning set")

        kept = sorted(set(z) | {ui, vi})
        drop = tuple(i for i in range(t.n) if i not in set(kept))
        arr = t.reshaped()
        if drop:
            arr = arr.sum(axis=drop)
        # Axes currently follow ascending variable order; bring them to (z..., u, v).
        perm = [kept.index(w) for w in z] + [kept.index(ui), kept.index(vi)]
        arr = arr.transpose(perm)
        ku = t.variables[ui].alphabet_size
        kv = t.variables[vi].alphabet_size
        strata = arr.reshape(-1, ku, kv)
        mass = strata.sum(axis=(1, 2))
        positive = mass > 0.0
        if not positive.any():
            return True
        cond = strata[positive] / mass[positive, None, None]
        pu = cond.sum(axis=2)
        pv = cond.sum(axis=1)
        resid = np.abs(cond - pu[:, :, None] * pv[:, None, :]).max()
        return bool(resid <= self.tol)


def is_independent(oracle, u: VarRef, v: VarRef, given: Iterable[VarRef] = ()) -> bool:
    """Ask any independence oracle whether u and v are independent given the set."""
    return bool(oracle.query(u, v, given))


def fit_bayes_net(table: JointTable, dag: Dag) -> BayesNet:
    """Exact CPTs for dag read off the table's conditionals.

    Parent assignments with zero mass get a uniform row; any completion
    there reproduces the same joint.
    """
    if dag.variables != table.variables:
        raise InputError("dag and table are over different variables")
    sizes = table.sizes
    arr = table.reshaped()
    cpts = []
    for i in range(dag.n):
        pa = dag.parents(i)
        kept = sorted(set(pa) | {i})
        drop = tuple(j for j in range(dag.n) if j not in set(kept))
        sub = arr.sum(axis=drop) if drop else arr
        perm = [kept.index(p) for p in pa] + [kept.index(i)]
        sub = sub.transpose(perm).reshape(-1, sizes[i])
        mass = sub.sum(axis=1, keepdims=True)
        uniform = np.full(sizes[i], 1.0 / sizes[i])
        rows = np.where(mass > 0.0, np.divide(sub, np.where(mass > 0.0, mass, 1.0)), uniform)
        cpts.append(Cpt(i, pa, rows))
    return BayesNet(dag, cpts)
