"""Budgeted enumeration of labeled DAGs.

With a uniform alphabet of size k, a DAG with in-degrees (d_1, ..., d_n)
has (k - 1) * sum_i k^{d_i} parameters.  A parameter budget p therefore
admits exactly the in-degree sequences with sum_i k^{d_i} <= p // (k-1).
Sequences stream in lexicographic order; each is realized into the
concrete labeled DAGs with that exact in-degree profile, pruning cyclic
parent-set choices incrementally with per-node reachability bitmasks.

Two counting companions bound the enumeration from above: the per
sequence product of binomials prod_i C(n-1, d_i), and a closed-form
bound on the total number of DAGs that fit the budget.
"""

from __future__ import annotations

import math
from typing import Iterator, Sequence

import mpmath

from .errors import InfeasibleBudgetError, InputError
from .model import Dag, Variable

InDegreeSequence = tuple[int, ...]


def default_variables(n: int, alphabet: int = 2) -> tuple[Variable, ...]:
    """Variables X1 .. Xn with a uniform alphabet."""
    return tuple(Variable(f"X{i + 1}", alphabet) for i in range(n))


def _check_budget_args(n: int, alphabet: int, p: int) -> None:
    if n < 1:
        raise InputError("n must be >= 1")
    if alphabet < 2:
        raise InputError("alphabet must be >= 2")
    minimum = n * (alphabet - 1)
    if p < minimum:
        raise InfeasibleBudgetError(
            f"budget {p} is below the edgeless minimum {minimum} for n={n}, alphabet={alphabet}"
        )


def feasible_sequences(n: int, alphabet: int, p: int) -> Iterator[InDegreeSequence]:
    """In-degree sequences whose parameter count fits the budget, lex order.

    Yields exactly the (d_1, ..., d_n) with every d_i <= n - 1 and
    (alphabet - 1) * sum_i alphabet^{d_i} <= p, each once.
    """
    _check_budget_args(n, alphabet, p)
    budget = p // (alphabet - 1)
    prefix = [0] * n

    def rec(i: int, used: int) -> Iterator[InDegreeSequence]:
        if i == n:
            yield tuple(prefix)
            return
        slack = n - i - 1  # every later vertex costs at least alphabet^0 = 1
        for d in range(n):
            cost = alphabet ** d
            if used + cost + slack > budget:
                break
            prefix[i] = d
            yield from rec(i + 1, used + cost)

    yield from rec(0, 0)


def _colex_subsets(pool: Sequence[int], size: int) -> Iterator[tuple[int, ...]]:
    """size-subsets of pool in colexicographic order (pool assumed ascending)."""
    if size == 0:
        yield ()
        return
    for t in range(size - 1, len(pool)):
        for rest in _colex_subsets(pool[:t], size - 1):
            yield rest + (pool[t],)


def realize_dags(
    seq: Sequence[int],
    *,
    variables: Sequence[Variable] | None = None,
    alphabet: int = 2,
) -> Iterator[Dag]:
    """Every labeled DAG whose in-degree sequence equals seq, each once.

    Vertices choose their parent sets in index order, candidate sets in
    colex order; choices that would close a directed cycle are pruned
    via reachability bitmasks maintained along the prefix.
    """
    degrees = tuple(int(d) for d in seq)
    n = len(degrees)
    if n == 0:
        raise InputError("empty in-degree sequence")
    for d in degrees:
        if d < 0 or d > n - 1:
            raise InputError(f"in-degree {d} out of range for n={n}")
    if variables is None:
        variables = default_variables(n, alphabet)
    else:
        variables = tuple(variables)
        if len(variables) != n:
            raise InputError(f"need {n} variables, got {len(variables)}")

    edges: list[tuple[int, int]] = []
    # reach[a] bit s set <=> s is reachable from a (including a itself).
    initial = [1 << i for i in range(n)]

    def rec(i: int, reach: list[int]) -> Iterator[Dag]:
        if i == n:
            yield Dag(variables, tuple(edges))
            return
        pool = [x for x in range(n) if x != i]
        ri = reach[i]
        for parents in _colex_subsets(pool, degrees[i]):
            if any((ri >> s) & 1 for s in parents):
                continue  # i already reaches s, so s -> i closes a cycle
            updated = list(reach)
            for s in parents:
                sbit = 1 << s
                for a in range(n):
                    if updated[a] & sbit:
                        updated[a] |= ri
            mark = len(edges)
            edges.extend((s, i) for s in parents)
            yield from rec(i + 1, updated)
            del edges[mark:]

    yield from rec(0, initial)


def dags_within_budget(
    n: int,
    alphabet: int,
    p: int,
    variables: Sequence[Variable] | None = None,
) -> Iterator[Dag]:
    """All labeled DAGs whose parameter count fits the budget, each once."""
    for seq in feasible_sequences(n, alphabet, p):
        yield from realize_dags(seq, variables=variables, alphabet=alphabet)


def dag_count_upper_bound(seq: Sequence[int]) -> int:
    """prod_i C(n-1, d_i): an upper bound on the DAGs realizing seq.

    Only a bound; some parent-set combinations close cycles and are not
    DAGs, so the true count can be smaller.
    """
    degrees = tuple(int(d) for d in seq)
    n = len(degrees)
    if n == 0:
        raise InputError("empty in-degree sequence")
    out = 1
    for d in degrees:
        if d < 0:
            raise InputError("in-degrees must be nonnegative")
        out *= math.comb(n - 1, d)
    return out


def total_dag_bound(n: int, alphabet: int, p: int) -> int:
    """Closed-form bound on the number of DAGs that fit the budget.

    With L = log(p / (n (k-1))) / log k, the bound is
    (n-1)^(n L) * e^n * (L + 1)^n, rounded up; evaluated in extended
    precision since it overflows doubles quickly.
    """
    _check_budget_args(n, alphabet, p)
    if n == 1:
        # Lone vertex: exactly one DAG.  The (n-1)^(nL) factor degenerates
        # to 0 for L > 0 while the true count stays 1, so clamp here.
        return 1
    with mpmath.workdps(60):
        L = mpmath.log(mpmath.mpf(p) / (n * (alphabet - 1))) / mpmath.log(alphabet)
        value = (
            mpmath.power(n - 1, n * L)
            * mpmath.power(mpmath.e, n)
            * mpmath.power(L + 1, n)
        )
        return int(mpmath.ceil(value))
