"""Decision harness around net-producing blackboxes.

Given a distribution and a parameter budget, any solver that claims to
return a budgeted net the distribution is Markov for can be audited
cheaply: count the returned net's parameters and run the oracle Markov
check.  Answer YES exactly when both pass.  A sound auditor never says
YES on a budget no net can meet, no matter how adversarial the solver,
and with an exact exhaustive solver it matches the brute-force truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Iterator, Sequence

import numpy as np

from .checker import MarkovVerdict, check_markov
from .dist import CI_TOL, ExactOracle, JointTable, fit_bayes_net
from .errors import CapacityError, InputError, ProtocolError
from .learner import exhaustive_exact_learn
from .model import (
    BayesNet,
    Dag,
    Variable,
    complete_dag,
    d_separated,
    parameter_count,
    random_bayes_net,
)


@dataclass(frozen=True)
class LearnInstance:
    """A distribution (with exact oracle access) and a parameter budget."""

    table: JointTable
    p: int

    def __post_init__(self) -> None:
        if self.p < 1:
            raise InputError("parameter budget must be >= 1")

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self.table.variables


LearnerBlackbox = Callable[[LearnInstance], BayesNet]


@dataclass
class ReductionResult:
    """Audited decision: YES iff the returned net fits the budget and is Markov."""

    is_yes: bool
    oracle_calls: int
    parameters: int
    verdict: MarkovVerdict | None
    net: BayesNet

    @property
    def decision(self) -> str:
        return "YES" if self.is_yes else "NO"


def reduction_decide(instance: LearnInstance, learner: LearnerBlackbox) -> ReductionResult:
    """Run the blackbox, audit its net, and decide the instance.

    The parameter count is checked first (it needs no oracle); the
    Markov check runs only when the budget passes, so the oracle budget
    per decision stays within n(n-1)/2 queries.
    """
    net = learner(instance)
    if not isinstance(net, BayesNet):
        raise ProtocolError("blackbox did not return a Bayes net")
    if net.variables != instance.variables:
        raise ProtocolError("blackbox returned a net over different variables")
    params = parameter_count(net.dag)
    if params > instance.p:
        return ReductionResult(False, 0, params, None, net)
    oracle = ExactOracle(instance.table)
    verdict = check_markov(oracle, net.dag)
    return ReductionResult(verdict.is_markov, verdict.oracle_calls, params, verdict, net)


def all_dags(variables: Sequence[Variable]) -> Iterator[Dag]:
    """Every labeled DAG on the variables, by filtering all edge orientations.

    Each unordered pair is absent, forward, or backward; cyclic
    combinations are dropped.  Exponential in n(n-1)/2: desk scale only.
    """
    variables = tuple(variables)
    n = len(variables)
    pairs = list(combinations(range(n), 2))
    for choice in product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                edges.append((a, b))
            elif c == 2:
                edges.append((b, a))
        try:
            yield Dag(variables, edges)
        except InputError:
            continue  # cyclic orientation


def markov_by_definition(table: JointTable, dag: Dag, tol: float = CI_TOL) -> bool:
    """Definition-level Markov test: every d-separation must be a CI.

    Checks all pairs against all conditioning subsets; exponential in n,
    kept as the independent ground truth for the oracle-based checker.
    """
    if dag.variables != table.variables:
        raise InputError("dag and table are over different variables")
    oracle = ExactOracle(table, tol)
    n = dag.n
    for u in range(n):
        for v in range(u + 1, n):
            rest = [x for x in range(n) if x != u and x != v]
            for mask in range(1 << len(rest)):
                z = tuple(rest[j] for j in range(len(rest)) if (mask >> j) & 1)
                if d_separated(dag, u, v, z) and not oracle.query(u, v, z):
                    return False
    return True


def decision_ground_truth(instance: LearnInstance, *, max_n: int = 5) -> bool:
    """Brute-force truth: does any budgeted DAG make the table Markov?"""
    n = len(instance.variables)
    if n > max_n:
        raise CapacityError(f"brute force capped at {max_n} variables, got {n}")
    for dag in all_dags(instance.variables):
        if parameter_count(dag) <= instance.p and markov_by_definition(instance.table, dag):
            return True
    return False


# ---------------------------------------------------------------------------
# Blackbox solvers for the harness: the exact reference, a replay stub,
# and a randomized adversary.  All are total: they return some net even
# when no budgeted net exists.
# ---------------------------------------------------------------------------


def exhaustive_learner(instance: LearnInstance) -> BayesNet:
    """Exact reference blackbox backed by the exhaustive learner.

    Falls back to a complete-DAG fit when no budgeted net exists; the
    audit then rejects it on the parameter count unless the budget
    genuinely allows a complete net.
    """
    net = exhaustive_exact_learn(instance.table, instance.p)
    if net is not None:
        return net
    return fit_bayes_net(instance.table, complete_dag(instance.variables))


def replay_learner(net: BayesNet) -> LearnerBlackbox:
    """Blackbox that ignores the instance and replays a fixed net."""
    return lambda instance: net


def random_learner(seed: int) -> LearnerBlackbox:
    """Adversarial blackbox: a random DAG with random CPTs, seeded."""

    def blackbox(instance: LearnInstance) -> BayesNet:
        rng = np.random.default_rng(seed)
        n = len(instance.variables)
        order = rng.permutation(n)
        edges = [
            (int(order[i]), int(order[j]))
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.4
        ]
        dag = Dag(instance.variables, edges)
        return random_bayes_net(dag, seed=int(rng.integers(2 ** 31)))

    return blackbox
