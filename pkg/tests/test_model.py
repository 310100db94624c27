import json
import math

import numpy as np
import pytest

import brute
from pbnet import (
    BayesNet,
    Cpt,
    Dag,
    InputError,
    Variable,
    complete_dag,
    d_separated,
    dag_from_dict,
    default_variables,
    from_bayes_net,
    log_prob,
    log_prob_rows,
    net_from_dict,
    net_to_dict,
    parameter_count,
    random_bayes_net,
    sample,
    tv_distance,
    empirical_table,
)


def uniform_net(dag):
    sizes = dag.alphabet_sizes
    cpts = []
    for i in range(dag.n):
        rows = math.prod(sizes[p] for p in dag.parents(i))
        cpts.append(Cpt(i, dag.parents(i), np.full((rows, sizes[i]), 1.0 / sizes[i])))
    return BayesNet(dag, cpts)


def random_dag(n, rng, edge_prob=0.4, alphabet=2):
    order = rng.permutation(n)
    edges = [
        (int(order[i]), int(order[j]))
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < edge_prob
    ]
    return Dag(default_variables(n, alphabet), edges)


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def test_variable_validation():
    with pytest.raises(InputError):
        Variable("X", 1)
    with pytest.raises(InputError):
        Variable("", 2)


def test_dag_rejects_cycles_and_self_loops():
    vs = default_variables(3)
    with pytest.raises(InputError):
        Dag(vs, [(0, 1), (1, 2), (2, 0)])
    with pytest.raises(InputError):
        Dag(vs, [(0, 0)])
    with pytest.raises(InputError):
        Dag(vs, [(0, 5)])
    with pytest.raises(InputError):
        Dag([Variable("A", 2), Variable("A", 2)], [])


def test_dag_accessors(fig1_left):
    dag = fig1_left.dag
    assert dag.parents("X3") == (1, 4)
    assert dag.children("X3") == (3,)
    assert dag.topological_order() == (0, 1, 4, 2, 3)
    assert dag.in_degree_sequence() == (0, 1, 2, 1, 0)
    assert dag.descendants("X2") == frozenset({2, 3})
    assert dag.has_edge("X5", "X3") and not dag.has_edge("X3", "X5")
    with pytest.raises(InputError):
        dag.index("X9")


def test_cpt_row_normalization_and_rejection():
    cpt = Cpt(0, (), [[0.5 + 4e-10, 0.5]])
    assert cpt.rows.sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InputError):
        Cpt(0, (), [[0.6, 0.5]])
    with pytest.raises(InputError):
        Cpt(0, (), [[1.2, -0.2]])


def test_bayes_net_shape_validation():
    dag = Dag(default_variables(2), [(0, 1)])
    with pytest.raises(InputError):
        BayesNet(dag, [Cpt(0, (), [[0.5, 0.5]]), Cpt(1, (0,), [[0.5, 0.5]])])
    with pytest.raises(InputError):
        BayesNet(dag, [Cpt(1, (), [[0.5, 0.5]]), Cpt(1, (0,), [[0.5, 0.5], [0.5, 0.5]])])


# ---------------------------------------------------------------------------
# parameter count
# ---------------------------------------------------------------------------


def test_parameter_count_fig1(fig1_left, fig1_right):
    # Direct counting of the 5-variable example structure: 1+2+4+2+1.
    assert parameter_count(fig1_left.dag) == 10
    assert parameter_count(fig1_left) == 10
    # The 4-variable net after marginalizing: 1+2+4+1.
    assert parameter_count(fig1_right.dag) == 8


def test_parameter_count_complete_and_edgeless():
    for n in (1, 3, 5):
        assert parameter_count(complete_dag(default_variables(n))) == 2 ** n - 1
        assert parameter_count(Dag(default_variables(n), ())) == n


def test_parameter_count_matches_accumulation():
    rng = np.random.default_rng(0)
    for trial in range(20):
        n = int(rng.integers(2, 7))
        alphabet = int(rng.integers(2, 4))
        dag = random_dag(n, rng, alphabet=alphabet)
        assert parameter_count(dag) == brute.parameter_count_loop(dag)


def test_parameter_count_mixed_alphabets():
    vs = (Variable("A", 2), Variable("B", 3), Variable("C", 4))
    dag = Dag(vs, [(0, 1), (1, 2)])
    assert parameter_count(dag) == 1 + 2 * 2 + 3 * 3


# ---------------------------------------------------------------------------
# d-separation
# ---------------------------------------------------------------------------


def test_d_separated_fig1_examples(fig1_left):
    dag = fig1_left.dag
    assert d_separated(dag, "X2", "X5") is True
    assert d_separated(dag, "X2", "X5", ["X3"]) is False
    assert d_separated(dag, "X1", "X4", ["X3"]) is True
    # path-enumeration oracle agrees on the derived case
    assert brute.d_separated_paths(dag, "X1", "X4", ["X3"]) is True


def test_d_separated_validation(fig1_left):
    dag = fig1_left.dag
    with pytest.raises(InputError):
        d_separated(dag, "X1", "X1")
    with pytest.raises(InputError):
        d_separated(dag, "X1", "X2", ["X1"])
    with pytest.raises(InputError):
        d_separated(dag, "X1", "X9")


def all_z_subsets(rest):
    for mask in range(1 << len(rest)):
        yield tuple(rest[j] for j in range(len(rest)) if (mask >> j) & 1)


def test_d_separated_matches_path_enumeration_exhaustive():
    for n in (2, 3, 4):
        variables = default_variables(n)
        for edges in brute.all_dag_edge_sets(n):
            dag = Dag(variables, edges)
            for u in range(n):
                for v in range(u + 1, n):
                    rest = [x for x in range(n) if x not in (u, v)]
                    for z in all_z_subsets(rest):
                        assert d_separated(dag, u, v, z) == brute.d_separated_paths(
                            dag, u, v, z
                        ), (sorted(edges), u, v, z)


def test_d_separated_matches_path_enumeration_sampled_n5():
    rng = np.random.default_rng(5)
    for trial in range(200):
        dag = random_dag(5, rng, edge_prob=float(rng.uniform(0.2, 0.7)))
        u, v = rng.choice(5, size=2, replace=False)
        rest = [x for x in range(5) if x not in (u, v)]
        z = tuple(x for x in rest if rng.random() < 0.5)
        assert d_separated(dag, int(u), int(v), z) == brute.d_separated_paths(
            dag, int(u), int(v), z
        )


def test_parents_screen_off_non_descendants():
    rng = np.random.default_rng(11)
    for trial in range(25):
        n = int(rng.integers(2, 6))
        dag = random_dag(n, rng)
        for i in range(n):
            pa = set(dag.parents(i))
            descendants = dag.descendants(i)
            for j in range(n):
                if j == i or j in pa or j in descendants:
                    continue
                assert d_separated(dag, i, j, pa) is True


# ---------------------------------------------------------------------------
# log_prob
# ---------------------------------------------------------------------------


def test_log_prob_single_fair_coin():
    net = BayesNet(Dag(default_variables(1), ()), [Cpt(0, (), [[0.5, 0.5]])])
    assert log_prob(net, [0]) == pytest.approx(math.log(0.5))


def test_log_prob_forced_zero(copy_net):
    assert log_prob(copy_net, [0, 1]) == float("-inf")
    assert log_prob(copy_net, [0, 0]) == pytest.approx(math.log(0.5))


def test_log_prob_uniform_fig1(fig1_left):
    net = uniform_net(fig1_left.dag)
    for assignment in ([0, 0, 0, 0, 0], [1, 0, 1, 0, 1], [1, 1, 1, 1, 1]):
        assert log_prob(net, assignment) == pytest.approx(math.log(1 / 32))


def test_log_prob_rejects_bad_assignment(fig1_left):
    with pytest.raises(InputError):
        log_prob(fig1_left, [0, 0, 0, 0, 2])
    with pytest.raises(InputError):
        log_prob(fig1_left, [0, 0, 0])


def test_exp_log_prob_sums_to_one():
    rng = np.random.default_rng(2)
    for n, alphabet in ((10, 2), (6, 3), (12, 2)):
        dag = random_dag(n, rng, alphabet=alphabet)
        net = random_bayes_net(dag, seed=int(rng.integers(2 ** 31)))
        sizes = dag.alphabet_sizes
        grids = np.indices(sizes).reshape(n, -1).T
        total = np.exp(log_prob_rows(net, grids)).sum()
        assert total == pytest.approx(1.0, abs=1e-9)


def test_log_prob_rows_matches_scalar(chain3):
    rng = np.random.default_rng(3)
    rows = rng.integers(0, 2, size=(50, 3))
    vec = log_prob_rows(chain3, rows)
    for row, value in zip(rows, vec):
        assert value == pytest.approx(log_prob(chain3, row))


def test_log_prob_rows_zero_factor(copy_net):
    vec = log_prob_rows(copy_net, [[0, 1], [1, 1]])
    assert vec[0] == float("-inf")
    assert np.isfinite(vec[1])


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def test_sample_deterministic_net():
    dag = Dag(default_variables(2), [(0, 1)])
    net = BayesNet(dag, [Cpt(0, (), [[0.0, 1.0]]), Cpt(1, (0,), [[1.0, 0.0], [0.0, 1.0]])])
    rows = sample(net, 64, seed=9)
    assert np.array_equal(rows, np.tile([1, 1], (64, 1)))


def test_sample_count_zero(coins):
    assert sample(coins, 0, seed=1).shape == (0, 2)
    with pytest.raises(InputError):
        sample(coins, -1)


def test_sample_seed_determinism(chain3):
    assert np.array_equal(sample(chain3, 500, seed=4), sample(chain3, 500, seed=4))
    assert not np.array_equal(sample(chain3, 500, seed=4), sample(chain3, 500, seed=5))


def test_sample_fair_coin_frequency():
    net = BayesNet(Dag(default_variables(1), ()), [Cpt(0, (), [[0.5, 0.5]])])
    rows = sample(net, 100_000, seed=12)
    freq = (rows[:, 0] == 0).mean()
    assert abs(freq - 0.5) < 0.01


def test_sample_tv_small_net():
    rng = np.random.default_rng(6)
    dag = random_dag(4, rng)
    net = random_bayes_net(dag, seed=21)
    rows = sample(net, 300_000, seed=22)
    emp = empirical_table(net.variables, rows)
    assert tv_distance(emp, from_bayes_net(net)) < 0.01


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def test_net_round_trip(fig1_left):
    clone = net_from_dict(net_to_dict(fig1_left))
    assert clone == fig1_left


def test_net_from_dict_reorders_parents(fig1_left):
    obj = net_to_dict(fig1_left)
    entry = obj["cpts"]["X3"]
    # List parents as (X5, X2): rows must be re-indexed with X5 most significant.
    entry["parents"] = ["X5", "X2"]
    rows = entry["rows"]
    entry["rows"] = [rows[0], rows[2], rows[1], rows[3]]
    clone = net_from_dict(obj)
    assert clone == fig1_left


def test_net_from_dict_validation(fig1_left):
    obj = net_to_dict(fig1_left)
    del obj["cpts"]["X3"]
    with pytest.raises(InputError):
        net_from_dict(obj)
    obj = net_to_dict(fig1_left)
    obj["cpts"]["X3"]["parents"] = ["X2", "X4"]
    with pytest.raises(InputError):
        net_from_dict(obj)
    obj = net_to_dict(fig1_left)
    obj["edges"].append(["X1", "X9"])
    with pytest.raises(InputError):
        net_from_dict(obj)


def test_dag_from_dict_ignores_cpts(fig1_left):
    obj = net_to_dict(fig1_left)
    dag = dag_from_dict(obj)
    assert dag == fig1_left.dag
    bare = {k: obj[k] for k in ("variables", "edges")}
    assert dag_from_dict(bare) == fig1_left.dag


def test_net_to_dict_is_json_stable(fig1_left):
    a = json.dumps(net_to_dict(fig1_left), sort_keys=True)
    b = json.dumps(net_to_dict(fig1_left), sort_keys=True)
    assert a == b
