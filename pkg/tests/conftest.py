import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from pbnet import BayesNet, Cpt, Dag, default_variables, load_net, random_bayes_net

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fig1_left():
    return load_net(FIXTURES / "fig1-left.json")


@pytest.fixture(scope="session")
def fig1_right():
    return load_net(FIXTURES / "fig1-right.json")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def make_coins(p0=0.5, p1=0.5):
    """Two independent binary variables."""
    dag = Dag(default_variables(2), ())
    return BayesNet(dag, [Cpt(0, (), [[p0, 1 - p0]]), Cpt(1, (), [[p1, 1 - p1]])])


def make_copy_net():
    """X1 fair, X2 a deterministic copy of X1."""
    dag = Dag(default_variables(2), [(0, 1)])
    return BayesNet(dag, [Cpt(0, (), [[0.5, 0.5]]), Cpt(1, (0,), [[1.0, 0.0], [0.0, 1.0]])])


def make_chain3(seed=7):
    """Generic random chain X1 -> X2 -> X3."""
    return random_bayes_net(Dag(default_variables(3), [(0, 1), (1, 2)]), seed=seed)


def make_xor3():
    """X3 = X1 xor X2 with fair inputs: needs a full 4-row CPT."""
    dag = Dag(default_variables(3), [(0, 2), (1, 2)])
    rows = [[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]]
    return BayesNet(
        dag,
        [Cpt(0, (), [[0.5, 0.5]]), Cpt(1, (), [[0.5, 0.5]]), Cpt(2, (0, 1), rows)],
    )


@pytest.fixture
def coins():
    return make_coins()


@pytest.fixture
def copy_net():
    return make_copy_net()


@pytest.fixture
def chain3():
    return make_chain3()
