"""Exact discrete Bayes nets with parameter-bounded structure search.

The pieces, bottom up: nets and DAGs with exact evaluation and sampling
(model), dense joint tables with an exact independence oracle (dist),
the oracle-based Markov checker (checker), budgeted DAG enumeration
with counting bounds (enumeration), simplex grids and the candidate
stream (epsnet), Scheffe selection (tournament), the end-to-end learner
(learner), and the blackbox decision harness (hardness).  The cli
module exposes each stage as a subcommand.
"""

from .errors import (
    CapacityError,
    InfeasibleBudgetError,
    InputError,
    PBNetError,
    ProtocolError,
)
from .model import (
    BayesNet,
    Cpt,
    Dag,
    Variable,
    complete_dag,
    d_separated,
    dag_from_dict,
    dag_to_dict,
    load_dag,
    load_net,
    log_prob,
    log_prob_rows,
    net_from_dict,
    net_to_dict,
    parameter_count,
    random_bayes_net,
    sample,
    save_net,
)
from .dist import (
    ExactOracle,
    IndependenceOracle,
    JointTable,
    empirical_table,
    fit_bayes_net,
    from_bayes_net,
    is_independent,
    load_table,
    marginalize,
    save_table,
    table_from_dict,
    tv_distance,
)
from .checker import MarkovVerdict, check_markov, is_edge_unimportant
from .enumeration import (
    dag_count_upper_bound,
    dags_within_budget,
    default_variables,
    feasible_sequences,
    realize_dags,
    total_dag_bound,
)
from .epsnet import (
    SimplexGrid,
    build_grid,
    candidate_count,
    candidate_nets,
    grid_size_bound,
    snap_to_grid,
    stream_index,
)
from .tournament import (
    SampleSet,
    SelectionReport,
    TournamentConfig,
    preselect_single_elimination,
    read_samples_csv,
    required_samples,
    run_scheffe,
    scheffe_select,
    write_samples_csv,
)
from .learner import LearnRequest, LearnResult, exhaustive_exact_learn, learn, sample_budget
from .hardness import (
    LearnInstance,
    ReductionResult,
    all_dags,
    decision_ground_truth,
    exhaustive_learner,
    markov_by_definition,
    random_learner,
    reduction_decide,
    replay_learner,
)

__version__ = "0.1.0"

__all__ = [
    "BayesNet",
    "CapacityError",
    "Cpt",
    "Dag",
    "ExactOracle",
    "IndependenceOracle",
    "InfeasibleBudgetError",
    "InputError",
    "JointTable",
    "LearnInstance",
    "LearnRequest",
    "LearnResult",
    "MarkovVerdict",
    "PBNetError",
    "ProtocolError",
    "ReductionResult",
    "SampleSet",
    "SelectionReport",
    "SimplexGrid",
    "TournamentConfig",
    "Variable",
    "all_dags",
    "build_grid",
    "candidate_count",
    "candidate_nets",
    "check_markov",
    "complete_dag",
    "d_separated",
    "dag_count_upper_bound",
    "dag_from_dict",
    "dag_to_dict",
    "dags_within_budget",
    "decision_ground_truth",
    "default_variables",
    "empirical_table",
    "exhaustive_exact_learn",
    "exhaustive_learner",
    "feasible_sequences",
    "fit_bayes_net",
    "from_bayes_net",
    "grid_size_bound",
    "is_edge_unimportant",
    "is_independent",
    "learn",
    "load_dag",
    "load_net",
    "load_table",
    "log_prob",
    "log_prob_rows",
    "marginalize",
    "markov_by_definition",
    "net_from_dict",
    "net_to_dict",
    "parameter_count",
    "preselect_single_elimination",
    "random_bayes_net",
    "random_learner",
    "read_samples_csv",
    "realize_dags",
    "reduction_decide",
    "replay_learner",
    "required_samples",
    "run_scheffe",
    "sample",
    "sample_budget",
    "save_net",
    "save_table",
    "scheffe_select",
    "snap_to_grid",
    "stream_index",
    "table_from_dict",
    "total_dag_bound",
    "tv_distance",
    "write_samples_csv",
]
