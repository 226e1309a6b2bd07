"""Difference calculus and Markov factorization for categorical log-odds.

The building blocks: dense tables over finite categorical domains
(:mod:`~markovodds.tables`), the first/second difference operators that
characterize conditional independence (:mod:`~markovodds.diffs`), undirected
graphs with clique machinery (:mod:`~markovodds.graphs`), membership tests
and interaction-term decompositions (:mod:`~markovodds.factorize`),
expressiveness measures for the induced decision functions
(:mod:`~markovodds.complexity`), binary generative classifiers
(:mod:`~markovodds.models`), and fixed-log-odds maximum likelihood via
iterative proportional fitting (:mod:`~markovodds.ipf`), with a
scikit-learn-style wrapper (:mod:`~markovodds.estimator`) and a CLI
(:mod:`~markovodds.cli`).
"""

from .complexity import (
    DecisionFunction,
    XorWitness,
    contains_xor,
    markov_dimension,
    sign_count_bound,
    sign_of,
    xor_scan,
)
from .diffs import first_difference, is_zero, recenter_correction, second_difference
from .errors import (
    ConsistencyError,
    FormatError,
    GuardError,
    MarkovOddsError,
    PositivityError,
    ValidationError,
)
from .estimator import FixedOddsMarkovClassifier
from .exactlinalg import exact_rank, feasible_with_margin
from .factorize import (
    CliqueFactorization,
    markov_membership,
    membership_violations,
    mobius_decompose,
    reconstruct,
)
from .graphs import (
    Dag,
    UndirectedGraph,
    clique_tree,
    find_decomposition,
    is_decomposable,
    maximal_cliques,
    moralize,
    separates,
)
from .ipf import (
    Dataset,
    IpfReport,
    empirical_marginal,
    fit_ipf,
    log_likelihood,
    marginal_fit,
)
from .serialization import (
    canonical_dumps,
    load_dag,
    load_dataset,
    load_decision,
    load_factorization,
    load_function,
    load_graph,
    load_model,
    save_dag,
    save_dataset,
    save_decision,
    save_factorization,
    save_function,
    save_graph,
    save_model,
)
from .models import (
    CiCheck,
    GenerativeClassifier,
    check_ci,
    ci_details,
    decide,
    from_log_odds,
    is_g_markov,
    log_odds,
)
from .tables import (
    CategoricalDomain,
    TabularFunction,
    as_subset,
    complement_subset,
    depends_only_on,
    flat_index,
    substitute,
    unindex,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "MarkovOddsError",
    "ValidationError",
    "FormatError",
    "PositivityError",
    "GuardError",
    "ConsistencyError",
    # tables
    "CategoricalDomain",
    "TabularFunction",
    "as_subset",
    "complement_subset",
    "substitute",
    "depends_only_on",
    "flat_index",
    "unindex",
    # differences
    "first_difference",
    "second_difference",
    "is_zero",
    "recenter_correction",
    # graphs
    "UndirectedGraph",
    "Dag",
    "maximal_cliques",
    "separates",
    "moralize",
    "is_decomposable",
    "clique_tree",
    "find_decomposition",
    # factorization
    "CliqueFactorization",
    "markov_membership",
    "membership_violations",
    "mobius_decompose",
    "reconstruct",
    # complexity
    "DecisionFunction",
    "XorWitness",
    "sign_of",
    "contains_xor",
    "xor_scan",
    "markov_dimension",
    "sign_count_bound",
    # exact linear algebra
    "exact_rank",
    "feasible_with_margin",
    # classifiers
    "GenerativeClassifier",
    "log_odds",
    "decide",
    "CiCheck",
    "check_ci",
    "ci_details",
    "is_g_markov",
    "from_log_odds",
    # fitting
    "Dataset",
    "IpfReport",
    "empirical_marginal",
    "marginal_fit",
    "log_likelihood",
    "fit_ipf",
    "FixedOddsMarkovClassifier",
    # file formats
    "canonical_dumps",
    "load_function",
    "save_function",
    "load_graph",
    "save_graph",
    "load_dag",
    "save_dag",
    "load_model",
    "save_model",
    "load_decision",
    "save_decision",
    "load_factorization",
    "save_factorization",
    "load_dataset",
    "save_dataset",
]
