"""Per-attribute partial differential privacy: accounting, query release, histograms and learners."""

from .accountant import (
    Budget,
    UniformPerAttribute,
    WeightedPerAttribute,
    budget_ledger,
    compose_parallel_attributes,
    compose_sequential,
    partial_to_standard,
    zcdp_to_approx_dp_tight,
)
from .core import AttributeSchema, Dataset, LabeledDataset, RngStream, load_dataset, save_dataset
from .halfspace import Halfspace, RobustLearnConfig, learn_halfspace_robust
from .histogram import (
    HeavyHitterParams,
    SparseHistogram,
    estimate_distribution,
    find_polarizing_prefix,
    learn_point,
    learn_threshold,
    priv_heavy_hitter,
    priv_histogram,
)
from .release import mwem, projection_mechanism
from .workloads import Query, Workload, diameters, eval_workload, kway_marginal_workload

__version__ = "0.1.0"

__all__ = [
    "AttributeSchema",
    "Budget",
    "Dataset",
    "Halfspace",
    "HeavyHitterParams",
    "LabeledDataset",
    "Query",
    "RngStream",
    "RobustLearnConfig",
    "SparseHistogram",
    "UniformPerAttribute",
    "WeightedPerAttribute",
    "Workload",
    "budget_ledger",
    "compose_parallel_attributes",
    "compose_sequential",
    "diameters",
    "estimate_distribution",
    "eval_workload",
    "find_polarizing_prefix",
    "kway_marginal_workload",
    "learn_halfspace_robust",
    "learn_point",
    "learn_threshold",
    "load_dataset",
    "mwem",
    "partial_to_standard",
    "priv_heavy_hitter",
    "priv_histogram",
    "projection_mechanism",
    "save_dataset",
    "zcdp_to_approx_dp_tight",
]
