"""Windowed theta-joins with stream pre-filtering and amalgamated partitioning."""

from .baselines import ALGORITHMS, cfs_join, ftj_join, obt_join, rbm_join
from .datasource import DistSpec, generate, load_csv, windows
from .joiner import execute, join, multiway_join, partition_filter, prefap_join, schedule
from .model import (
    Algorithm,
    Boundary,
    Config,
    Element,
    Interval,
    JoinResult,
    JoinResults,
    Partition,
    RunMetrics,
    Stream,
    ThetaOp,
    stream_extremes,
    theta_holds,
)
from .oracle import oracle_join, oracle_multiway
from .partitioner import PartitionPlan, amalgamate, assign, boundary_of, isolated_plan, repartition_oversized, span
from .prefilter import prefilter_pair

__version__ = "0.1.0"
