"""Information-theoretic comparison of partitions with explicit random models."""

from .combinatorics import EnsembleTooLarge, RandomModel, Seed, bell, enumerate_partitions, sample_partition, stirling2
from .expectations import (
    ExpectationEstimate,
    RandomModelSpec,
    expected_mi,
    expected_mi_enum,
    expected_mi_exact,
    expected_mi_mc,
    expected_mi_perm_exact,
    expected_nmi,
)
from .infotheory import entropy, generalized_mean, mi, mutual_information, nmi
from .metrics import MetricConfig, MetricResult, ami, ami_all_one_sided, cnmi, nmi_metric, rnmi, rrnmi, score
from .partition import (
    ContingencyTable,
    ParseError,
    Partition,
    PartitionError,
    Shape,
    contingency,
    parse_partition,
    read_partition,
    shape_of,
    trivial_partition,
    write_partition,
)
from .sweep import SweepConfig, degrade, run_trap
from .theorems import TheoremReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "ContingencyTable", "EnsembleTooLarge", "ExpectationEstimate", "MetricConfig", "MetricResult", "ParseError",
    "Partition", "PartitionError", "RandomModel", "RandomModelSpec", "Seed", "Shape", "SweepConfig",
    "TheoremReport", "ami", "ami_all_one_sided", "bell", "cnmi", "contingency", "degrade", "entropy",
    "enumerate_partitions", "expected_mi", "expected_mi_enum", "expected_mi_exact", "expected_mi_mc",
    "expected_mi_perm_exact", "expected_nmi", "generalized_mean", "mi", "mutual_information", "nmi", "nmi_metric",
    "parse_partition", "read_partition", "rnmi", "rrnmi", "run_suite", "run_trap", "sample_partition", "score",
    "shape_of", "stirling2", "trivial_partition", "write_partition",
]
