"""Online piecewise-linear partitioning of simulation time series.

The engine watches a scalar series as it is produced, keeps only a short
buffer of raw values plus five running sums per open line, and decides
greedily where one linear fit should end and the next begin.  The saved
breakpoints and per-segment statistics are enough to rebuild a
piecewise-linear approximation with a known residual sum of squares.
"""
from .errors import (
    ConfigError,
    ContractError,
    DataQualityError,
    DegenerateFitError,
    FormatError,
    InsufficientDataError,
    IntegrityError,
    PartitionError,
    SequencingError,
)
from .ftest import FTestConfig, FTestResult, f_modified, f_standard, f_survival
from .partitioner import (
    Partitioner,
    PartitionerConfig,
    PartitionerState,
    Segment,
    breakpoints,
    finish,
    init,
    partition_values,
    run_series,
    step,
)
from .stable import RotatedStats
from .suffstats import (
    LineFit,
    SamplePoint,
    SuffStats,
    accumulate,
    batch,
    coefficients,
    merge,
    remove_oldest_shift,
    rss,
)

__version__ = "0.1.0"
