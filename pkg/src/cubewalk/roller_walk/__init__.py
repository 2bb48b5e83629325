from .certify import (
    BoundaryEstimate,
    FactorCertificate,
    IndistinctEndpoints,
    NoChain,
    PairSeparation,
    StripSeries,
    bridge_point,
    default_schedule,
    distinct_limits,
    regular_certificate,
    strip_count,
    strip_growth_check,
    strip_histogram,
    verify_chain,
)
from .distribution import InvalidDistribution, StepDistribution
from .moments import MomentReport, moment_report
from .walk import (
    DEFAULT_MONITOR_RADIUS,
    FORWARD,
    REFLECTED,
    DriftEstimate,
    HittingEstimate,
    NoStabilizedRuns,
    StabilizationReport,
    WalkRun,
    WindowTooLarge,
    default_window,
    describe_halfspace,
    drift,
    hitting_measure,
    sample_paths,
    stabilization,
    wilson_interval,
)
