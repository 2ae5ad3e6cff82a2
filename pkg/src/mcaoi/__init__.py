"""Age-of-information analysis for cyclic multichannel access schedules."""

__version__ = "0.1.0"

from mcaoi.analytic import (  # noqa: E402
    AoIAnalytic,
    ScheduleConfig,
    analyze,
    aoi_variance,
    average_aoi,
    average_aoi_high_snr,
    chebyshev_bound,
    chebyshev_bound_high_snr,
    network_bound,
    second_moment,
)
from mcaoi.phy import ChannelConfig, CodeConfig, LinkBudget, effective_snr, link_budget, packet_error_rate, q_function  # noqa: E402
from mcaoi.renewal import Backend, GeometricMoments, geometric_moments, moments_series_oracle  # noqa: E402
from mcaoi.simulator import (  # noqa: E402
    EmpiricalStats,
    RenewalSample,
    RenewalSamples,
    SimConfig,
    empirical_bounded_aoi,
    empirical_stats,
    fraction_below,
    simulate_renewals,
    simulate_slots,
    time_average_aoi,
    time_second_moment,
)
from mcaoi.sweep import (  # noqa: E402
    Metric,
    ParetoPoint,
    Source,
    SweepGrid,
    SweepRecord,
    SystemConfig,
    find_crossover,
    optimize_block_length,
    pareto_contour,
    run_sweep,
)
