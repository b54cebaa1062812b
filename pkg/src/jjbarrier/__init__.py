"""Tunnel-junction barrier analysis toolkit.

Subpackages cover the pipeline end to end: the tunneling current formula
and linear resistance (:mod:`.simmons`), nonlinear and distribution fits
(:mod:`.fitting`), Monte-Carlo barrier ensembles and parameter sweeps
(:mod:`.montecarlo`), thinnest-point breakdown statistics
(:mod:`.breakdown`), cross-section image simulation
(:mod:`.stem_forward`) and kernel edge detection (:mod:`.stem_edge`),
plus file formats (:mod:`.dataio`) and a CLI (:mod:`.cli`).
"""

__version__ = "0.1.0"

from .simmons import (  # noqa: F401
    IVCurve,
    SimmonsParams,
    low_voltage_resistance,
    simmons_current,
    simmons_iv,
)
from .fitting import (  # noqa: F401
    DistributionFit,
    DoubleGaussianParams,
    FitResult,
    fit_double_gaussian,
    fit_simmons,
    fit_thickness_distribution,
)
from .montecarlo import (  # noqa: F401
    BarrierField,
    EnsembleMetrics,
    JunctionGeometry,
    MatchTargets,
    ThicknessDistribution,
    junction_iv,
    sample_barrier,
    simulate_ensemble,
    sweep,
)
from .breakdown import (  # noqa: F401
    BreakdownRecord,
    DielectricCalibration,
    calibrate_dielectric_strength,
    cumulative_conductance,
    detect_breakdown,
    group_by_breakdown,
    min_thickness_samples,
)
from .stem_forward import (  # noqa: F401
    EdsImage,
    Lamella,
    TopographyMap,
    build_lamella,
    degrade,
    project,
    synth_topography,
    tip_convolve,
)
from .stem_edge import (  # noqa: F401
    EdgeTrace,
    KernelPair,
    ThicknessProfile,
    build_kernels,
    detect_edges,
    multi_delta_summary,
    thickness_profile,
)
