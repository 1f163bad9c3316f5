"""Near-field XL-MIMO channel modeling, field boundaries, and two-stage estimation."""

from .boundaries import (
    BoundaryReport,
    boundary_report,
    empirical_discrepancy,
    max_discrepancy_far,
    max_discrepancy_near,
    mimo_ard,
    mimo_rd,
    miso_rd,
)
from .channel import (
    ChannelMatrix,
    LosParams,
    PathComponent,
    SceneConfig,
    farfield_steering,
    los_channel,
    mixed_channel,
    nearfield_steering,
    nlos_channel,
    sample_scene,
)
from .estimation import (
    EstimateReport,
    GridSpec,
    RefineSpec,
    TwoStageConfig,
    baseline_omp,
    cancel_los,
    coarse_search,
    estimate_los,
    estimate_nlos,
    gradient_g,
    objective_g,
    refine_los,
    two_stage,
)
from .geometry import (
    ArrayGeometry,
    PairOffsets,
    element_offset_centered,
    half_wavelength_array,
    pair_distance_exact,
    pair_distance_parallel,
    pair_distance_taylor1,
    pair_distance_taylor2,
    scatterer_distance,
)
from .measurement import MeasurementSet, calibrate_sigma2, gen_combiner, gen_pilot, kron_sensing, observe
from .metrics import MetricRecord, NmseAccumulator, crlb, ls_oracle, nmse, nmse_bound, to_db
from .polar import (
    PolarCodebook,
    PolarGrid,
    build_codebook,
    farfield_codebook,
    nearest_atom,
    polar_synthesize,
    sample_grid,
)

__version__ = "0.1.0"
