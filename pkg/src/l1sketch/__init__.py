"""All-pairs L1 distances between piecewise-polynomial densities.

Distances are estimated from low-dimensional sketches built out of
stochastic integrals against Cauchy motion; an exact piecewise oracle and a
Monte Carlo baseline are included for cross-validation.
"""

__version__ = "0.1.0"

from .ci1 import (
    CI1DensityTrace,
    CI1Sample,
    ci1_density,
    ci1_density_trace,
    complex_atan,
    rescale_ci1,
    sample_ci1_unit,
    sample_student_envelope,
    student_envelope_density,
)
from .cid import (
    DEFAULT_C,
    ApproxConfig,
    CalibrationResult,
    CIdSample,
    calibrate_c,
    random_polynomial,
    rescale_cid,
    riemann_abs_scale,
    sample_cid_approx_unit,
)
from .densities import (
    Breakpoints,
    DensityFamily,
    PiecewisePolyDensity,
    PolySegment,
    density_from_pieces,
    eval_density,
    exact_all_pairs,
    exact_l1_distance,
    merge_breakpoints,
    random_piecewise_linear_family,
    sample_from_density,
    uniform_density,
    validate_family,
)
from .errors import EnvelopeDominationError, FamilyFormatError, ParameterError
from .pipeline import (
    DistanceMatrix,
    SketchMatrix,
    SketchMode,
    estimate_all_pairs,
    mc_all_pairs,
    run_scheme,
    sketch_family,
    uniformize_family,
)
from .randstream import (
    RandomStream,
    ScaleEstimate,
    geometric_mean_estimate,
    median_scale_estimate,
    required_sample_count,
    sample_cauchy,
    sample_chi2_1,
    sample_std_normal,
)

__all__ = [
    "__version__",
    "ApproxConfig",
    "Breakpoints",
    "CI1DensityTrace",
    "CI1Sample",
    "CIdSample",
    "CalibrationResult",
    "DEFAULT_C",
    "DensityFamily",
    "DistanceMatrix",
    "EnvelopeDominationError",
    "FamilyFormatError",
    "ParameterError",
    "PiecewisePolyDensity",
    "PolySegment",
    "RandomStream",
    "ScaleEstimate",
    "SketchMatrix",
    "SketchMode",
    "calibrate_c",
    "ci1_density",
    "ci1_density_trace",
    "complex_atan",
    "density_from_pieces",
    "estimate_all_pairs",
    "eval_density",
    "exact_all_pairs",
    "exact_l1_distance",
    "geometric_mean_estimate",
    "mc_all_pairs",
    "median_scale_estimate",
    "merge_breakpoints",
    "random_piecewise_linear_family",
    "random_polynomial",
    "required_sample_count",
    "rescale_ci1",
    "rescale_cid",
    "riemann_abs_scale",
    "run_scheme",
    "sample_cauchy",
    "sample_chi2_1",
    "sample_ci1_unit",
    "sample_cid_approx_unit",
    "sample_from_density",
    "sample_std_normal",
    "sample_student_envelope",
    "sketch_family",
    "student_envelope_density",
    "uniform_density",
    "uniformize_family",
    "validate_family",
]
