"""Band-limited localized Parseval frames on the circle, flat torus, and sphere.

The package builds, from explicit eigendata, the full chain

    manifold -> metric lattice -> exact positive cubature -> needlet frame
             -> Besov quasi-norms,

with numerical verification of the defining identities at every stage.
"""

from .besov import (
    ApproxNorm,
    BesovParams,
    NormComparison,
    SmoothnessEstimate,
    approx_norm,
    best_approx_error,
    beta_multiplier,
    littlewood_paley_norm,
    norm_comparison,
    sequence_quasinorm,
    smoothness_estimate,
)
from .cubature import (
    Cubature,
    NotSamplingSetError,
    RhoTooLargeError,
    auto_rho,
    build_cubature,
    integrate,
    plancherel_polya_bounds,
    riemann_error,
    sampling_matrix,
)
from .frames import (
    FrameCoefficients,
    FrameLevel,
    NeedletFrame,
    WindowFunction,
    analyze,
    build_frame,
    frame_element,
    kernel_eval,
    localization_constants,
    lowest_level,
    make_window,
    parseval_residual,
    partition_deviation,
    synthesize,
)
from .lattice import (
    Lattice,
    LatticeReport,
    build_lattice,
    cardinality_bounds,
    rho_cap,
    validate_lattice,
    voronoi_measures,
)
from .manifold import (
    BasisSizeError,
    ManifoldSpec,
    SpectralBasis,
    eigen_basis,
    geodesic_distance,
    make_manifold,
    max_degree,
    reference_quadrature,
    weyl_count,
)
from .spectral import (
    BandlimitedFunction,
    apply_L_power,
    evaluate,
    evaluate_at,
    lp_norm,
    multiply,
    nikolski_check,
    project,
    random_function,
)

__version__ = "0.1.0"
