"""Moment-based reconstruction of nonnegative densities on the unit square
from (noisy, kernel-smoothed) line-integral data, with an independent
Fourier-domain inversion path for cross-validation."""

from .density_recon import (
    BoundInputs,
    ReconGrid,
    minimized_sup_error_bound,
    moment_approximation,
    reconstruct_grid,
    relative_l2_error,
    sup_error,
    sup_error_bound,
)
from .mollifiers import (
    MollifierSpec,
    evaluate_kernel,
    fourier_of_kernel,
    make_bump,
    make_cosine,
    validate_omega_band,
)
from .moment_recovery import (
    AngularMomentSet,
    angular_moments,
    convolve_moments,
    deconvolve_moments,
    recover_moment_table,
    solve_moment_system,
    synthesize_angular_moments,
)
from .numerics import Grid1D, binomial, dft_1d, log_gamma, trapezoid_integrate
from .phantoms import (
    Density,
    DiskDensity,
    MomentTable,
    PolynomialDensity,
    SumOfDisksDensity,
    UniformDensity,
    analytic_radon,
    evaluate_density,
    exact_moment,
)
from .projector import (
    Sinogram,
    add_noise,
    evenness_residual,
    full_circle_grid,
    half_circle_grid,
    l1_norm,
    moment_angle_grid,
    mollify,
    offset_grid,
    project,
)
from .spectral import (
    FilterSpec,
    apply_filter,
    backproject,
    fbp_reconstruct,
    projection_slice_residual,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
