"""Numerical laboratory for fractional perimeters and heat kernels on model geometries."""

from .asymptotics import (
    ExperimentReport,
    SSchedule,
    ThetaReport,
    analytic_heat_density,
    extrapolate_limit,
    heat_density,
    predicted_limit_finite,
    predicted_limit_infinite,
    run_asymptotic_experiment,
    theta_inverse,
)
from .functionals import (
    SetFunction,
    TrigFunction,
    flap_bochner,
    flap_singular,
    interaction_Js,
    perimeter_Ps,
    perimeter_local,
    seminorm_singular,
    seminorm_spectral,
)
from .heatkernel import HeatKernelEval, heat_kernel, heat_mass, semigroup_indicator
from .models import (
    Arc,
    Ball,
    Cap,
    Complement,
    Cone,
    FullSpace,
    HalfSpace,
    Intersection,
    ManifoldModel,
    Union,
    distance,
    euclidean,
    flat_torus,
    gaussian_space,
    hyperbolic3,
    region_contains,
    region_measure,
    sample_region,
    sphere,
)
from .quadrature import IntegralEstimate, QuadConfig, TailClass, integrate_pair, integrate_region, integrate_time
from .singkernel import KernelValue, beta_ns, gamma_norm, kernel_Ks

__version__ = "0.1.0"
