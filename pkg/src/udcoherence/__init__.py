"""Quantum coherence extracted by a pointlike Unruh-DeWitt detector from a
Gaussian coherent massless scalar field in 1+1 Minkowski spacetime.

Detectors at rest, in inertial motion and in uniform acceleration; all
inputs are reduced by the detector gap and outputs are divided by the
coupling.
"""
from .qfield import (
    KERNEL_AT_ZERO,
    SHORT_TIME_LIMIT,
    CoherenceError,
    CoherenceResult,
    ConstantVelocity,
    DetectorConfig,
    FieldProfile,
    LightconeCoords,
    Method,
    Rest,
    SwitchingProfile,
    UniformAcceleration,
    coherence,
    coherence_accelerated,
    coherence_numeric,
    coherence_rest_closed_form,
    coherence_velocity_closed_form,
    doppler_amplitude,
    effective_initial_energy,
    field_kernel,
    lightcone_coords,
    reduce_parameters,
)
from .sweep import (
    DiffGrid,
    GridSpec,
    SweepGrid,
    SwellingReport,
    decoherence_curve,
    diff_grid,
    swelling_regions,
    sweep_grid,
)

__version__ = "0.1.0"
