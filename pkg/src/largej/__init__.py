"""Pseudo-perturbative large-j solver for two-fermion bound states.

The package reduces a two-fermion wave equation with local matrix
potentials to coupled second-order radial channels, expands around the
stable circular orbit in 1/sqrt(j), and produces zero-order spectra and
Regge-trajectory constants for linear-plus-Coulomb quark-model potentials
of the built-in spin-structure catalog.
"""

from .cg import clebsch_gordan
from .harmonics import AngularState, build_harmonics, matrix_element
from .meson import (
    MesonPotentialSpec,
    SpectrumTable,
    TrajectoryFit,
    check_properties,
    compute_trajectories,
    extract_constants,
    make_meson_model,
    run_constants,
    vector_confinement_run,
)
from .quasipotential import (
    AsymptoticScaling,
    OscillatorParams,
    QuasipotentialModel,
    binding_parameter,
    circular_orbit,
    energy_from_b,
    fit_asymptotics,
    oscillator_params,
    zero_order_levels,
)
from .radialsystem import RadialSystem, build_radial_system
from .reduction import ChannelFunctions, channel_functions, first_order_reduced, split_system
from .structures import RadialProfile, SpinStructure, StructureKind, structure_from_code

__version__ = "0.1.0"
