"""Dispersive cavity-QED model for n two-level atoms: W- and GHZ-class state
preparation, single-atom distillation and collision analysis."""

from .dynamics import (
    MeasurementRecord,
    Propagator,
    ZeroProbabilityError,
    analytic_ghz4_evolution,
    analytic_w_evolution,
    distillation_probability,
    evolve,
    evolve_timedep,
    measure_atom,
)
from .entanglement import TargetState, concurrence, fidelity_to, make_target, w_class_fidelity
from .hilbert import (
    BasisDescriptor,
    DensityMatrix,
    Operator,
    StateVector,
    basis_state,
    inner_product,
    partial_trace,
)
from .models import (
    ModelParams,
    effective_hamiltonian,
    full_hamiltonian_at,
    static_frame_hamiltonian,
    vacuum_sector_hamiltonian,
)

__version__ = "0.1.0"
