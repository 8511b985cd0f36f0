"""Simulation and verification workbench for a controlled-swap quantum router."""

from .gates import (
    Circuit,
    apply_circuit,
    circuit_unitary,
    fredkin_circuit,
    named_router_circuit,
    router_circuit,
)
from .qstate import (
    DensityMatrix,
    StateVector,
    basis_state,
    equal_up_to_global_phase,
    negativity,
    partial_trace,
    tensor_product,
    to_density,
    von_neumann_entropy,
)
from .tomography import fidelity, reconstruct

__all__ = [
    "Circuit",
    "DensityMatrix",
    "StateVector",
    "apply_circuit",
    "basis_state",
    "circuit_unitary",
    "equal_up_to_global_phase",
    "fidelity",
    "fredkin_circuit",
    "named_router_circuit",
    "negativity",
    "partial_trace",
    "reconstruct",
    "router_circuit",
    "tensor_product",
    "to_density",
    "von_neumann_entropy",
]

__version__ = "0.1.0"
