"""Holonomic gates from control-manifold loops, teleportation with imperfect
gates, and dissipative fidelity analysis at desk scale."""

from .linalg import (QubitRegister, assert_unitary, dagger, embed,
                     expm_anti_hermitian, kron, max_norm, unitarity_defect)
from .manifold import (ControlPoint, HolonomyResult, LoopSpec, c1_loop, c2_loop,
                       c3_loop, c4_loop, closed_form_holonomy, connection_at,
                       elliptic_vertices, holonomy, path_holonomy,
                       rectangle_vertices, sheared_vertices, squeezed_loop,
                       unitary_at)
from .areas import (area, enclosed_rotation_angle, flux_sensitivity,
                    perturbed_area, perturbed_area_gradient)
from .gates import (GateErrorParams, cnot_ideal, cnot_imperfect,
                    hadamard_ideal, hadamard_imperfect, phase_distance,
                    phase_gate_from_c1, reflection, synthesize_hadamard)
from .teleport import (EPR, FidelityReport, branch_amplitude, build_teleport,
                       build_teleported_cnot, fidelity, first_order_coeffs,
                       first_order_prediction, permutation_pi13,
                       teleport_first_order, teleported_cnot_fidelity,
                       teleported_hadamard_fidelity)
from .channels import (KrausChannel, apply_channel, dissipative_fidelity,
                       entangled_fraction, optimal_fidelity, phase_damping,
                       povm_map, povm_map_interleaved)
from .loopspec_io import (LoopSpecError, SweepConfig, parse_loop_spec,
                          parse_sweep_config, serialize_loop_spec,
                          serialize_sweep_config)
from .optimize import bloch_state

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
