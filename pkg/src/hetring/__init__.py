"""Heteroclinic networks of inhibitory coupled logistic maps.

Build the network of fixed points and connections for an inhibition graph,
decide which of its cycles are stable, and simulate the map to watch
trajectories follow (or leave) them.
"""
from .errors import (BudgetExceededError, DegenerateFitError, DomainError, HetRingError, InsufficientDataError,
                     NumericError, SimulationError, StabilityRegimeError, UnsupportedCycleError, UnsupportedError,
                     ValidationError)
from .graph import (ActiveSet, CouplingGraph, SuppressionProfile, from_adjacency, from_edges, independent_sets,
                    is_independent, lucas, make_ring, suppression_profile)
from .network import (Connection, CycleDescriptor, FixedPoint, HetNetwork, build_network, classify_symmetric,
                      connections_from, cycle_from_labels, enumerate_cycles, fixed_points, linearization_eigenvalues,
                      maximally_active, saddle_condition)
from .stability import (Delta, StabilityReport, TransitionMatrix, analyze_cycle, char_poly, classify_roots, delta,
                        eigenpair_check, podvigina_check, theorem_verdict, transition_matrix_for_cycle, transition_matrix_symmetric,
                        vmax_closed_form)

__version__ = "0.1.0"
