"""Degrees-of-freedom analysis for cell-based converter topologies.

The toolkit models a converter as a weighted graph (arms are edges,
terminals are vertices), derives its independent variables from the graph
Laplacian spectrum and the cycle space, decomposes instantaneous power over
those variables, classifies port coupling, and validates modal decoupling
with a linear time-domain simulation.
"""

from .catalog import CATALOG_NAMES, CatalogEntry, Deviation, catalog, verify_all, verify_entry
from .classify import (
    Classification,
    ClarkeTransition,
    PortSpec,
    category_for,
    clarke_transition,
    classify_ports,
    current_decoupled,
    decoupled_ports,
    galvanically_isolated,
)
from .loops import InvalidLoopError, LoopBasis, edge_currents_full, fundamental_cycles, loop_basis, loop_dofs, topology_loops
from .power import (
    PowerDecomposition,
    PowerMatrix,
    PowerTermLabel,
    change_power_basis,
    decoupled_power_patterns,
    edge_power_matrix,
    energy,
    node_power_matrix,
    power_balance,
    power_decomposition,
    power_rank_basis,
)
from .ratmat import (
    RationalMatrix,
    SingularMatrixError,
    gram_schmidt,
    hadamard,
    kron,
    schur_complement,
)
from .simulate import (
    DecouplingReport,
    SimConfig,
    SimTrace,
    Waveform,
    demo_schedule_2y,
    kcl_residual,
    solve_inductive,
    solve_resistive,
    verify_decoupling,
)
from .spectral import (
    InfeasibleInjectionError,
    ModalMatrix,
    SpectralBasis,
    UnsupportedSpectrumError,
    composite_laplacian,
    edge_currents_from_modes,
    edge_voltages_from_modes,
    eigenbasis,
    modal_conductance,
    modal_inductive,
    spectrum,
    topology_basis,
)
from .topology import (
    Topology,
    complete_kpartite,
    connected_components,
    degree_adjacency,
    incidence,
    laplacian,
    load_topology,
    topology_from_dict,
    topology_to_dict,
)

__version__ = "0.1.0"
