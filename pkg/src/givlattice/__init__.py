"""Gauge invariant variables for abelian lattice gauge fields and Hofstadter spectra."""

from .lattice import (
    BoundaryCondition,
    LatticeGeometry,
    LinkField,
    PlaquetteField,
    VertexScalarField,
    apply_gauge_transformation,
    bianchi_residual,
    field_strength,
    load_links,
    random_links,
    save_links,
    wilson_line_sum,
    wilson_lines,
)
from .giv import (
    Construction,
    DofCount,
    GaugeInvariantRep,
    LoopField,
    StripField,
    TransitionData,
    asym_to_sym_shift,
    count_variables,
    dof_count,
    extract_giv,
    random_rep,
    reconstruct_links,
    strip_dependency_residual,
    verify_twisted_bc,
)
from .action import (
    ActionParams,
    StripTriple2p1,
    action_from_links,
    action_from_strips,
    plaquettes_from_strips,
    strip_triple_from_rep,
)
from .hofstadter import (
    HofstadterParams,
    Spectrum,
    band_matrix,
    mbz_grid,
    phase_rotate_basis,
    real_space_hamiltonian,
    real_space_spectrum,
    spectra_coincide,
    spectrum,
    uniform_field_giv,
)
from .eigen import EigenError, HermitianMatrix, eigh

__version__ = "0.1.0"
