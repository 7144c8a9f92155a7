"""Many-body entanglement toolkit for N-fermion states.

Reduced density matrices across particle-number cuts, search for maximally
entangled states via hypergraph enumeration and exact LP feasibility, and
random-state spectral statistics against trace-fixed Wishart predictions.
"""

__version__ = "0.1.0"

from .fock import (
    FermionState,
    overlap_count,
    rank_subset,
    split_sign,
    subset_from_orbitals,
    orbitals_from_subset,
    unrank_subset,
)
from .dm import (
    DensityMatrix,
    amplitude_matrix,
    entropy,
    ghz_state,
    max_entropy,
    normalized_entropy,
    paired_state,
    reduced_density_matrix,
    rotate_basis,
    spectra_match,
    subadditivity_check,
)
from .hypergraph import Hypergraph, incidence_matrix, is_steiner, is_t_design
from .search import (
    SearchBudget,
    Verdict,
    classify_existence,
    design_to_state,
    nesting_check,
    particle_hole_dual,
    search_maximal_state,
    verify_maximal,
)
from .ensemble import EnsembleConfig, run_ensemble, sample_random_state
