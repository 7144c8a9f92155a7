from itertools import combinations

import numpy as np

from fermi_ent.fock import FermionState, subset_from_orbitals


def random_state(D: int, N: int, seed: int) -> FermionState:
    """Dense random state with Gaussian amplitudes, for tests only."""
    rng = np.random.default_rng(seed)
    sds = [subset_from_orbitals(c) for c in combinations(range(1, D + 1), N)]
    amps = rng.standard_normal(len(sds)) + 1j * rng.standard_normal(len(sds))
    return FermionState.build(D, N, zip(sds, amps), normalize=True)
