"""Phase-dumping noise on the memory register and the pair-encoding's
immunity to it.

The noise couples each memory pair j through g_j E (x) (sigma_z at a_j +
sigma_z at b_j) with E an arbitrary environment operator.  Because the
coupling factors into environment (x) system, a state is exactly immune iff
the system part S = sum_j g_j (sigma_z + sigma_z) annihilates it, so the
environment never needs to be simulated: verification uses S alone, and
storage noise is realized as classical random phase kicks on pure-state
trajectories.  sigma_z is |e><e| - |g><g| and acts as zero on |f> (the
stored states never populate it).

States supported on span{|ge>, |eg>} of every pair sit in the kernel of S
for any couplings; a bare GHZ state on the same qutrits does not, and a
single collective kick phi ~ N(0, sigma^2) on one pair dephases it to mean
fidelity (1 + exp(-8 sigma^2))/2, a closed form used to cross-check the
Monte-Carlo machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.sparse as sp

from .hilbert import HilbertSpace, Level, Role, StateVector, fidelity
from .operators import OperatorMatrix

DephasingMode = Literal["collective_pair", "independent"]

# sigma_z eigenvalues per qutrit level (g, e, f)
_SIGMA_Z = np.array([-1.0, 1.0, 0.0])


@dataclass(frozen=True)
class DephasingModel:
    """Noise model for the stored state.

    ``collective_pair``: both qutrits of a pair see the same phase; one
    coupling g_j per pair.  ``independent``: every memory qutrit sees its own
    phase; couplings are per qutrit and no single system Hamiltonian exists.
    ``phase_sigma`` is the standard deviation of the random kick in radians.
    """

    mode: DephasingMode
    couplings: tuple[float, ...]
    phase_sigma: float = 0.0
    trials: int = 1

    def __post_init__(self) -> None:
        if self.mode not in ("collective_pair", "independent"):
            raise ValueError(f"unknown dephasing mode {self.mode!r}")
        if self.phase_sigma < 0:
            raise ValueError("phase_sigma must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        object.__setattr__(self, "couplings", tuple(float(g) for g in self.couplings))


def _pair_z_sums(space: HilbertSpace) -> list[np.ndarray]:
    """Per-pair diagonal of sigma_z(a_j) + sigma_z(b_j) over the basis."""
    sums = []
    for j in range(1, space.n_pairs + 1):
        pos_a, pos_b = space.memory_pair(j)
        sums.append(_SIGMA_Z[space.label_array(pos_a)] + _SIGMA_Z[space.label_array(pos_b)])
    return sums


def _check_pair_couplings(space: HilbertSpace, model: DephasingModel) -> None:
    if len(model.couplings) != space.n_pairs:
        raise ValueError(
            f"need one coupling per memory pair ({space.n_pairs}), "
            f"got {len(model.couplings)}"
        )


def dephasing_hamiltonian(space: HilbertSpace, model: DephasingModel) -> OperatorMatrix:
    """System part of the pair-collective dephasing coupling,
    sum_j g_j (sigma_z at a_j + sigma_z at b_j); diagonal and Hermitian."""
    if model.mode != "collective_pair":
        raise ValueError(
            "independent noise has no single system Hamiltonian; use trajectories"
        )
    _check_pair_couplings(space, model)
    diag = np.zeros(space.total_dim)
    for g, z in zip(model.couplings, _pair_z_sums(space)):
        diag += g * z
    return OperatorMatrix(space, sp.diags(diag).astype(np.complex128).tocsr(), hermitian=True)


def verify_dfs_annihilation(state: StateVector, space: HilbertSpace,
                            model: DephasingModel) -> float:
    """Norm of the dephasing generator applied to the state.

    Zero (to rounding) exactly when the state is supported on span{|ge>,
    |eg>} of every memory pair, i.e. when the stored state cannot feel
    pair-collective phase noise at all.
    """
    if state.space != space:
        raise ValueError("state does not live on the given space")
    h = dephasing_hamiltonian(space, model)
    return float(np.linalg.norm(h.matvec(state.amplitudes)))


def dephase_trajectory(state: StateVector, space: HilbertSpace, model: DephasingModel,
                       rng_seed) -> StateVector:
    """One random-phase-kick realization, deterministic for a given seed.

    Collective mode draws one phi_j ~ N(0, sigma^2) per pair and applies
    exp(-i sum_j phi_j (sigma_z + sigma_z)); independent mode draws one
    phase per memory qutrit.
    """
    if state.space != space:
        raise ValueError("state does not live on the given space")
    rng = np.random.default_rng(rng_seed)
    exponent = np.zeros(space.total_dim)
    if model.mode == "collective_pair":
        phis = rng.normal(0.0, model.phase_sigma, size=space.n_pairs)
        for phi, z in zip(phis, _pair_z_sums(space)):
            exponent += phi * z
    else:
        memory = space.positions(Role.MEMORY_A) + space.positions(Role.MEMORY_B)
        phis = rng.normal(0.0, model.phase_sigma, size=len(memory))
        for phi, pos in zip(phis, memory):
            exponent += phi * _SIGMA_Z[space.label_array(pos)]
    return StateVector(space, np.exp(-1j * exponent) * state.amplitudes)


def storage_fidelity_ensemble(state: StateVector, space: HilbertSpace,
                              model: DephasingModel, rng_seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo mean fidelity (and its standard error) between the stored
    state and its dephased trajectories.

    Per-trial seeds are spawned deterministically from ``rng_seed``, so
    repeated calls reproduce the ensemble bit for bit and trajectories may be
    evaluated concurrently without changing the result.
    """
    if model.trials < 2:
        raise ValueError("an ensemble needs at least 2 trials")
    children = np.random.SeedSequence(rng_seed).spawn(model.trials)
    fids = np.empty(model.trials)
    for i, child in enumerate(children):
        kicked = dephase_trajectory(state, space, model, child)
        fids[i] = fidelity(state, kicked)
    mean = float(fids.mean())
    stderr = float(fids.std(ddof=1) / math.sqrt(model.trials))
    return mean, stderr


def bare_ghz_memory_state(space: HilbertSpace, alpha: complex, beta: complex) -> StateVector:
    """Unencoded GHZ comparison state alpha prod|g> + beta prod|e> on the 2n
    memory qutrits (everything else in its ground/vacuum state)."""
    total = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(total - 1.0) > 1e-12:
        raise ValueError("GHZ coefficients must be normalized")
    memory = space.positions(Role.MEMORY_A) + space.positions(Role.MEMORY_B)
    ground = [int(Level.G)] * (space.size - 1) + [0]
    excited = list(ground)
    for pos in memory:
        excited[pos] = int(Level.E)
    amps = np.zeros(space.total_dim, dtype=np.complex128)
    amps[space.index_of(ground)] = alpha
    amps[space.index_of(excited)] = beta
    return StateVector(space, amps)


def collective_mean_fidelity_bare_pair(sigma: float) -> float:
    """Closed-form ensemble fidelity of a bare single-pair GHZ state under a
    collective kick: the pair levels differ by 4 phi, giving
    (1 + exp(-8 sigma^2))/2."""
    return 0.5 * (1.0 + math.exp(-8.0 * sigma**2))
