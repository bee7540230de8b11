import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import reference_params
from ghzdfs import (
    DephasingModel,
    GhzCoefficients,
    Level,
    bare_ghz_memory_state,
    basis_state,
    build_space,
    collective_mean_fidelity_bare_pair,
    dephase_trajectory,
    dephasing_hamiltonian,
    fidelity,
    storage_fidelity_ensemble,
    target_state,
    verify_dfs_annihilation,
)


def pair_model(space, sigma=0.0, trials=1, couplings=None):
    couplings = couplings if couplings is not None else (1.0,) * space.n_pairs
    return DephasingModel("collective_pair", tuple(couplings), sigma, trials)


def encoded_state(n=2, coeffs=None):
    params = reference_params(n)
    space = build_space(n, params.fock_cutoff)
    coeffs = coeffs or GhzCoefficients.balanced()
    return space, target_state(space, params, coeffs)


# -- the noise generator ---------------------------------------------------------


def test_generator_annihilates_ge_pair_component():
    space, _ = encoded_state(1)
    h = dephasing_hamiltonian(space, pair_model(space, couplings=(1.7,)))
    a1, b1 = space.memory_pair(1)
    labels = [0] * space.size
    labels[a1] = int(Level.G)
    labels[b1] = int(Level.E)
    psi = basis_state(space, labels)
    assert np.linalg.norm(h.matvec(psi.amplitudes)) == 0.0


def test_generator_eigenvalue_on_gg_pair():
    space, _ = encoded_state(1)
    g1 = 1.7
    h = dephasing_hamiltonian(space, pair_model(space, couplings=(g1,)))
    psi = basis_state(space, [0] * space.size)  # both pair qutrits in |g>
    out = h.matvec(psi.amplitudes)
    assert np.vdot(psi.amplitudes, out).real == pytest.approx(-2 * g1)
    assert np.linalg.norm(out) == pytest.approx(2 * abs(g1))


def test_generator_is_hermitian_and_diagonal():
    import scipy.sparse as sp

    space, _ = encoded_state(2)
    h = dephasing_hamiltonian(space, pair_model(space, couplings=(0.4, 1.3)))
    assert h.hermitian
    off = h.matrix - sp.diags(h.matrix.diagonal())
    assert off.nnz == 0 or abs(off).max() == 0.0


def test_generator_requires_collective_mode():
    space, _ = encoded_state(1)
    model = DephasingModel("independent", (1.0, 1.0), 0.1, 4)
    with pytest.raises(ValueError):
        dephasing_hamiltonian(space, model)


# -- annihilation identity ----------------------------------------------------------


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_encoded_state_in_kernel_for_random_couplings(seed):
    rng = np.random.default_rng(seed)
    space, encoded = encoded_state(2, GhzCoefficients.random(rng))
    model = pair_model(space, couplings=rng.uniform(0.1, 3.0, size=2))
    assert verify_dfs_annihilation(encoded, space, model) < 1e-12


def test_bare_ghz_not_in_kernel():
    space, _ = encoded_state(2)
    bare = bare_ghz_memory_state(space, np.sqrt(0.3), np.sqrt(0.7))
    model = pair_model(space, couplings=(0.9, 1.4))
    total = sum(model.couplings)
    residual = verify_dfs_annihilation(bare, space, model)
    assert residual == pytest.approx(2 * total, rel=1e-12)
    assert residual > 0.0


# -- trajectories ----------------------------------------------------------------------


def test_collective_kick_leaves_encoded_state_invariant():
    space, encoded = encoded_state(2)
    model = pair_model(space, sigma=2.5, trials=1)
    for seed in range(5):
        kicked = dephase_trajectory(encoded, space, model, seed)
        assert 1.0 - fidelity(encoded, kicked) < 1e-12


def test_zero_sigma_kick_is_identity():
    space, encoded = encoded_state(1)
    kicked = dephase_trajectory(encoded, space, pair_model(space, sigma=0.0), 3)
    assert np.array_equal(kicked.amplitudes, encoded.amplitudes)


def test_independent_noise_degrades_encoded_state():
    space, encoded = encoded_state(1)
    model = DephasingModel("independent", (1.0, 1.0), 0.7, 400)
    mean, stderr = storage_fidelity_ensemble(encoded, space, model, rng_seed=9)
    assert mean < 1.0 - 5 * stderr


def test_trajectories_are_seed_deterministic():
    space, encoded = encoded_state(1)
    model = pair_model(space, sigma=1.0)
    bare = bare_ghz_memory_state(space, 2**-0.5, 2**-0.5)
    a = dephase_trajectory(bare, space, model, 1234)
    b = dephase_trajectory(bare, space, model, 1234)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    c = dephase_trajectory(bare, space, model, 1235)
    assert not np.array_equal(a.amplitudes, c.amplitudes)


# -- ensembles ---------------------------------------------------------------------------


def test_encoded_ensemble_fidelity_exactly_one():
    space, encoded = encoded_state(1)
    model = pair_model(space, sigma=3.0, trials=50)
    mean, stderr = storage_fidelity_ensemble(encoded, space, model, rng_seed=0)
    assert mean == pytest.approx(1.0, abs=1e-12)
    assert stderr == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("sigma", [0.25, 0.5, 1.0])
def test_bare_pair_matches_closed_form(sigma):
    space, _ = encoded_state(1)
    bare = bare_ghz_memory_state(space, 2**-0.5, 2**-0.5)
    model = pair_model(space, sigma=sigma, trials=10000)
    mean, stderr = storage_fidelity_ensemble(bare, space, model, rng_seed=17)
    closed = collective_mean_fidelity_bare_pair(sigma)
    assert abs(mean - closed) < 3 * stderr


def test_bare_pair_limit_is_one_half():
    space, _ = encoded_state(1)
    bare = bare_ghz_memory_state(space, 2**-0.5, 2**-0.5)
    model = pair_model(space, sigma=40.0, trials=8000)
    mean, stderr = storage_fidelity_ensemble(bare, space, model, rng_seed=23)
    assert abs(mean - 0.5) < 4 * stderr
    assert collective_mean_fidelity_bare_pair(40.0) == pytest.approx(0.5)


def test_bare_fidelity_nonincreasing_in_sigma():
    space, _ = encoded_state(1)
    bare = bare_ghz_memory_state(space, 2**-0.5, 2**-0.5)
    sigmas = [0.0, 0.2, 0.4, 0.8]
    means, errs = [], []
    for sigma in sigmas:
        mean, err = storage_fidelity_ensemble(
            bare, space, pair_model(space, sigma=sigma, trials=4000), rng_seed=31)
        means.append(mean)
        errs.append(err)
    for lo, hi in zip(means[1:], means[:-1]):
        assert lo <= hi + 3 * (max(errs) + 1e-12)


def test_ensemble_requires_at_least_two_trials():
    space, encoded = encoded_state(1)
    with pytest.raises(ValueError):
        storage_fidelity_ensemble(encoded, space, pair_model(space, sigma=1.0), 0)


def test_model_validation():
    with pytest.raises(ValueError):
        DephasingModel("collective", (1.0,), 0.1, 2)
    with pytest.raises(ValueError):
        DephasingModel("collective_pair", (1.0,), -0.1, 2)
    with pytest.raises(ValueError):
        DephasingModel("collective_pair", (1.0,), 0.1, 0)
