import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghzdfs import (
    Level,
    Role,
    StateVector,
    basis_state,
    build_space,
    fidelity,
    level_populations,
    normalized,
    population,
)


def test_build_space_n1_dims():
    space = build_space(1, 2)
    assert space.dims == (3, 3, 3, 3)
    assert space.total_dim == 81


def test_build_space_n3_total_dim():
    assert build_space(3, 2).total_dim == 3**10 == 59049


def test_build_space_active_only_n2():
    space = build_space(2, 2, True)
    # the dispersive register: operation 2, memory a_2, memory b_1, b_2
    assert [s.label() for s in space.subsystems] == [
        "op2", "mem_a2", "mem_b1", "mem_b2", "cavity"]
    assert space.total_dim == 3**5 == 243


def test_build_space_rejects_degenerate_inputs():
    with pytest.raises(ValueError):
        build_space(0, 2)
    with pytest.raises(ValueError):
        build_space(1, 0)


def test_subsystem_ordering_cavity_last():
    space = build_space(2, 2)
    assert space.subsystems[-1].role is Role.CAVITY
    assert space.cavity == space.size - 1
    assert space.positions(Role.OPERATION) == (0, 1)


def test_basis_state_all_ground_is_first_basis_vector():
    space = build_space(1, 2)
    psi = basis_state(space, [Level.G, Level.G, Level.G, 0])
    assert psi.amplitudes[0] == 1.0
    assert np.count_nonzero(psi.amplitudes) == 1


def test_basis_state_index_matches_kron_oracle():
    # independent oracle: build the same basis vector as an explicit
    # Kronecker product with the cavity as the most significant factor
    space = build_space(1, 2)
    labels = [Level.F, Level.G, Level.E, 1]
    psi = basis_state(space, labels)
    one_hots = [np.eye(d)[l] for d, l in zip(space.dims, labels)]
    vec = one_hots[-1]
    for f in reversed(one_hots[:-1]):
        vec = np.kron(vec, f)
    assert np.array_equal(psi.amplitudes, vec)


def test_basis_state_rejects_out_of_range_fock_label():
    space = build_space(1, 2)
    with pytest.raises(ValueError):
        basis_state(space, [Level.G, Level.G, Level.G, 3])


def test_fidelity_self_and_global_phase():
    space = build_space(1, 2)
    psi = normalized(space, np.arange(1, 82).astype(complex))
    assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-14)
    rotated = StateVector(space, np.exp(0.7j) * psi.amplitudes)
    assert fidelity(psi, rotated) == pytest.approx(1.0, abs=1e-14)


def test_fidelity_orthogonal_basis_states():
    space = build_space(1, 2)
    a = basis_state(space, [0, 0, 0, 0])
    b = basis_state(space, [1, 0, 0, 0])
    assert fidelity(a, b) == 0.0


def test_fidelity_rejects_space_mismatch():
    a = basis_state(build_space(1, 2), [0, 0, 0, 0])
    b = basis_state(build_space(2, 2), [0] * 7)
    with pytest.raises(ValueError):
        fidelity(a, b)


def test_population_of_basis_state():
    space = build_space(2, 2)
    q2 = space.position(Role.OPERATION, 2)
    labels = [0] * space.size
    labels[q2] = int(Level.E)
    psi = basis_state(space, labels)
    assert population(psi, q2, Level.E) == pytest.approx(1.0)
    assert population(psi, q2, Level.F) == 0.0


def test_population_equal_superposition():
    space = build_space(1, 2)
    g = basis_state(space, [0, 0, 0, 0]).amplitudes
    e = basis_state(space, [1, 0, 0, 0]).amplitudes
    psi = StateVector(space, (g + e) / np.sqrt(2))
    assert population(psi, 0, Level.E) == pytest.approx(0.5, abs=1e-12)


def test_population_rejects_bad_subsystem():
    space = build_space(1, 2)
    psi = basis_state(space, [0, 0, 0, 0])
    with pytest.raises(ValueError):
        population(psi, 99, Level.G)


def test_state_vector_rejects_unnormalized():
    space = build_space(1, 2)
    with pytest.raises(ValueError):
        StateVector(space, np.ones(space.total_dim, dtype=complex))


@given(st.integers(0, 3**6 * 3 - 1))
def test_index_label_round_trip(index):
    space = build_space(2, 2)  # six qutrits and the cavity: 3^6 * 3 basis states
    assert space.index_of(space.labels_of(index)) == index


@given(st.integers(0, 80), st.integers(0, 80))
def test_basis_states_orthonormal(i, j):
    space = build_space(1, 2)
    a = basis_state(space, space.labels_of(i))
    b = basis_state(space, space.labels_of(j))
    expected = 1.0 if i == j else 0.0
    assert fidelity(a, b) == expected


@given(st.integers(0, 2**32 - 1))
def test_level_populations_sum_to_one(seed):
    space = build_space(1, 2)
    rng = np.random.default_rng(seed)
    psi = normalized(space, rng.normal(size=81) + 1j * rng.normal(size=81))
    for pos in range(space.size):
        assert level_populations(psi, pos).sum() == pytest.approx(1.0, abs=1e-10)
