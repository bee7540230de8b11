"""Hand-built protocol states, constructed by explicit tensor products only.

These never touch the pulse/evolution machinery, so they serve as
independent oracles for the states the protocol should reach at each stage.
"""

import numpy as np

from ghzdfs import HilbertSpace, Role, StateVector, product_state

G = np.array([1.0, 0.0, 0.0])
E = np.array([0.0, 1.0, 0.0])
F = np.array([0.0, 0.0, 1.0])
PLUS = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
MINUS = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)


def config_amps(space: HilbertSpace, op1, op_rest, mem_a1, mem_a_rest, mem_b,
                fock: int) -> np.ndarray:
    """Amplitudes of a product configuration given per-group qutrit vectors."""
    factors = []
    for sub, dim in zip(space.subsystems, space.dims):
        if sub.role is Role.CAVITY:
            vec = np.zeros(dim)
            vec[fock] = 1.0
            factors.append(vec)
        elif sub.role is Role.OPERATION:
            factors.append(op1 if sub.index == 1 else op_rest)
        elif sub.role is Role.MEMORY_A:
            factors.append(mem_a1 if sub.index == 1 else mem_a_rest)
        else:
            factors.append(mem_b)
    return product_state(space, factors).amplitudes


def encoded_initial(space: HilbertSpace, alpha: complex, beta: complex) -> StateVector:
    """The pulse-encoded starting state of the whole system."""
    amps = (alpha * config_amps(space, E, PLUS, E, PLUS, MINUS, 0)
            + beta * config_amps(space, F, MINUS, E, PLUS, MINUS, 0))
    return StateVector(space, amps)


def after_load(space: HilbertSpace, alpha: complex, beta: complex) -> StateVector:
    """State after the first resonant stage: the beta branch now holds the photon."""
    amps = (alpha * config_amps(space, E, PLUS, E, PLUS, MINUS, 0)
            - 1j * beta * config_amps(space, E, MINUS, E, PLUS, MINUS, 1))
    return StateVector(space, amps)


def after_hold(space: HilbertSpace, alpha: complex, beta: complex) -> StateVector:
    """State after the dispersive hold: every photon-1 |+-> flipped."""
    amps = (alpha * config_amps(space, E, PLUS, E, PLUS, MINUS, 0)
            - 1j * beta * config_amps(space, E, PLUS, E, MINUS, PLUS, 1))
    return StateVector(space, amps)


def after_unload(space: HilbertSpace, alpha: complex, beta: complex) -> StateVector:
    """State after the second resonant stage: photon deposited on memory a_1."""
    amps = (alpha * config_amps(space, E, PLUS, E, PLUS, MINUS, 0)
            + beta * config_amps(space, E, PLUS, F, MINUS, PLUS, 0))
    return StateVector(space, amps)


def decoded_target(space: HilbertSpace, alpha: complex, beta: complex) -> StateVector:
    """The pair-encoded GHZ target after the decoding pulses."""
    amps = (alpha * config_amps(space, E, PLUS, G, G, E, 0)
            + beta * config_amps(space, E, PLUS, E, E, G, 0))
    return StateVector(space, amps)
