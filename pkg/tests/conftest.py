import math

import pytest
from hypothesis import HealthCheck, settings

from ghzdfs import CouplingParams, ProtocolParams

settings.register_profile(
    "numerics", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numerics")

# reference microwave parameter point: all couplings mu/2pi = 10 MHz,
# pulse budget 10 ns, four 2 ns retunings, a 5 GHz cavity with Q = 5e5
MU = 2 * math.pi * 10e6


def reference_coupling(ratio: float = 10.0) -> CouplingParams:
    return CouplingParams(mu1=MU, mu1p=MU, mu=MU, mup=MU,
                          delta=ratio * MU, deltap=ratio * MU)


def reference_params(n: int, ratio: float = 10.0, *, m: int = 0, k: int = 0,
                     fock_cutoff: int = 2) -> ProtocolParams:
    return ProtocolParams(n=n, coupling=reference_coupling(ratio), m=m, k=k,
                          fock_cutoff=fock_cutoff, tau_p=10e-9, tau_d=2e-9,
                          omega_c=2 * math.pi * 5e9, quality_factor=5e5)


@pytest.fixture
def params_n2() -> ProtocolParams:
    return reference_params(2)
