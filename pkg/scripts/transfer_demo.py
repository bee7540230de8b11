"""Run the reference microwave parameter set end to end and print a summary.

Ideal-mode transfers for n = 1..3 plus a full-dynamics run on the two-qubit
register, with timing and leakage analysis alongside.
"""

import argparse
import math

import numpy as np

from ghzdfs import (
    CouplingParams,
    GhzCoefficients,
    ProtocolParams,
    cavity_lifetime,
    leakage_estimate,
    operation_time,
    run_transfer,
)

MU = 2 * math.pi * 10e6  # all couplings mu/2pi = 10 MHz


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ratio", type=float, default=10.0, help="delta/mu ratio")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    coupling = CouplingParams(mu1=MU, mu1p=MU, mu=MU, mup=MU,
                              delta=args.ratio * MU, deltap=args.ratio * MU)
    rng = np.random.default_rng(args.seed)
    coeffs = GhzCoefficients.random(rng)
    print(f"coefficients: alpha={coeffs.alpha:.4f} beta={coeffs.beta:.4f}")

    for n in (1, 2, 3):
        params = ProtocolParams(n=n, coupling=coupling)
        res = run_transfer(params, coeffs, "ideal")
        print(f"n={n} ideal : fidelity={res.fidelity_to_target:.12f} "
              f"residual photon={res.leakage_photon:.2e}")

    params = ProtocolParams(n=2, coupling=coupling)
    res = run_transfer(params, coeffs, "full")
    p, pp = leakage_estimate(params)
    print(f"n=2 full  : fidelity={res.fidelity_to_target:.6f} "
          f"peak |f> leakage={res.max_f_leakage:.4e} (estimate p={p:.4e})")
    print(f"total operation time tau = {operation_time(params) * 1e9:.1f} ns, "
          f"cavity lifetime = {cavity_lifetime(params) * 1e6:.1f} us")


if __name__ == "__main__":
    main()
