#!/usr/bin/env python3
"""Two vibrons sharing a phonon chain: superradiant vs protected mode.

Integrates the antisymmetric and symmetric collective excitations on the same
chain, smooths out the fast quadrature breathing, and prints the measured
decay of each mode against the Markov prediction (2 Gamma_m for the symmetric
mode, near-zero for the antisymmetric one).
"""

import argparse
import math

import numpy as np

from vibrolang import (
    DiscreteBath,
    TrajectoryConfig,
    energy_envelope,
    fit_decay_rate,
    simulate_pair,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gamma-m", type=float, default=0.02)
    ap.add_argument("--omega-max", type=float, default=24.0)
    ap.add_argument("--n-cells", type=int, default=1250)
    ap.add_argument("--j", type=int, default=1)
    args = ap.parse_args()

    gm, wm = args.gamma_m, args.omega_max
    k0 = (wm / 2.0) ** 2
    bath = DiscreteBath(n_cells=args.n_cells, k0=k0, m0=1.0,
                        dk=k0 * math.sqrt(4.0 * gm / wm))
    t_max = 3.0 / gm
    print(f"Gamma_m={gm}, omega_max={wm}, N={args.n_cells}, j={args.j}, "
          f"t_max={t_max:g}")

    runs = {}
    for label, q0 in (("minus", (1.0, -1.0)), ("plus", (1.0, 1.0))):
        traj = simulate_pair(1.0, bath, args.j, TrajectoryConfig(
            t_max=t_max, q0=q0, store_every=8))
        runs[label] = traj

    nu_s = gm * wm / 2.0
    period = math.pi / math.sqrt(1.0 - nu_s)

    tr = runs["minus"]
    tv, env = energy_envelope(tr.times, tr.e_minus, period)
    print(f"protected mode:   E-(t={tv[-1]:.0f})/E-(0) = "
          f"{env[-1] / env[0]:.4f} (Markov pair rate would leave "
          f"{math.exp(-2 * gm * tv[-1]):.2e})")

    tr = runs["plus"]
    rate = fit_decay_rate(tr.times, tr.e_plus, 2.0 * gm)
    print(f"superradiant mode: fitted rate {rate:.4f} vs 2*Gamma_m = "
          f"{2 * gm:.4f} (ratio {rate / (2 * gm):.3f})")

    leak = runs["minus"].e_plus[-1] / (runs["minus"].e_minus[0]
                                       + runs["minus"].e_plus[0])
    print(f"cross-mode leakage from antisymmetric start: {leak:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
