"""RMSE of the CV estimate of psi against n, with the root-n reference.

    python3 scripts/convergence.py --density 1 --B 200
"""

import argparse
from dataclasses import dataclass
import math

import numpy as np

from cvpsi import oracle
from cvpsi.cv_core import psi_hat
from cvpsi.mixtures import catalog, sample, true_psi


@dataclass(frozen=True)
class ConvergenceConfig:
    density: int = 1
    sizes: tuple = (100, 316, 1000, 3162, 10000)
    replicates: int = 200
    seed: int = 5


def run(cfg):
    f = catalog(cfg.density)
    psi = true_psi(f)
    rows = []
    for n in cfg.sizes:
        est = np.array([psi_hat(sample(f, n, np.random.SeedSequence([cfg.seed, n, b]))).estimate
                        for b in range(cfg.replicates)])
        rows.append((n, math.sqrt(np.mean((est - psi) ** 2)), n * np.var(est, ddof=1)))
    return rows, 4 * oracle.var_f_of_x(f)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--density", type=int, default=1)
    p.add_argument("--B", type=int, default=200)
    a = p.parse_args(argv)
    rows, target = run(ConvergenceConfig(density=a.density, replicates=a.B))
    print(f"{'n':>6} {'rmse':>10} {'n*var':>9}")
    for n, r, v in rows:
        print(f"{n:>6} {r:10.6f} {v:9.5f}")
    ns, rm = zip(*[(n, r) for n, r, _ in rows])
    slope = np.polyfit(np.log(ns), np.log(rm), 1)[0]
    print(f"log-log slope {slope:.3f} (root-n rate: -0.5); 4 Var f(X) = {target:.5f}")


if __name__ == "__main__":
    main()
