"""Exact MSE- and MISE-optimal bandwidths and their ratio as n grows.

The scaled gap n^{1/5}(ratio - 1) should approach the constant returned by
oracle.equivalence_constant.
"""

import argparse

from cvpsi import oracle
from cvpsi.mixtures import catalog


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--density", type=int, default=1)
    p.add_argument("--max-exp", type=int, default=10)
    a = p.parse_args(argv)
    f = catalog(a.density)
    ns = [10 ** k for k in range(2, a.max_exp + 1)]
    print(f"{'n':>12} {'g_mse':>10} {'g_mise':>10} {'ratio':>8} {'scaled':>8}")
    for n, gm, gi, r, s in oracle.equivalence_table(f, ns):
        print(f"{n:>12} {gm:10.6f} {gi:10.6f} {r:8.5f} {s:8.4f}")
    print(f"limit constant: {oracle.equivalence_constant(f):.5f}")


if __name__ == "__main__":
    main()
