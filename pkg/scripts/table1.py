"""Monte Carlo comparison of CT, SHD and JS over the 16 benchmark densities.

    python3 scripts/table1.py --out results/table1 [--B 500] [--workers 1]
"""

import argparse
import sys
import time
from dataclasses import replace

from cvpsi import harness


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results/table1")
    p.add_argument("--densities", default="1-16")
    p.add_argument("--n", default="100,1000")
    p.add_argument("--B", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", action="store_true")
    a = p.parse_args(argv)

    cfg = replace(harness.ExperimentConfig(),
                  densities=harness.parse_int_list(a.densities), sizes=harness.parse_int_list(a.n),
                  replicates=a.B, seed=a.seed, workers=a.workers)
    t0 = time.time()
    step = max(1, len(cfg.densities) * len(cfg.sizes) * cfg.replicates // 20)

    def progress(done, total):
        if done % step == 0 or done == total:
            print(f"  {done}/{total} replicates, {time.time() - t0:.0f}s", file=sys.stderr)

    res = harness.run(cfg, progress=progress)
    harness.export(res, a.out, json_mirror=a.json)
    print(f"{'n':>6} {'method':>6} {'mean':>7} {'median':>7} {'min':>7} {'max':>7}")
    for n, e, mean, med, lo, hi in sorted(res.summary()):
        print(f"{n:>6} {e:>6} {mean:7.3f} {med:7.3f} {lo:7.3f} {hi:7.3f}")
    if res.failures:
        print(f"{len(res.failures)} failure records in {a.out}/failures.csv")


if __name__ == "__main__":
    main()
