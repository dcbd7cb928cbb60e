"""Run the certification suite over several seeds and tabulate the worst residual per check."""
import argparse
import sys
import time

from entropometer.harness import CHECK_NAMES, CHECKS, SuiteConfig, run_check


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=5, help="run seeds 1..N")
    parser.add_argument("--instances", type=int, help="instances per check (default: each check's own)")
    args = parser.parse_args(argv)

    failed = 0
    print(f"{'check':28s} {'worst residual':>15s} {'tolerance':>10s} {'seconds':>8s}  status")
    for check in CHECKS:
        worst, elapsed, ok = 0.0, 0.0, True
        for seed in range(1, args.seeds + 1):
            start = time.perf_counter()
            r = run_check(check.name, SuiteConfig(seed=seed, n_instances=args.instances))
            elapsed += time.perf_counter() - start
            worst = max(worst, r.max_residual)
            ok &= r.passed
        failed += not ok
        print(f"{check.name:28s} {worst:15.3e} {check.tolerance:10.0e} {elapsed:8.2f}  {'PASS' if ok else 'FAIL'}")
    print(f"{len(CHECK_NAMES) - failed}/{len(CHECK_NAMES)} checks passed on every seed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
