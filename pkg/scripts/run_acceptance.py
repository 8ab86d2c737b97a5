"""Run the acceptance criteria and report time per criterion.

    python3 scripts/run_acceptance.py [--seed 0] [--scale 1.0] [--json out.json]
"""
import argparse
import json
import time

from minkowski.verify import CRITERIA, VerifyConfig


def main():
    ap = argparse.ArgumentParser(description="acceptance criteria with timings")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--scale", type=float, default=1.0)
    ap.add_argument("--criteria", default=",".join(map(str, sorted(CRITERIA))))
    ap.add_argument("--json", help="write the reports here")
    args = ap.parse_args()

    cfg = VerifyConfig(seed=args.seed).scaled(args.scale)
    reports, total, ok = [], 0.0, True
    for k in map(int, args.criteria.split(",")):
        t0 = time.perf_counter()
        rep = CRITERIA[k](cfg)
        dt = time.perf_counter() - t0
        total += dt
        ok &= rep.ok
        reports.append({"criterion": k, **rep.to_json()})
        print(f"{'PASS' if rep.ok else 'FAIL'} {k:2d} {rep.suite:28s} cases={rep.cases_run:6d} "
              f"failures={len(rep.failures)} {dt:6.1f}s", flush=True)
    print(f"total {total:.1f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=1, sort_keys=True)
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
