"""Run every suite at a given degree and print a per-criterion summary.

    python scripts/run_all_checks.py [--deg 4] [--json report.json]
"""
import argparse
import time

from ekappa.cli import ACCEPTANCE, report_json, run_suite

p = argparse.ArgumentParser()
p.add_argument("--deg", type=int, default=4)
p.add_argument("--json")
args = p.parse_args()

t0 = time.time()
from ekappa.cli import CheckConfig  # noqa: E402

checks = run_suite("all", CheckConfig(deg=args.deg))
ms = int((time.time() - t0) * 1000)
by_id = {c.id: c for c in checks}
n_fail = sum(c.status == "fail" for c in checks)
print(f"{len(checks)} checks, {n_fail} failing, {ms / 1000:.1f}s at degree {args.deg}\n")
for crit, ids in ACCEPTANCE.items():
    bad = [i for i in ids if i in by_id and by_id[i].status != "pass"]
    print(f"criterion {crit:2d}: {'pass' if not bad else 'FAIL'}")
    for i in bad:
        print(f"    {i}: {by_id[i].witness}")
others = [c for c in checks if c.status == "fail" and not any(c.id in ids for ids in ACCEPTANCE.values())]
if others:
    print("\nother failing checks (not acceptance lines):")
    for c in others:
        print(f"    {c.id}: {c.witness}")
if args.json:
    open(args.json, "w").write(report_json("all", checks, ms))
