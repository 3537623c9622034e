"""
Randomized property suites
==========================

Every suite draws seeded instances, re-derives the planted orders and checks
one identity per trial.  A failed trial records its seed and residual.
"""

from defectcalc.instances import SUITES, run_suite

print(f"{'suite':26s} {'passed':>8s} {'seconds':>8s}")
for name in SUITES:
    rep = run_suite(name, trials=20, seed=1)
    print(f"{name:26s} {rep.passes:>4d}/{rep.trials:<3d} {rep.elapsed:8.3f}")
    for seed, description, residual in rep.failures:
        print(f"    seed {seed}: {description} ({residual})")
