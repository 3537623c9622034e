"""Acceptance criteria 1-9.

Each criterion prints one ``PASS``/``FAIL`` line.  Run under pytest, or
directly with ``python tests/test_acceptance.py`` for just the summary.
"""
import json
import sys
from pathlib import Path

import pytest

from defectcalc.cli import dispatch
from defectcalc.defect import (
    DefectKind,
    defect,
    forward_expansion_residual,
    lemma_independence_rank,
    nested_iso_defect,
    nested_sym_defect,
    strictness_order,
)
from defectcalc.instances import gen_block_tuples, gen_jordan_iso, gen_tensor_factors, run_suite
from defectcalc.io import parse_document, serialize_document
from defectcalc.linalg import DEFAULT_TOL, Tolerance, fro, identity, nilpotent_jordan
from defectcalc.tuples import TuplePair, product_pair

ISO, SYM = DefectKind.ISOMETRIC, DefectKind.SYMMETRIC
SEED = 20240601
ROOT = Path(__file__).resolve().parent
FIX = ROOT / "fixtures"


def _suite_line(*runs):
    ok = all(r.passes == r.trials for r in runs)
    detail = ", ".join(f"{r.suite_name} {r.passes}/{r.trials}" for r in runs)
    failures = [f for r in runs for f in r.failures]
    return ok, detail + (f"; first failure {failures[0]}" if failures else "")


def crit_1_oracle():
    # 1e-10 relative to the largest term, as stated for this criterion
    return _suite_line(run_suite("oracle", 200, SEED, Tolerance(abs_floor=1e-12, rel=1e-10)))


def crit_2_products():
    return _suite_line(run_suite("products", 50, SEED), run_suite("products_sym", 50, SEED))


def crit_3_two_of_three():
    return _suite_line(run_suite("two_of_three", 25, SEED), run_suite("two_of_three_sym", 25, SEED))


def crit_4_counterexample():
    base = TuplePair.of([identity(2) + nilpotent_jordan(2)], [identity(2)])
    p1, p2 = gen_block_tuples(base, 2)
    prod = product_pair(p1, p2)
    notes, ok = [], True
    for kind in (ISO, SYM):
        orders = [strictness_order(p, kind).strict_order for p in (p1, p2, prod)]
        top = fro(defect(prod, kind, 2))
        good = orders == [2, 2, 2] and top <= 1e-12
        ok &= good
        notes.append(f"{kind.value}: factor/product orders {orders}, ||defect^2|| = {top:.1e}")
    lift = run_suite("tensor_lift", 10, SEED)
    ok &= lift.passes == 10
    notes.append(f"tensor_lift {lift.passes}/10")
    return ok, "; ".join(notes)


def _criterion_directions(kind):
    """One instance per truth direction: the nested quantity vanishes exactly when order m fails."""
    m = 2
    base = TuplePair.of([identity(2) + nilpotent_jordan(2)], [identity(2)])
    fails = gen_block_tuples(base, 2)
    holds = gen_tensor_factors(gen_jordan_iso(2, SEED), gen_jordan_iso(3, SEED + 1))
    out = []
    for (q1, q2), m1, m2 in ((fails, m, m), (holds, 2, 3)):
        order = strictness_order(product_pair(q1, q2), kind).strict_order
        if kind is ISO:
            mat, scale = nested_iso_defect(q1, m1 - 1, q2, m2 - 1)
        else:
            mat, scale = nested_sym_defect(q1, m1 - 1, q2, m2 - 1)
        thr = DEFAULT_TOL.threshold(scale)
        out.append((order == m1 + m2 - 1, fro(mat) > 10 * thr, fro(mat) <= thr))
    (f_strict, f_big, f_zero), (h_strict, h_big, h_zero) = out
    return (not f_strict and f_zero) and (h_strict and h_big)


def crit_5_strictness_criterion():
    ok, detail = _suite_line(run_suite("strictness_criterion", 25, SEED),
                             run_suite("strictness_criterion_sym", 25, SEED))
    directions = {k.value: _criterion_directions(k) for k in (ISO, SYM)}
    return ok and all(directions.values()), f"{detail}; both directions {directions}"


def crit_6_lemma_ranks():
    iso_ok = iso_n = sym_ok = sym_n = 0
    for m in (2, 3, 4):
        p = gen_jordan_iso(m)
        for t in (m - 1, m, m + 1):
            for sign in (1, -1):
                iso_n += 1
                iso_ok += lemma_independence_rank(p, ISO, t=t, sign=sign) == (m, m)
        for family in ("left", "right"):
            sym_n += 1
            sym_ok += lemma_independence_rank(p, SYM, family=family) == (m, m)
    return iso_ok == iso_n and sym_ok == sym_n, f"isometric {iso_ok}/{iso_n}, symmetric {sym_ok}/{sym_n}"


def crit_7_inverse():
    return _suite_line(run_suite("inverse_iso", 50, SEED), run_suite("inverse_sym", 50, SEED))


def crit_8_expansion():
    passed, worst = 0, 0.0
    for m in (2, 3, 4):
        p = gen_jordan_iso(m)
        for n in (m, 2 * m, 3 * m):
            res, scale = forward_expansion_residual(p, m, n, return_scale=True)
            worst = max(worst, res / scale)
            passed += res <= 1e-9 * scale
    return passed == 9, f"{passed}/9, worst relative residual {worst:.1e}"


def crit_9_cli():
    checks = {}
    for name in ("jordan3.json", "f1.json", "f2.json"):
        text = (FIX / name).read_text()
        checks[f"round trip {name}"] = serialize_document(parse_document(text)) == text

    def run(*argv):
        return dispatch([a.replace("@", str(FIX) + "/") for a in argv])

    code, out, _ = run("order", "--kind", "iso", "--pair", "@jordan3.json", "--max", "10", "--json")
    checks["order example"] = code == 0 and json.loads(out)["strict_order"] == 3
    code, out, _ = run("check", "--kind", "iso", "--m", "2", "--pair", "@jordan3.json", "--json")
    checks["check example"] = code == 1 and json.loads(out)["verdict"] is False
    code, out, _ = run("decompose", "--kind", "iso", "--left", "@f1.json", "--right", "@f2.json", "--json")
    doc = json.loads(out) if code == 0 else {}
    checks["decompose example"] = (doc.get("c"), doc.get("m1"), doc.get("m2")) == ([2.0, 0.0], 2, 3)
    golden = {"order_jordan3.json": ("order", "--kind", "iso", "--pair", "@jordan3.json", "--max", "10", "--json"),
              "check_jordan3_m2.json": ("check", "--kind", "iso", "--m", "2", "--pair", "@jordan3.json", "--json"),
              "decompose_c2.json": ("decompose", "--kind", "iso", "--left", "@f1.json", "--right", "@f2.json",
                                    "--json")}
    for name, argv in golden.items():
        checks[f"golden {name}"] = run(*argv)[1] == (FIX / "golden" / name).read_text()
    table = {0: ("order", "--pair", "@jordan3.json"),
             1: ("check", "--m", "1", "--pair", "@jordan3.json"),
             2: ("order", "--no-such-flag"),
             3: ("order", "--pair", "@bad_arity.json"),
             4: ("decompose", "--kind", "sym", "--left", "@singular_sum.json", "--right", "@f2.json")}
    for code, argv in table.items():
        checks[f"exit {code}"] = run(*argv)[0] == code
    bad = [k for k, v in checks.items() if not v]
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} checks" + (f"; failed {bad}" if bad else "")


CRITERIA = [
    (1, "oracle equivalence", crit_1_oracle),
    (2, "product pairs", crit_2_products),
    (3, "two-of-three", crit_3_two_of_three),
    (4, "direct-sum counterexample and tensor lift", crit_4_counterexample),
    (5, "strictness criterion", crit_5_strictness_criterion),
    (6, "independence ranks", crit_6_lemma_ranks),
    (7, "inverse problem", crit_7_inverse),
    (8, "expansion identity", crit_8_expansion),
    (9, "CLI contract", crit_9_cli),
]


def _line(number, name, ok, detail):
    return f"[acceptance {number}] {name}: {'PASS' if ok else 'FAIL'} ({detail})"


@pytest.mark.parametrize("number, name, check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, name, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(number, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for number, name, check in CRITERIA:
        ok, detail = check()
        results.append(ok)
        print(_line(number, name, ok, detail))
    sys.exit(0 if all(results) else 1)
