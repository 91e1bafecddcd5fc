"""Acceptance suite: one check per criterion, each printed as a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

import contextlib
import io
import itertools
import json
import math
import random
import sys
import time

import pytest

from gammasum import cli, quadrature, specfun
from gammasum import identities as ids

RESULTS = {}


def _points(identity, **axes):
    keys = list(axes)
    return [(identity, dict(zip(keys, combo))) for combo in itertools.product(*axes.values())]


def _all_passed(reports):
    bad = [r for r in reports if not r.passed]
    worst = max((r.rel_err for r in reports if math.isfinite(r.rel_err)), default=0.0)
    return not bad, f"{len(reports) - len(bad)}/{len(reports)} passed, worst rel_err {worst:.2e}"


def criterion_1():
    pts = []
    for a in (0.25, 0.5, 0.75, 1.0):
        for b in (0.25, 1.0, 4.0):
            for c in sorted({1 / a, 1 / a + 0.5, 2 / a, 10.0}):
                if (a, c) != (1.0, 1.0):
                    pts.append(("thm1_series", {"a": a, "b": b, "c": c}))
    t0 = time.perf_counter()
    reps = ids.run_suite(pts)
    elapsed = time.perf_counter() - t0
    # restate the criterion's own bound: 1e-7 (1 + |value|) + composed budgets
    bound_ok = all(r.abs_err <= 1e-7 * (1 + abs(r.rhs)) + float(r.note.split("budget=")[1])
                   for r in reps)
    ok, detail = _all_passed(reps)
    return ok and bound_ok and elapsed <= 120, f"{detail}, {elapsed:.1f} s"


def criterion_2():
    reps = ids.run_suite(_points("thm1_closed_form", b=[0.25, 1, 4], c=[1.25, 2, 5]))
    ok, detail = _all_passed(reps)
    return ok and all(r.tol == 1e-9 for r in reps), detail


def criterion_3():
    classified = ids.classify_convergence(1, 1) is ids.Convergence.DIVERGENT
    n_hit, partial, first = ids.divergence_witness(1.0, n_max=200, factor=10.0)
    try:
        quadrature.rhs_integral(1, 1, 1)
        raised = False
    except ids.DivergentError:
        raised = True
    ok = classified and n_hit is not None and n_hit <= 200 and raised
    return ok, f"Divergent={classified}, partial sum {partial:.4g} > 10 x {first:.4g} at N={n_hit}, domain error={raised}"


def criterion_4():
    grid = dict(n=list(range(1, 9)), b=[0.5, 1, 2, 4])
    reps = ids.run_suite(_points("bessel_term", **grid) + _points("j_dorder_fd", **grid)
                         + _points("h_dorder_fd", **grid))
    ok, detail = _all_passed(reps)
    return ok and all(r.tol == 1e-6 for r in reps), detail


def criterion_5():
    reps = ids.run_suite(_points("general_s", s=[0.3, 1.7, 2.2, 3.9], b=[0.5, 2]))
    ok, detail = _all_passed(reps)
    return ok and all(r.tol == 1e-7 for r in reps), detail


def criterion_6():
    reps = ids.run_suite(_points("thm2", b=[0.5, 1, 2, 4], c=[0.1, 0.5, 0.9]))
    ok, detail = _all_passed(reps)
    return ok and all(r.tol == 1e-6 for r in reps), detail


def criterion_7():
    reps = ids.run_suite(_points("jcos", b=[0.5, 1, 2, 4], c=[0.1, 0.5, 0.9]))
    ok, detail = _all_passed(reps)
    return ok and all(r.tol == 1e-8 for r in reps), detail


def criterion_8():
    norm = ids.run_suite(_points("mixture_norm", **{"lambda": [0.5, 1, 2.5]}))
    steps = ids.run_suite(_points("mixture_quadrature", a=[0.5, 1], b=[1, 4], **{"lambda": [0.5, 1.5]}))
    suite = cli.load_default_suite()["suite"]
    mc_pts = [(g["identity"], p) for g in suite if g["identity"] in ("thm1_expectation", "mixture_mc")
              for p in cli._expand(g)]
    ctx = ids.SuiteContext(seed=42, n_mc=10 ** 6)
    mc = ids.run_suite(mc_pts, ctx)
    again = ids.run_suite(mc_pts, ctx)
    reproducible = [r.to_dict() for r in mc] == [r.to_dict() for r in again]
    fractions = {}
    for name in ("thm1_expectation", "mixture_mc"):
        fam = [r for r in mc if r.identity == name]
        fractions[name] = (sum(r.passed for r in fam), len(fam))
    mc_ok = all(k >= 0.95 * n and n == 20 for k, n in fractions.values())
    ok = _all_passed(norm)[0] and _all_passed(steps)[0] and mc_ok and reproducible
    detail = (f"norm {_all_passed(norm)[1]}; density=conditioning {_all_passed(steps)[1]}; "
              + "; ".join(f"{k} {a}/{n} within 4 SE" for k, (a, n) in fractions.items())
              + f"; reproducible={reproducible}")
    return ok, detail


def criterion_9():
    t0 = time.perf_counter()
    rng = random.Random(9)
    failures = []
    for _ in range(200):
        p = rng.uniform(-5, 5)
        if abs(p - round(p)) < 1e-3:
            continue
        x = rng.uniform(0.01, 20)
        g1 = specfun.upper_gamma(p + 1, x).value
        if abs(g1 - p * specfun.upper_gamma(p, x).value - x ** p * math.exp(-x)) > 1e-10 * (1 + abs(g1)):
            failures.append(("recurrence", p, x))
    for n in range(1, 11):
        for x in (0.1, 1.0, 5.0):
            g = specfun.upper_gamma(1 - n, x).value
            e = x ** (1 - n) * specfun.exp_integral_en(n, x).value
            if abs(g - e) > 1e-10 * abs(e):
                failures.append(("E_n", n, x))
    for n in range(1, 7):
        for z in (0.5, 2.0, 7.0):
            jp = specfun.bessel_j(n, z).value
            scale = max(abs(jp), 1.0)
            if abs(specfun.bessel_j(-n, z).value - (-1) ** n * jp) > 1e-12 * scale:
                failures.append(("J_-n", n, z))
            jh = specfun.bessel_j(n - 0.5, z).value
            if abs(specfun.struve_h(0.5 - n, z).value - (-1) ** (n - 1) * jh) > 1e-12 * max(abs(jh), 1.0):
                failures.append(("H_1/2-n", n, z))
    for z in (0.1, 1.3, 4.0, 9.0, 60.0):
        if specfun.si_shifted(z) != specfun.sine_integral(z) - math.pi / 2:
            failures.append(("si", z))
    for z in (0.2, 1.0, 2.0, 4.0):
        closed = math.sqrt(math.pi / 2) * math.exp(-z) / math.sqrt(z)
        if abs(specfun.bessel_k(0.5, z).value - closed) > 1e-10 * closed:
            failures.append(("K_1/2", z))
    elapsed = time.perf_counter() - t0
    return not failures and elapsed <= 10, f"{len(failures)} failures {failures[:3]}, {elapsed:.2f} s"


def _cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


def criterion_10():
    code, first = _cli(["verify", "--format", "json"])
    code2, second = _cli(["verify", "--format", "json"])
    reports = cli.reports_from_json(first)
    covered = {r.identity for r in reports}
    needed = set(ids.IDENTITIES)
    json_rt = cli.to_json([r.to_dict() for r in reports]) == first
    rows = [r.to_dict() for r in reports]
    csv_text = cli.to_csv(rows, cli.REPORT_FIELDS)
    csv_rt = cli.to_csv([r.to_dict() for r in cli.reports_from_csv(csv_text)], cli.REPORT_FIELDS) == csv_text
    keys_ok = all(list(d) == list(cli.REPORT_FIELDS) for d in json.loads(first))
    ok = code == 0 and code2 == 0 and first == second and covered == needed and json_rt and csv_rt and keys_ok
    return ok, (f"exit {code}, {len(reports)} reports over {len(covered)} identities, "
                f"byte-identical rerun={first == second}, json/csv round-trip={json_rt}/{csv_rt}")


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


def run_criterion(k):
    try:
        ok, detail = CRITERIA[k]()
    except Exception as exc:  # report, do not hide
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[k] = line
    print(line)
    return ok, line


@pytest.mark.parametrize("k", list(CRITERIA))
def test_criterion(k):
    ok, line = run_criterion(k)
    assert ok, line


if __name__ == "__main__":
    outcomes = [run_criterion(k)[0] for k in CRITERIA]
    sys.exit(0 if all(outcomes) else 1)
