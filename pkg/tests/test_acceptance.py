"""Acceptance criteria 1-10, each printing one ``criterion N: PASS|FAIL`` line."""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from betapot import checks
from betapot.cli import main
from betapot.fields import EXAMPLE1_RADIUS
from betapot.metric import BetaParams
from betapot.spaces import lemma1_constant
from betapot.verify import SuiteConfig, run_suite


@pytest.fixture
def report_line(capsys):
    def emit(label, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\ncriterion {label}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip())

    return emit


def _summary(entries) -> str:
    bad = [e.claim_id for e in entries if e.status == "fail"]
    return f"{len(entries)} entries" + (f", failing: {bad}" if bad else "")


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_metric_axioms(report_line):
    es, dt = _timed(lambda: checks.check_metric_axioms(100_000, dims=(1, 2, 3), betas_per_dim=5, seed=0,
                                                       homogeneity_tol=1e-12))
    ids = {e.claim_id for e in es}
    ok = all(e.passed for e in es) and dt < 10 and {"metric.identity", "metric.symmetry",
                                                     "metric.quasi_triangle", "metric.homogeneity"} <= ids
    report_line(1, ok, f"{_summary(es)}, {dt:.1f}s")
    assert ok


def test_criterion_2_isotropic_reduction(report_line):
    es, dt = _timed(lambda: checks.check_isotropic_reduction(n_points=10_000, J=10, rel_tol=5e-3))
    ok = all(e.passed for e in es) and len(es) == 3 and dt < 60
    report_line(2, ok, f"{_summary(es)}, {dt:.1f}s")
    assert ok


def test_criterion_3_jacobian_oracle(report_line):
    def run():
        return [e for bp in (BetaParams((1.0, 1.0)), BetaParams((1.0, 1.5)))
                for e in checks.check_jacobian_mc(bp, 1_000_000, seed=0, n_sigma=3.0)]

    es, dt = _timed(run)
    ok = all(e.passed for e in es) and len(es) == 4 and dt < 120
    report_line(3, ok, f"{_summary(es)}, {dt:.1f}s")
    assert ok


def test_criterion_4_lemma1_inequalities(report_line):
    rep = run_suite("lemma1")
    main_cases = [e for e in rep.entries if not e.claim_id.startswith("lemma1.converse")]
    closed = lemma1_constant(2, 1.5, 1.75, BetaParams.isotropic(2))
    ok = rep.passed and len(main_cases) == 12 and abs(closed - 2**0.5 / (1 - 2**-1.25)) <= 1e-12
    report_line("4 (inequalities, closed-form constant)", ok, f"{_summary(rep.entries)}, C={closed:.12g}")
    assert ok


@pytest.mark.xfail(strict=True, reason="stated constant 2^0.5/(1-2^-0.25) disagrees with the closed form; see ledger")
def test_criterion_4_stated_constant(report_line):
    closed = lemma1_constant(2, 1.5, 1.75, BetaParams.isotropic(2))
    stated = 2**0.5 / (1 - 2**-0.25)
    ok = abs(closed - stated) <= 1e-12
    report_line("4 (stated constant value)", ok, f"closed form {closed:.12g} vs stated {stated:.12g}")
    assert ok


def test_criterion_5_lemma2(report_line):
    rep = run_suite("lemma2")
    closed = next(e for e in rep.entries if e.claim_id == "lemma2[iso,const,p=1.5]")
    c_d = closed.constants["C_d"].value
    ok = rep.passed and len(rep.entries) == 12 and abs(c_d / 2**1.5 - 1) <= 0.01
    report_line(5, ok, f"{_summary(rep.entries)}, C_d(const, iso)={c_d:.6g}")
    assert ok


def test_criterion_6_lemma3(report_line):
    rep = run_suite("lemma3")
    ok = rep.passed and len(rep.entries) == 12 and all(
        e.constants["gamma"].value == 0.5 and e.details["sandwich_brackets_direct"] for e in rep.entries
    )
    report_line(6, ok, _summary(rep.entries))
    assert ok


def test_criterion_7_theorem1(report_line):
    rep = run_suite("theorem1")
    ids = {e.claim_id for e in rep.entries}
    need = {"theorem1.round_trip", "theorem1.balance", "theorem1.superlinear",
            "theorem1[iso,bump,V=1]", "theorem1[iso3,bump,V=example1]"}
    ok = rep.passed and need <= ids
    report_line(7, ok, _summary(rep.entries))
    assert ok


def test_criterion_8_lemma4(report_line):
    rep = run_suite("lemma4", SuiteConfig(lemma4_points=100))
    npts = [len(e.lhs) for e in rep.entries if "equality" not in e.claim_id]
    ok = rep.passed and npts == [100, 100]
    report_line(8, ok, _summary(rep.entries))
    assert ok


def test_criterion_9_example1(report_line):
    rep, dt = _timed(lambda: run_suite("example1"))
    es = {e.claim_id: e for e in rep.entries}
    q = np.asarray(es["example1.iii"].details["quotient"])
    radii = EXAMPLE1_RADIUS * 2.0 ** -np.arange(len(q))
    ok = (
        all(es[k].passed for k in ("example1.i", "example1.ii", "example1.iii"))
        and radii[-1] <= math.exp(-8)
        and bool(np.all(np.diff(q[-9:]) > 0))
        and dt < 300
    )
    report_line(9, ok, f"{_summary(rep.entries)}, {dt:.1f}s")
    assert ok


def test_criterion_10_determinism(report_line, tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = [main(["verify", "--suite", "all", "--seed", "0", "--out", str(p)]) for p in paths]
    capsys.readouterr()
    same = paths[0].read_bytes() == paths[1].read_bytes()
    ok = same and codes == [0, 0]
    report_line(10, ok, f"exit codes {codes}, byte-identical={same}")
    assert ok
