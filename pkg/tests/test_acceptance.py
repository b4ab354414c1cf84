"""Acceptance gate: one test per criterion, each printing a single verdict line."""

import cmath
import json
import subprocess
import sys
import time

import pytest

from kitaevlab import steinberg, verify
from kitaevlab.cli import main
from kitaevlab.experiments import (
    HofstadterConfig,
    StepProfile,
    exp_diag_shift,
    exp_hofstadter_chern,
    exp_phase_step,
    exp_toeplitz_hh,
)
from kitaevlab.symring import ONE, u_pow, v_pow


@pytest.fixture
def report(capsys):
    def emit(number, ok, text, seconds, budget):
        within = seconds < budget
        with capsys.disabled():
            verdict = "PASS" if ok and within else "FAIL"
            limit = f"budget {budget:g}s" if budget != float("inf") else "no budget"
            print(f"\n[criterion {number:2d}] {verdict} {text} ({seconds:.2f}s, {limit})")
        return ok and within
    return emit


def as_complex(v):
    return complex(*v) if isinstance(v, list) else complex(v)


def _check_builtin(name, capsys):
    t0 = time.perf_counter()
    code = main(["check", f"builtin:{name}", "--json"])
    seconds = time.perf_counter() - t0
    rec = json.loads(capsys.readouterr().out)
    return code, rec, seconds


def test_criterion_01_prop22(report, capsys):
    code, rec, seconds = _check_builtin("prop22", capsys)
    script = steinberg.load_builtin("prop22")
    ok = (code == 0 and rec["pass"] and rec["params"]["level"] == "strict"
          and len(script.start) == 16
          and steinberg.render_word(script.target)
          == "x32(1 - u^-1) x23(-1 + v) x32(-1 + u^-1) x23(1 - v)")
    assert report(1, ok, "prop22 strict, 16 -> 4 generators", seconds, 1.0)


def test_criterion_02_thm32(report, capsys):
    code, rec, seconds = _check_builtin("thm32", capsys)
    script = steinberg.load_builtin("thm32")
    rotations = sum(s.kind == "rotate" for s in script.steps)
    ok = (code == 0 and rec["pass"] and rotations >= 1
          and rec["diagnostics"]["rotations_verified"] == rotations
          and steinberg.render_word(script.target) == "x12(-1 + u) x21(-1 + v) x12(1 - u) x21(1 - v)")
    assert report(2, ok, f"thm32 ends at the generator commutator, {rotations} rotation(s) verified",
                  seconds, 1.0)


def test_criterion_03_ring(report):
    t0 = time.perf_counter()
    res = verify.ring_suite(10_000, seed=0)
    exps = [e for e in range(-3, 4) if e]
    ideal = all(((u_pow(a) - ONE) * (v_pow(b) - ONE)).is_zero() for a in exps for b in exps)
    seconds = time.perf_counter() - t0
    ok = res["pass"] and ideal and res["samples"] == 10_000
    assert report(3, ok, "10^4 ring triples exact, Kitaev ideal for |a|,|b| <= 3", seconds, 5.0)


def test_criterion_04_relations(report):
    t0 = time.perf_counter()
    res = verify.relation_suite(1000, seed=0)
    seconds = time.perf_counter() - t0
    assert report(4, res["pass"] and res["steps"] == 1000,
                  f"10^3 random legal steps, {len(res['kinds'])} move kinds", seconds, 10.0)


def test_criterion_05_positive(report):
    t0 = time.perf_counter()
    worst, bounded = 0.0, True
    for w in (-2, -1, 0, 1, 2):
        for scale in (2.0, 6.0):
            r = exp_phase_step(StepProfile("tanh", scale, w), sizes=(64, 128, 256))
            worst = max(worst, abs(as_complex(r.value) - 1))
            bounded &= r.diagnostics["kitaev"]["value"]["kitaev_holds"]
    seconds = time.perf_counter() - t0
    ok = worst <= 1e-8 and bounded
    assert report(5, ok, f"integer windings: max |det - 1| = {worst:.1e}, partials bounded",
                  seconds, 5.0)


def test_criterion_06_sharpness(report):
    t0 = time.perf_counter()
    half = exp_phase_step(StepProfile("tanh", 6.0, 0.5), sizes=(64, 128, 256))
    diverges = not half.diagnostics["kitaev"]["value"]["kitaev_holds"]
    ds = exp_diag_shift(2.0, 1.0, sizes=(64, 128, 256))
    seconds = time.perf_counter() - t0
    e_half = abs(as_complex(half.value) + 1)
    e_ds = abs(as_complex(ds.value) - 2)
    ok = e_half <= 1e-6 and diverges and e_ds <= 1e-8
    assert report(6, ok, f"w=1/2: |det+1| = {e_half:.1e} with divergent partials; "
                  f"diag-shift |det-2| = {e_ds:.1e}", seconds, 5.0)


def test_criterion_07_helton_howe(report):
    t0 = time.perf_counter()
    errs = []
    for a, b in ((1.0, 1.0), (1.0, 2.0), (-1.0, 1.0)):
        r = exp_toeplitz_hh(a, b, corner=64, pad=192)
        errs.append(abs(cmath.log(as_complex(r.value)) + a * b))
    seconds = time.perf_counter() - t0
    ok = max(errs) <= 1e-3
    assert report(7, ok, f"|log det + ab| max {max(errs):.1e} at corner 64, pad 192", seconds, 30.0)


def test_criterion_08_quantized_trace(report):
    t0 = time.perf_counter()
    r = exp_hofstadter_chern(HofstadterConfig(L=36, p=1, q=3, band=1, windows=(4, 6, 8, 10)))
    nu, marker = r.value, r.diagnostics["local_marker"]
    L = 36
    full = exp_hofstadter_chern(HofstadterConfig(L=L, band=None, fermi=1e3, diagnose=False))
    stagger = tuple(float((-1) ** (x + y)) for x in range(L) for y in range(L))
    atomic = exp_hofstadter_chern(HofstadterConfig(L=L, band=None, fermi=0.0, hopping=0.0,
                                                   onsite=stagger, diagnose=False))
    seconds = time.perf_counter() - t0
    n = round(nu)
    ok = (abs(n) == 1 and abs(nu - n) <= 0.05 and abs(nu - marker) <= 0.05
          and abs(full.value) <= 1e-8 and abs(atomic.value) <= 1e-8)
    assert report(8, ok, f"nu = {nu:.4f}, marker = {marker:.4f}, controls "
                  f"{abs(full.value):.0e}/{abs(atomic.value):.0e}", seconds, 600.0)


def test_criterion_09_finite(report):
    t0 = time.perf_counter()
    res = verify.crit_finite(seed=0)
    seconds = time.perf_counter() - t0
    assert report(9, res["pass"], f"100 pairs: max |det - 1| = {res['max_det_error']:.1e}, "
                  f"Whitehead {res['max_whitehead_error']:.1e}", seconds, 5.0)


def test_criterion_10_determinism(report):
    cmd = [sys.executable, "-m", "kitaevlab", "verify", "--all", "--seed", "7", "--json"]
    t0 = time.perf_counter()
    runs = [subprocess.run(cmd, capture_output=True) for _ in range(2)]
    seconds = time.perf_counter() - t0
    same = runs[0].stdout == runs[1].stdout and len(runs[0].stdout) > 0
    rec = json.loads(runs[0].stdout)
    ok = same and all(r.returncode == 0 for r in runs) and rec["pass"]
    assert report(10, ok, f"two 'verify --all --seed 7' runs byte-identical "
                  f"({len(runs[0].stdout)} bytes)", seconds, float("inf"))
