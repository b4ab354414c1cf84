"""The verification suites behind ``kitaevlab verify``.

Each criterion returns a JSON-friendly record.  Pseudo-randomness is confined
to the property suites and always flows from an explicit seed, so a given
seed yields byte-identical records.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from kitaevlab import opnum, steinberg
from kitaevlab.experiments import (
    HofstadterConfig,
    StepProfile,
    exp_diag_shift,
    exp_hofstadter_chern,
    exp_phase_step,
    exp_toeplitz_hh,
)
from kitaevlab.steinberg import ProofStep, StGenerator
from kitaevlab.symring import ONE, RingElement, check_kitaev_pair, render, u_pow, v_pow

SUITES = ("symbolic", "numeric", "hall", "determinism")


@dataclass
class CriterionResult:
    number: int
    name: str
    suite: str
    passed: bool
    budget: float | None
    details: dict[str, Any] = field(default_factory=dict)
    seconds: float | None = None
    within_budget: bool | None = None

    def as_dict(self, timing: bool = False) -> dict:
        return {
            "id": self.number,
            "name": self.name,
            "suite": self.suite,
            "pass": self.passed,
            "budget_seconds": self.budget,
            "seconds": round(self.seconds, 3) if timing and self.seconds is not None else None,
            "within_budget": self.within_budget if timing else None,
            "details": self.details,
        }


# --- random generators ------------------------------------------------------------

def random_element(rng: random.Random, max_terms: int = 3, max_exp: int = 3,
                   max_coeff: int = 3) -> RingElement:
    exps = [e for e in range(-max_exp, max_exp + 1) if e]

    def side():
        return {rng.choice(exps): rng.randint(-max_coeff, max_coeff)
                for _ in range(rng.randint(0, max_terms))}
    return RingElement.from_terms(rng.randint(-max_coeff, max_coeff), side(), side())


def random_word(rng: random.Random, length: int) -> tuple[StGenerator, ...]:
    out = []
    for _ in range(length):
        i, j = rng.sample(range(1, steinberg.N + 1), 2)
        arg = random_element(rng, max_terms=1, max_exp=2, max_coeff=2)
        out.append(StGenerator(i, j, arg if not arg.is_zero() else ONE))
    return tuple(out)


def _unit_pairs() -> list[tuple[RingElement, RingElement]]:
    pairs = []
    for a in (-2, -1, 1, 2):
        for b in (-2, -1, 1, 2):
            pairs.append((u_pow(a), v_pow(b)))
            pairs.append((v_pow(b), u_pow(a)))
    for x, y in pairs:
        check_kitaev_pair(x, y)
    return pairs


UNIT_PAIRS = _unit_pairs()


def legal_steps(w, rng: random.Random) -> list[ProofStep]:
    """Every positional move that applies to ``w`` plus a few global ones."""
    steps = []
    n = len(w)
    for p in range(1, n + 1):
        g = w[p - 1]
        if g.arg.is_zero():
            steps.append(ProofStep("delzero", p))
        a = random_element(rng, max_terms=1, max_exp=2, max_coeff=2)
        steps.append(ProofStep("split", p, split=(a, g.arg - a)))
        if p < n:
            h = w[p]
            if (g.i, g.j) == (h.i, h.j):
                steps.append(ProofStep("merge", p))
            if g.i != h.j and g.j != h.i:
                steps.append(ProofStep("swap", p))
            if g.j == h.i and g.i != h.j:
                steps.append(ProofStep("push-inner", p))
            if g.i == h.j and g.j != h.i:
                steps.append(ProofStep("push-outer", p))
        if p + 1 < n:
            c, h, g2 = w[p - 1], w[p], w[p + 1]
            for kind, fn in (("push-inner-inv", steinberg._push_inner),
                             ("push-outer-inv", steinberg._push_outer)):
                try:
                    if fn(g2, h) == c:
                        steps.append(ProofStep(kind, p))
                except steinberg.IllegalStep:
                    pass
    i, j = rng.sample(range(1, steinberg.N + 1), 2)
    steps.append(ProofStep("inszero", rng.randint(1, n + 1), indices=(i, j)))
    perm = list(range(1, steinberg.N + 1))
    rng.shuffle(perm)
    steps.append(ProofStep("perm", perm=tuple(perm)))
    steps.append(ProofStep("subst", units=rng.choice(UNIT_PAIRS)))
    if steinberg.is_identity(steinberg.st_matrix_image(w)) and n:
        steps.append(ProofStep("rotate", offset=rng.randint(1, n)))
    return steps


# --- criteria ------------------------------------------------------------------------

def _builtin(name: str, target: str, expect_start: int) -> dict:
    script = steinberg.load_builtin(name)
    rep = steinberg.check_script(script, "strict")
    target_ok = steinberg.render_word(script.target) == target
    rotations = sum(1 for s in script.steps if s.kind == "rotate")
    return {
        "pass": rep.passed and target_ok and len(script.start) == expect_start
        and rep.rotations_verified == rotations,
        "steps": len(script.steps),
        "start_length": len(script.start),
        "target": steinberg.render_word(script.target),
        "target_matches": target_ok,
        "rotations": rotations,
        "rotations_verified": rep.rotations_verified,
        "report": rep.as_dict(),
    }


def crit_prop22(seed: int) -> dict:
    return _builtin("prop22", "x32(1 - u^-1) x23(-1 + v) x32(-1 + u^-1) x23(1 - v)", 16)


def crit_thm32(seed: int) -> dict:
    out = _builtin("thm32", "x12(-1 + u) x21(-1 + v) x12(1 - u) x21(1 - v)", 16)
    out["pass"] = out["pass"] and out["rotations"] >= 1
    return out


def ring_suite(samples: int = 10_000, seed: int = 0) -> dict:
    rng = random.Random(seed)
    failures = []
    for n in range(samples):
        a, b, c = (random_element(rng) for _ in range(3))
        ab, bc = a * b, b * c
        checks = {
            "assoc": ab * c == a * bc,
            "left-distrib": a * (b + c) == ab + a * c,
            "right-distrib": (a + b) * c == a * c + bc,
            "comm": ab == b * a,
        }
        bad = [k for k, ok in checks.items() if not ok]
        if bad and len(failures) < 5:
            failures.append({"sample": n, "laws": bad,
                             "a": render(a), "b": render(b), "c": render(c)})
    ideal_bad = []
    exps = [e for e in range(-3, 4) if e]
    for a in exps:
        for b in exps:
            x, y = u_pow(a) - ONE, v_pow(b) - ONE
            if not ((x * y).is_zero() and (y * x).is_zero()):
                ideal_bad.append([a, b])
    return {"pass": not failures and not ideal_bad, "samples": samples,
            "failures": failures, "ideal_pairs_checked": len(exps) ** 2,
            "ideal_failures": ideal_bad}


def crit_ring(seed: int) -> dict:
    return ring_suite(10_000, seed)


def relation_suite(steps: int = 1000, seed: int = 0, restart: int = 8) -> dict:
    rng = random.Random(seed)
    symbol = steinberg.steinberg_symbol_word()
    kinds: dict[str, int] = {}
    failures = []
    w = ()
    for n in range(steps):
        if n % restart == 0:
            w = symbol if rng.random() < 0.25 else random_word(rng, rng.randint(2, 6))
        options = legal_steps(w, rng)
        kind = rng.choice(sorted({s.kind for s in options}))
        step = rng.choice([s for s in options if s.kind == kind])
        before = steinberg.st_matrix_image(w)
        w2 = steinberg.apply_step(w, step, "strict")
        if steinberg.st_matrix_image(w2) != steinberg.image_after(step, before):
            if len(failures) < 5:
                failures.append({"step": n, "move": steinberg.render_step(step),
                                 "word": steinberg.render_word(w)})
        kinds[step.kind] = kinds.get(step.kind, 0) + 1
        w = w2
    return {"pass": not failures, "steps": steps,
            "kinds": dict(sorted(kinds.items())), "failures": failures}


def crit_relations(seed: int) -> dict:
    return relation_suite(1000, seed)


def crit_positive(seed: int) -> dict:
    rows = []
    for w in (-2, -1, 0, 1, 2):
        for scale in (2.0, 6.0):
            r = exp_phase_step(StepProfile("tanh", scale, w), sizes=(64, 128, 256))
            d = r.diagnostics
            dv = complex(*r.value) if isinstance(r.value, list) else complex(r.value)
            rows.append({"w": w, "scale": scale, "det_error": abs(dv - 1),
                         "kitaev_bounded": d["kitaev"]["value"]["kitaev_holds"],
                         "pass": r.passed})
    return {"pass": all(r["pass"] and r["det_error"] <= 1e-8 and r["kitaev_bounded"] for r in rows),
            "rows": rows}


def crit_sharpness(seed: int) -> dict:
    half = exp_phase_step(StepProfile("tanh", 6.0, 0.5), sizes=(64, 128, 256))
    hv = complex(*half.value) if isinstance(half.value, list) else complex(half.value)
    kit = half.diagnostics["kitaev"]["value"]
    ds = exp_diag_shift(2.0, 1.0, sizes=(64, 128, 256))
    dv = complex(*ds.value) if isinstance(ds.value, list) else complex(ds.value)
    ok = abs(hv + 1) <= 1e-6 and not kit["kitaev_holds"] and abs(dv - 2) <= 1e-8
    return {"pass": bool(ok),
            "phase_half": {"det_error": abs(hv + 1), "kitaev_holds": kit["kitaev_holds"],
                           "partials": half.diagnostics["kitaev"]["diagnostics"]["partials"]},
            "diag_shift": {"det_error": abs(dv - 2),
                           "kitaev_holds": ds.diagnostics["kitaev"]["value"]["kitaev_holds"]}}


def crit_helton_howe(seed: int) -> dict:
    rows = []
    for a, b in ((1.0, 1.0), (1.0, 2.0), (-1.0, 1.0)):
        r = exp_toeplitz_hh(a, b, corner=64, pad=192)
        rows.append({"a": a, "b": b, "det": r.value, "reference": r.reference,
                     "log_det_error": r.diagnostics["log_det_error"], "pass": r.passed})
    return {"pass": all(r["pass"] for r in rows), "rows": rows}


def crit_hall(seed: int) -> dict:
    main = exp_hofstadter_chern(HofstadterConfig(L=36, p=1, q=3, band=1))
    d = main.diagnostics
    main_ok = main.passed and abs(main.reference) == 1
    L = 36
    full = exp_hofstadter_chern(HofstadterConfig(L=L, band=None, fermi=1e3, diagnose=False))
    stagger = tuple(float((-1) ** (x + y)) for x in range(L) for y in range(L))
    atomic = exp_hofstadter_chern(HofstadterConfig(L=L, band=None, fermi=0.0, hopping=0.0,
                                                   onsite=stagger, diagnose=False))
    controls = {"identity_projector": full.value, "atomic_limit": atomic.value}
    controls_ok = all(abs(v) <= 1e-8 for v in controls.values())
    return {"pass": bool(main_ok and controls_ok), "nu": main.value, "nearest_integer": main.reference,
            "local_marker": d["local_marker"], "window_values": d["window_values"],
            "cauchy_gap": d["cauchy_gap"], "phi_trace_norm_partials": d["phi_trace_norm_partials"],
            "controls": controls}


def _random_invertible(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        m = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
        if np.linalg.cond(m) < 1e3:
            return m


def whitehead_block(U) -> np.ndarray:
    """e21(U^-1) e12(1-U) e21(-1) e12(1-U^-1) as a 2n x 2n block matrix."""
    U = opnum.dense(U)
    n = U.shape[0]
    eye, zero = np.eye(n), np.zeros((n, n))
    Ui = np.linalg.inv(U)

    def e12(t):
        return np.block([[eye, t], [zero, eye]])

    def e21(t):
        return np.block([[eye, zero], [t, eye]])
    return e21(Ui) @ e12(eye - U) @ e21(-eye) @ e12(eye - Ui)


def crit_finite(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    det_err = white_err = 0.0
    for _ in range(100):
        U, V = _random_invertible(rng, 8), _random_invertible(rng, 8)
        comm = U @ V @ np.linalg.inv(U) @ np.linalg.inv(V)
        det_err = max(det_err, abs(opnum.lu_det(comm) - 1))
        target = np.block([[U, np.zeros((8, 8))], [np.zeros((8, 8)), np.linalg.inv(U)]])
        white_err = max(white_err, float(np.max(np.abs(whitehead_block(U) - target))))
    return {"pass": det_err <= 1e-8 and white_err <= 1e-9, "pairs": 100,
            "max_det_error": det_err, "max_whitehead_error": white_err}


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    suite: str
    budget: float
    run: Callable[[int], dict]


CRITERIA = (
    Criterion(1, "prop22 strict derivation", "symbolic", 1.0, crit_prop22),
    Criterion(2, "thm32 commutator of generators", "symbolic", 1.0, crit_thm32),
    Criterion(3, "ring laws and Kitaev ideal", "symbolic", 5.0, crit_ring),
    Criterion(4, "relation soundness under random steps", "symbolic", 10.0, crit_relations),
    Criterion(5, "phase-step determinants for integer winding", "numeric", 5.0, crit_positive),
    Criterion(6, "sharpness: half winding and diag-shift", "numeric", 5.0, crit_sharpness),
    Criterion(7, "Toeplitz exponential commutators", "numeric", 30.0, crit_helton_howe),
    Criterion(8, "Hofstadter quantized trace", "hall", 600.0, crit_hall),
    Criterion(9, "finite-dimensional triviality and Whitehead", "numeric", 5.0, crit_finite),
)


def _run_one(c: Criterion, seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        details = c.run(seed)
        passed = bool(details.pop("pass"))
    except Exception as exc:  # a crash is a failed criterion, not a crashed suite
        details, passed = {"error": f"{type(exc).__name__}: {exc}"}, False
    return CriterionResult(c.number, c.name, c.suite, passed, c.budget, details,
                           time.perf_counter() - t0)


def run_criteria(suite: str | None = None, seed: int = 0, timing: bool = False) -> list[CriterionResult]:
    """Run the criteria of ``suite`` (all when None).

    With ``timing`` the runtime budgets become part of each verdict; without
    it the records stay reproducible byte for byte.
    """
    if suite is not None and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    chosen = [c for c in CRITERIA if suite in (None, c.suite)]
    results = [_run_one(c, seed) for c in chosen]
    if timing:
        for r in results:
            r.within_budget = r.seconds <= r.budget
            r.passed = r.passed and r.within_budget
    if suite in (None, "determinism"):
        results.append(determinism_check(results if suite is None else None, seed))
    return results


def determinism_check(first: list[CriterionResult] | None, seed: int) -> CriterionResult:
    """Rerun every criterion and compare the serialized records byte for byte."""
    t0 = time.perf_counter()
    if first is None:
        first = [_run_one(c, seed) for c in CRITERIA]
    again = [_run_one(c, seed) for c in CRITERIA]
    a = [canonical_json(_comparable(r)) for r in first]
    b = [canonical_json(_comparable(r)) for r in again]
    diff = [r.number for r, x, y in zip(again, a, b) if x != y]
    return CriterionResult(10, "byte-identical records on rerun", "determinism", not diff,
                           None, {"differing_criteria": diff}, time.perf_counter() - t0)


def _comparable(r: CriterionResult) -> dict:
    # the verdict may include the budget check, which depends on wall time
    d = r.as_dict()
    d.pop("pass")
    return d


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)
