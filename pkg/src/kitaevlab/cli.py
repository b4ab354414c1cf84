"""Command-line entry point: ``kitaevlab check | ring | exp | verify``.

Exit codes: 0 pass, 1 fail, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from typing import Any, Sequence

import numpy as np

from kitaevlab import steinberg, verify
from kitaevlab.experiments import (
    HofstadterConfig,
    StepProfile,
    exp_diag_shift,
    exp_hofstadter_chern,
    exp_phase_step,
    exp_toeplitz_hh,
    kitaev_condition_report,
)
from kitaevlab.experiments.families import diag_profile, lattice, periodic_shift

SCHEMA = "kitaevlab.run/1"
FAMILIES = ("diag-shift", "phase-step", "toeplitz", "chern", "kitaev-report")


class UsageError(Exception):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return vals


def _complex(text: str) -> complex:
    try:
        z = complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return z


def _plain(z: complex):
    return z.real if z.imag == 0 else z


def record(command: Sequence[str], params: dict, payload: dict, seconds: float | None,
           seed: int | None = None) -> dict:
    out = {
        "schema": SCHEMA,
        "command": list(command),
        "params": params,
        "seed": seed,
    }
    out.update(payload)
    out["seconds"] = seconds
    return out


def emit_json(obj: Any, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _fmt(x) -> str:
    # repr of floats is locale independent and round-trips
    return repr(float(x))


# --- check ------------------------------------------------------------------------

def cmd_check(args, argv) -> int:
    src = args.script
    try:
        if src.startswith("builtin:"):
            text = steinberg.builtin_text(src.split(":", 1)[1])
        else:
            with open(src, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, KeyError) as exc:
        print(f"error: cannot read script {src!r}: {exc}", file=sys.stderr)
        return 2
    try:
        script = steinberg.script_parse(text)
    except (steinberg.ScriptSyntaxError, ValueError) as exc:
        print(f"error: {src}: {exc}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    rep = steinberg.check_script(script, args.level)
    seconds = round(time.perf_counter() - t0, 6) if args.timing else None
    level = args.level or script.level
    if args.json:
        d = rep.as_dict()
        emit_json(record(argv, {"script": src, "level": level},
                         {"value": {"steps": len(script.steps), "lengths": d.pop("lengths")},
                          "reference": steinberg.render_word(script.target),
                          "tolerance": 0, "pass": d.pop("pass"), "diagnostics": d},
                         seconds))
    else:
        verdict = "PASS" if rep.passed else "FAIL"
        print(f"{verdict} {src} ({len(script.steps)} steps, level {level})")
        print(f"  start  {steinberg.render_word(script.start)}")
        print(f"  target {steinberg.render_word(script.target)}")
        if rep.rotations_verified:
            print(f"  central rotations verified: {rep.rotations_verified}")
        if not rep.passed:
            print(f"  failed at step {rep.failed_step}: {rep.reason}")
            if rep.expected is not None:
                print(f"  expected {rep.expected}")
                print(f"  actual   {rep.actual}")
    return 0 if rep.passed else 1


# --- ring -------------------------------------------------------------------------

def cmd_ring(args, argv) -> int:
    t0 = time.perf_counter()
    res = verify.ring_suite(args.samples, args.seed)
    seconds = round(time.perf_counter() - t0, 6) if args.timing else None
    from kitaevlab._kernels import BACKEND
    passed = res.pop("pass")
    if args.json:
        emit_json(record(argv, {"samples": args.samples, "backend": BACKEND}, {
            "value": {"failures": len(res["failures"]) + len(res["ideal_failures"])},
            "reference": {"failures": 0}, "tolerance": 0, "pass": passed,
            "diagnostics": res}, seconds, args.seed))
    else:
        print(f"{'PASS' if passed else 'FAIL'} ring selftest: {args.samples} triples, "
              f"{res['ideal_pairs_checked']} ideal pairs, backend {BACKEND}")
        for f in res["failures"]:
            print(f"  sample {f['sample']} broke {', '.join(f['laws'])}: a={f['a']} b={f['b']} c={f['c']}")
        for a, b in res["ideal_failures"]:
            print(f"  (u^{a} - 1)(v^{b} - 1) != 0")
    return 0 if passed else 1


# --- exp --------------------------------------------------------------------------

def _run_family(args):
    fam = args.family
    if fam == "diag-shift":
        return exp_diag_shift(args.a, args.b, sizes=args.sizes or (64, 128, 256),
                              scale=args.scale if args.scale is not None else 2.0,
                              tolerance=args.tol if args.tol is not None else 1e-8)
    if fam == "phase-step":
        prof = StepProfile(args.kind, args.scale if args.scale is not None else 6.0, args.w)
        return exp_phase_step(prof, sizes=args.sizes or (64, 128, 256),
                              tolerance=args.tol if args.tol is not None else 1e-8)
    if fam == "toeplitz":
        return exp_toeplitz_hh(args.a.real, args.b.real, corner=args.corner, pad=args.pad,
                               tolerance=args.tol if args.tol is not None else 1e-3)
    if fam == "chern":
        onsite = None
        hopping = args.hopping
        if args.atomic:
            hopping = 0.0
            onsite = tuple(float((-1) ** (x + y)) for x in range(args.L) for y in range(args.L))
        band = None if args.fermi is not None else args.band
        cfg = HofstadterConfig(L=args.L, p=args.p, q=args.q, band=band, fermi=args.fermi,
                               windows=args.windows or (4, 6, 8, 10), hopping=hopping,
                               onsite=onsite, diagnose=not args.no_diagnose)
        return exp_hofstadter_chern(cfg, tolerance=args.tol if args.tol is not None else 0.05)
    if fam == "kitaev-report":
        windows = args.windows or args.sizes or (64, 128, 256)
        n = 2 * max(windows)
        scale = args.scale if args.scale is not None else 6.0
        if args.pair == "phase-step":
            F = StepProfile(args.kind, scale, args.w)
            U = np.diag(np.exp(2j * np.pi * F(lattice(n))))
            V = periodic_shift(n)
        elif args.pair == "diag-shift":
            U = periodic_shift(n)
            V = np.diag(diag_profile(args.a, args.b, scale)(lattice(n)))
        else:
            U = V = np.eye(n)
        rep = kitaev_condition_report(U, V, windows)
        rep.params.update({"pair": args.pair, "windows": list(windows)})
        return rep
    raise UsageError(f"unknown family {fam!r}")


def _csv_rows(rep) -> tuple[list[str], list[list[str]]]:
    d = rep.diagnostics
    if rep.family == "chern":
        win = rep.params["windows"]
        phi = d.get("phi_trace_norm_partials") or [float("nan")] * len(win)
        return (["family", "window", "nu", "phi_trace_norm"],
                [[rep.family, str(r), _fmt(v), _fmt(p)] for r, v, p in zip(win, d["window_values"], phi)])
    if rep.family == "kitaev-report":
        header = ["family", "window"] + list(d["partials"])
        rows = []
        for k, w in enumerate(d["windows"]):
            rows.append([rep.family, str(w)] + [_fmt(d["partials"][name][k]) for name in d["partials"]])
        return header, rows
    rows = []
    for n, v in d["window_sequence"]:
        z = complex(*v) if isinstance(v, list) else complex(v)
        rows.append([rep.family, str(n), _fmt(z.real), _fmt(z.imag)])
    return ["family", "window", "det_re", "det_im"], rows


def cmd_exp(args, argv) -> int:
    t0 = time.perf_counter()
    try:
        rep = _run_family(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    seconds = round(time.perf_counter() - t0, 6) if args.timing else None
    if args.csv:
        header, rows = _csv_rows(rep)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    elif args.json:
        d = rep.as_dict()
        emit_json(record(argv, d["params"], {
            "family": d["family"], "value": d["value"], "reference": d["reference"],
            "tolerance": d["tolerance"], "pass": d["pass"], "diagnostics": d["diagnostics"]},
            seconds, args.seed))
    else:
        print(f"{'PASS' if rep.passed else 'FAIL'} {rep.family}: value {rep.value} "
              f"reference {rep.reference} tolerance {rep.tolerance}")
    return 0 if rep.passed else 1


# --- verify -----------------------------------------------------------------------

def cmd_verify(args, argv) -> int:
    suite = None if args.all or args.suite is None else args.suite
    results = verify.run_criteria(suite, args.seed, args.timing)
    passed = all(r.passed for r in results)
    if args.json:
        emit_json(record(argv, {"suite": suite or "all"}, {
            "value": [r.as_dict(args.timing) for r in results],
            "reference": None, "tolerance": None, "pass": passed,
            "diagnostics": {"criteria": len(results),
                            "failed": [r.number for r in results if not r.passed]}},
            None, args.seed))
    else:
        for r in results:
            t = f"  {r.seconds:7.2f}s" if args.timing else ""
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.number:2d}  {r.suite:<11} {r.name}{t}")
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kitaevlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check a proof script")
    c.add_argument("script", help="path to a .st file or builtin:<name>")
    c.add_argument("--level", choices=("strict", "det"), default=None)
    c.add_argument("--json", action="store_true")
    c.add_argument("--timing", action="store_true", help="report wall time (breaks byte determinism)")

    r = sub.add_parser("ring", help="ring arithmetic self-test")
    rs = r.add_subparsers(dest="ring_command", required=True)
    st = rs.add_parser("selftest")
    st.add_argument("--samples", type=int, default=10_000)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--json", action="store_true")
    st.add_argument("--timing", action="store_true")

    e = sub.add_parser("exp", help="run a numerical experiment family")
    e.add_argument("family", choices=FAMILIES)
    e.add_argument("--sizes", type=_int_list, default=None, help="window schedule, e.g. 64,128,256")
    e.add_argument("--windows", type=_int_list, default=None)
    e.add_argument("--a", type=_complex, default=None)
    e.add_argument("--b", type=_complex, default=None)
    e.add_argument("--w", type=float, default=1.0, help="winding of the phase step")
    e.add_argument("--scale", type=float, default=None)
    e.add_argument("--kind", choices=("tanh", "erf"), default="tanh")
    e.add_argument("--corner", type=int, default=64)
    e.add_argument("--pad", type=int, default=192)
    e.add_argument("--L", type=int, default=36)
    e.add_argument("--p", type=int, default=1)
    e.add_argument("--q", type=int, default=3)
    e.add_argument("--band", type=int, default=1)
    e.add_argument("--fermi", type=float, default=None)
    e.add_argument("--hopping", type=float, default=1.0)
    e.add_argument("--atomic", action="store_true", help="hopping 0 with staggered onsite energies")
    e.add_argument("--no-diagnose", action="store_true", help="skip the trace-class diagnostic")
    e.add_argument("--pair", choices=("phase-step", "diag-shift", "identity"), default="phase-step")
    e.add_argument("--tol", type=float, default=None)
    e.add_argument("--seed", type=int, default=None, help="recorded only; families are deterministic")
    out = e.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true")
    out.add_argument("--csv", action="store_true")
    e.add_argument("--timing", action="store_true")

    v = sub.add_parser("verify", help="run the verification criteria")
    g = v.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true")
    g.add_argument("--suite", choices=verify.SUITES)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.add_argument("--timing", action="store_true", help="enforce runtime budgets and report times")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    if args.command == "exp":
        defaults = {"diag-shift": (2, 1), "toeplitz": (1, 1), "kitaev-report": (2, 1)}
        da, db = defaults.get(args.family, (1, 1))
        args.a = da if args.a is None else _plain(args.a)
        args.b = db if args.b is None else _plain(args.b)
    handler = {"check": cmd_check, "ring": cmd_ring, "exp": cmd_exp, "verify": cmd_verify}
    return handler[args.command](args, argv)


if __name__ == "__main__":
    sys.exit(main())
