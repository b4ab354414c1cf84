"""One-dimensional determinant families and the Kitaev-condition diagnostic.

Lattice conventions: sites k in Z, the bilateral shift acts as S d_k = d_(k+1).
With this convention the commutator of a diagonal D and the shift is again
diagonal, with entries built from neighbouring ratios, and its Fredholm
determinant telescopes to a ratio of asymptotic limits.
"""

from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

from kitaevlab import opnum
from kitaevlab.experiments.report import ExperimentReport, StepProfile, complex_out

DEFAULT_SIZES = (64, 128, 256)


def lattice(n: int) -> np.ndarray:
    """Sites -n/2 .. n/2 - 1 (centered window of n sites)."""
    return np.arange(n) - n // 2


def periodic_shift(n: int) -> np.ndarray:
    """Bilateral shift on a ring of n sites; the seam sits at the window edge."""
    return np.roll(np.eye(n, dtype=complex), 1, axis=0)


def _tail_bound(entries_fn, lo: int, hi: int, reach: int) -> float:
    ks = np.concatenate([np.arange(lo - reach, lo), np.arange(hi + 1, hi + 1 + reach)])
    return float(np.sum(np.abs(entries_fn(ks) - 1.0)))


def _diagonal_operator(entries_fn, n: int, reach: int) -> opnum.WindowedOperator:
    ks = lattice(n)
    lo, hi = int(ks[0]), int(ks[-1])
    return opnum.WindowedOperator(
        window=(lo, hi),
        block=np.diag(entries_fn(ks)),
        tail="diagonal-with-limit",
        limits=(1.0, 1.0),
        tail_bound=_tail_bound(entries_fn, lo, hi, reach),
    )


def kitaev_condition_report(U, V, windows: Sequence[int], rel_tol: float = 1e-3,
                            inverses=None) -> ExperimentReport:
    """Trace-norm partial sums of (U-1)(V-1), (V-1)(U-1) and UVU^-1V^-1 - 1.

    U and V are dense sections (periodic for bilateral operators) or
    WindowedOperators; compressions are to centered windows.  The report
    passes when the implication "first two bounded => third bounded" holds.
    ``inverses`` may supply (U^-1, V^-1) when they are known exactly.
    """
    if isinstance(U, opnum.WindowedOperator):
        U = U.block
    if isinstance(V, opnum.WindowedOperator):
        V = V.block
    U = opnum.dense(U)
    V = opnum.dense(V)
    if U.shape != V.shape:
        raise ValueError("U and V must have the same shape")
    n = U.shape[0]
    eye = np.eye(n)
    Ui, Vi = inverses if inverses is not None else (np.linalg.inv(U), np.linalg.inv(V))
    comm = U @ V @ opnum.dense(Ui) @ opnum.dense(Vi)
    ops = {
        "(U-1)(V-1)": (U - eye) @ (V - eye),
        "(V-1)(U-1)": (V - eye) @ (U - eye),
        "UVU^-1V^-1-1": comm - eye,
    }
    partials = {name: opnum.trace_norm_partials(t, windows) for name, t in ops.items()}
    bounded = {name: opnum.is_bounded(p, rel_tol) for name, p in partials.items()}
    kitaev = bounded["(U-1)(V-1)"] and bounded["(V-1)(U-1)"]
    implication = (not kitaev) or bounded["UVU^-1V^-1-1"]
    value = {"kitaev_holds": kitaev, "commutator_bounded": bounded["UVU^-1V^-1-1"]}
    diagnostics = {"windows": [int(w) for w in windows],
                   "partials": partials, "bounded": bounded}
    if bounded["UVU^-1V^-1-1"]:
        sl = opnum.centered_window(n, int(max(windows)))
        value["det"] = complex_out(opnum.lu_det(comm[sl, sl]))
    return ExperimentReport("kitaev-report", {"n": n}, value, {"implication": True},
                            0.0, bool(implication), diagnostics)


# --- diagonal / shift -------------------------------------------------------------

def diag_profile(a: complex, b: complex, scale: float = 4.0):
    """d_k interpolating a (k -> -inf) to b (k -> +inf) through nonzero values."""
    if a == 0 or b == 0:
        raise ValueError("limits must be nonzero")
    la, lb = cmath.log(a), cmath.log(b)

    def d(k):
        s = 0.5 * (1.0 + np.tanh(np.asarray(k, dtype=float) / scale))
        return np.exp(la + (lb - la) * s)
    return d


def exp_diag_shift(a: complex = 2.0, b: complex = 1.0, sizes: Sequence[int] = DEFAULT_SIZES,
                   scale: float = 2.0, tolerance: float = 1e-8, det_tol: float = 1e-10,
                   kitaev_windows: Sequence[int] | None = None) -> ExperimentReport:
    """U = bilateral shift, V = diag(d_k): det of UVU^-1V^-1 against a / b."""
    d = diag_profile(a, b, scale)

    def entries(k):
        k = np.asarray(k)
        return d(k - 1) / d(k)

    op = _diagonal_operator(entries, max(sizes), reach=int(40 * scale) + 64)
    est = opnum.fredholm_det(op, sizes, det_tol)
    ref = complex(a) / complex(b)

    windows = list(kitaev_windows or sizes)
    n_big = 2 * max(windows)
    dk = d(lattice(n_big))
    shift = periodic_shift(n_big)
    kit = kitaev_condition_report(shift, np.diag(dk), windows, inverses=(shift.T, np.diag(1 / dk)))

    ok = abs(est.value - ref) <= tolerance
    return ExperimentReport(
        "diag-shift",
        {"a": complex_out(a), "b": complex_out(b), "scale": scale, "sizes": list(map(int, sizes))},
        complex_out(est.value), complex_out(ref), tolerance, bool(ok),
        {
            "window_sequence": [[n, complex_out(v)] for n, v in est.window_sequence],
            "cauchy_gap": est.cauchy_gap,
            "converged": est.converged,
            "tail_bound": op.tail_bound,
            "kitaev": kit.as_dict(),
        },
    )


# --- phase step -------------------------------------------------------------------

def exp_phase_step(profile: StepProfile = StepProfile(), sizes: Sequence[int] = DEFAULT_SIZES,
                   tolerance: float = 1e-8, det_tol: float = 1e-10,
                   kitaev_windows: Sequence[int] | None = None) -> ExperimentReport:
    """U = diag(exp(2 pi i F(k))), V = shift: det of the commutator against exp(2 pi i w)."""
    F = profile

    def entries(k):
        k = np.asarray(k, dtype=float)
        return np.exp(2j * np.pi * (F(k) - F(k - 1)))

    op = _diagonal_operator(entries, max(sizes), reach=int(60 * profile.scale) + 64)
    est = opnum.fredholm_det(op, sizes, det_tol)
    ref = cmath.exp(2j * math.pi * profile.winding)

    windows = list(kitaev_windows or sizes)
    n_big = 2 * max(windows)
    Umat = np.diag(np.exp(2j * np.pi * F(lattice(n_big))))
    Vmat = periodic_shift(n_big)
    kit = kitaev_condition_report(Umat, Vmat, windows, inverses=(Umat.conj(), Vmat.T))

    # independent route: the dense commutator diagonal on the central window
    n_route = max(sizes) + 8
    Ur = np.diag(np.exp(2j * np.pi * F(lattice(n_route))))
    Vr = periodic_shift(n_route)
    comm = Ur @ Vr @ np.linalg.inv(Ur) @ np.linalg.inv(Vr)
    sl = opnum.centered_window(n_route, max(sizes))
    dense_gap = float(np.max(np.abs(np.diag(comm)[sl] - entries(lattice(max(sizes))))))

    integral = abs(profile.winding - round(profile.winding)) < 1e-12
    kitaev_ok = kit.value["kitaev_holds"] == integral
    ok = abs(est.value - ref) <= tolerance and kitaev_ok
    return ExperimentReport(
        "phase-step",
        {"kind": profile.kind, "scale": profile.scale, "w": profile.winding,
         "sizes": list(map(int, sizes))},
        complex_out(est.value), complex_out(ref), tolerance, bool(ok),
        {
            "window_sequence": [[n, complex_out(v)] for n, v in est.window_sequence],
            "cauchy_gap": est.cauchy_gap,
            "converged": est.converged,
            "tail_bound": op.tail_bound,
            "kitaev_expected": integral,
            "dense_route_gap": dense_gap,
            "kitaev": kit.as_dict(),
        },
    )


# --- Toeplitz / Helton-Howe ----------------------------------------------------------

def exp_toeplitz_hh(a: float = 1.0, b: float = 1.0, corner: int = 64, pad: int = 192,
                    tolerance: float = 1e-3, pad_tol: float = 1e-10) -> ExperimentReport:
    """det(e^A e^B e^-A e^-B) for A = aS, B = bS* on the half-line versus exp(-ab).

    SS* = 1 - e_0 e_0* and S*S = 1 give Tr[A, B] = -ab.
    """
    if corner < 8:
        raise ValueError("corner must be at least 8")
    if pad < 2 * corner:
        raise ValueError("pad must be at least 2 * corner")
    factors = [opnum.exp_shift_factor(a), opnum.exp_shift_factor(b, adjoint=True),
               opnum.exp_shift_factor(-a), opnum.exp_shift_factor(-b, adjoint=True)]
    block, pad_err = opnum.padded_product(factors, corner, pad, pad_tol, return_error=True)
    op = opnum.WindowedOperator((0, corner - 1), block, tail="identity", anchor="left")
    schedule = sorted({max(1, corner // 4), corner // 2, corner})
    est = opnum.fredholm_det(op, schedule)
    ref = math.exp(-a * b)
    logdet = cmath.log(est.value) if est.value != 0 else complex("-inf")
    err = abs(logdet + a * b)
    partials = opnum.trace_norm_partials(block - np.eye(corner), schedule, anchor="left")
    return ExperimentReport(
        "toeplitz",
        {"a": a, "b": b, "corner": corner, "pad": pad},
        complex_out(est.value), ref, tolerance, bool(err <= tolerance),
        {
            "log_det_error": err,
            "pad_error": pad_err,
            "window_sequence": [[n, complex_out(v)] for n, v in est.window_sequence],
            "cauchy_gap": est.cauchy_gap,
            "trace_norm_partials": partials,
        },
    )
