"""Dense complex linear algebra and Fredholm determinants of windowed operators.

Nontrivial determinants only arise from structured trace-class perturbations
(diagonal profiles, corner-supported blocks, padded products).  Truncating U
and V separately always gives det(UVU^-1V^-1) = 1 in finite dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg


class FermiOnEigenvalue(ValueError):
    pass


class NonHermitian(ValueError):
    pass


class NotDeterminantClass(ValueError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, estimate: "DetEstimate"):
        super().__init__(f"determinant not converged (cauchy gap {estimate.cauchy_gap:.3e})")
        self.estimate = estimate


class PadInsufficient(RuntimeError):
    def __init__(self, error: float, tol: float):
        super().__init__(f"corner changed by {error:.3e} between pad and 2*pad (tol {tol:.1e})")
        self.error = error
        self.tol = tol


def dense(m) -> np.ndarray:
    """Square complex array with finite entries."""
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def lu_det(m) -> complex:
    """Determinant by partial-pivot LU with explicit permutation sign."""
    a = dense(m)
    n = a.shape[0]
    det = 1.0 + 0.0j
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if a[piv, k] == 0:
            return 0j
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            det = -det
        det *= a[k, k]
        if k + 1 < n:
            col = a[k + 1:, k] / a[k, k]
            a[k + 1:, k + 1:] -= np.outer(col, a[k, k + 1:])
    return complex(det)


def mat_exp(m) -> np.ndarray:
    return scipy.linalg.expm(dense(m))


@dataclass
class Spectrum:
    evals: np.ndarray
    evecs: np.ndarray
    residual: float

    def gap_at(self, fermi: float) -> float:
        return float(np.min(np.abs(self.evals - fermi))) if self.evals.size else float("inf")

    def projector(self, fermi: float) -> np.ndarray:
        occ = self.evecs[:, self.evals < fermi]
        return occ @ occ.conj().T


def hermitian_spectrum(h, herm_tol: float = 1e-10) -> Spectrum:
    """Eigendecomposition with the max residual ||Hx - lambda x|| reported."""
    a = dense(h)
    if a.size and np.max(np.abs(a - a.conj().T)) > herm_tol:
        raise NonHermitian("matrix is not Hermitian within tolerance")
    evals, evecs = np.linalg.eigh(a)
    if a.size:
        res = float(np.max(np.linalg.norm(a @ evecs - evecs * evals, axis=0)))
    else:
        res = 0.0
    return Spectrum(evals, evecs, res)


def spectral_projector(h, fermi: float, herm_tol: float = 1e-10,
                       gap_tol: float = 1e-8) -> np.ndarray:
    """Orthogonal projector onto eigenvectors of ``h`` with eigenvalue below ``fermi``."""
    spectrum = hermitian_spectrum(h, herm_tol)
    if spectrum.gap_at(fermi) < gap_tol:
        raise FermiOnEigenvalue(f"fermi level {fermi} lies within {gap_tol} of an eigenvalue")
    return spectrum.projector(fermi)


def trace_norm(m) -> float:
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def centered_window(n_total: int, size: int) -> slice:
    if size > n_total:
        raise ValueError(f"window {size} exceeds operator size {n_total}")
    lo = (n_total - size) // 2
    return slice(lo, lo + size)


def trace_norm_partials(t, windows: Sequence, anchor: str = "center") -> list[float]:
    """Singular-value sums of the compressions of ``t`` to growing windows.

    ``windows`` holds sizes (nested blocks anchored at the center or the
    leading corner) or explicit index arrays.  ``t`` may also be a
    WindowedOperator, in which case its block is used.
    """
    if isinstance(t, WindowedOperator):
        anchor = t.anchor
        t = t.block - (np.eye(t.size) if t.tail != "zero" else 0)
    a = np.asarray(t, dtype=complex)
    out = []
    for w in windows:
        if np.isscalar(w):
            w = int(w)
            sl = centered_window(a.shape[0], w) if anchor == "center" else slice(0, w)
            block = a[sl, sl]
        else:
            idx = np.asarray(w, dtype=int)
            block = a[np.ix_(idx, idx)]
        out.append(trace_norm(block))
    return out


def is_bounded(partials: Sequence[float], rel_tol: float = 1e-3, abs_tol: float = 1e-9) -> bool:
    """Empirical boundedness: the last refinement adds (relatively) nothing."""
    if len(partials) < 2:
        return True
    step = partials[-1] - partials[-2]
    return step <= max(abs_tol, rel_tol * max(1.0, abs(partials[-1])))


TAILS = ("identity", "diagonal-with-limit", "zero")


@dataclass
class WindowedOperator:
    """Semi-infinite operator: dense block on a lattice window plus tail behavior.

    ``window`` is the lattice interval ``(lo, hi)`` (inclusive) or an explicit
    site tuple; ``anchor`` says whether sub-windows are taken around the
    center (bilateral lattices) or from the leading corner (half-line).
    """

    window: tuple
    block: np.ndarray
    tail: str = "identity"
    limits: tuple[complex, complex] = (1.0, 1.0)
    tail_bound: float = 0.0
    anchor: str = "center"

    def __post_init__(self):
        self.block = dense(self.block)
        if self.tail not in TAILS:
            raise ValueError(f"tail must be one of {TAILS}")
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")
        if self.anchor not in ("center", "left"):
            raise ValueError("anchor must be 'center' or 'left'")
        w = self.window
        if len(w) == 2 and all(isinstance(k, (int, np.integer)) for k in w):
            expected = int(w[1]) - int(w[0]) + 1
        else:
            expected = len(w)
        if self.block.shape[0] != expected:
            raise ValueError(f"block dimension {self.block.shape[0]} != window size {expected}")

    @property
    def size(self) -> int:
        return self.block.shape[0]

    def sub_block(self, n: int) -> np.ndarray:
        sl = centered_window(self.size, n) if self.anchor == "center" else slice(0, n)
        return self.block[sl, sl]


@dataclass
class DetEstimate:
    value: complex
    window_sequence: list[tuple[int, complex]] = field(default_factory=list)
    converged: bool = False
    cauchy_gap: float = float("inf")


def fredholm_det(op: WindowedOperator, schedule: Sequence[int], tol: float = 1e-10,
                 require_convergence: bool = False) -> DetEstimate:
    """Fredholm determinant of ``op`` = 1 + trace class from growing windows."""
    if op.tail == "zero":
        raise NotDeterminantClass("zero tail: operator is not 1 + trace class")
    if op.tail == "diagonal-with-limit" and not np.allclose(op.limits, 1.0, rtol=0, atol=1e-14):
        raise NotDeterminantClass(f"diagonal tail limits {op.limits} are not 1")
    sizes = sorted(int(n) for n in schedule)
    if not sizes:
        raise ValueError("empty window schedule")
    seq = [(n, lu_det(op.sub_block(n))) for n in sizes]
    vals = [v for _, v in seq[-3:]]
    gap = max((abs(b - a) for a, b in zip(vals, vals[1:])), default=float("inf"))
    est = DetEstimate(seq[-1][1], seq, bool(gap < tol), float(gap))
    if require_convergence and not est.converged:
        raise NoConvergence(est)
    return est


# --- semi-infinite factors on the half-line basis e_0, e_1, ... ----------------

@dataclass(frozen=True)
class HalfLineFactor:
    """Half-line operator given by its n x n leading sections.

    ``decay`` certifies off-diagonal decay ('banded', 'factorial' or
    'exponential'); padded products refuse undeclared factors.
    """

    section: Callable[[int], np.ndarray]
    decay: str = "banded"
    rate: float = 0.0
    name: str = ""


def shift_section(n: int) -> np.ndarray:
    """Unilateral shift S e_k = e_(k+1), leading n x n section."""
    return np.eye(n, k=-1, dtype=complex)


def identity_factor() -> HalfLineFactor:
    return HalfLineFactor(lambda n: np.eye(n, dtype=complex), "banded", 0.0, "1")


def shift_factor(adjoint: bool = False) -> HalfLineFactor:
    if adjoint:
        return HalfLineFactor(lambda n: shift_section(n).T, "banded", 1.0, "S*")
    return HalfLineFactor(shift_section, "banded", 1.0, "S")


def exp_shift_factor(a: complex, adjoint: bool = False) -> HalfLineFactor:
    """exp(a S) or exp(a S*): triangular Toeplitz with entries a^m / m!.

    The exponential of a triangular section is the section of the exponential,
    so ``mat_exp`` of the truncated shift is exact here.
    """
    def section(n: int) -> np.ndarray:
        s = shift_section(n)
        return mat_exp(a * (s.T if adjoint else s))
    return HalfLineFactor(section, "factorial", abs(a), f"exp({a}{'S*' if adjoint else 'S'})")


def _corner_product(factors: Sequence[HalfLineFactor], corner: int, dim: int) -> np.ndarray:
    prod = np.eye(dim, dtype=complex)
    for f in factors:
        prod = prod @ f.section(dim)
    return prod[:corner, :corner]


def padded_product(factors: Sequence[HalfLineFactor], corner: int, pad: int,
                   tol: float = 1e-10, return_error: bool = False):
    """Leading corner x corner block of a product of half-line operators.

    The product is formed on dimension corner + pad; the padding error is the
    max-entry change when the run is repeated with 2 * pad.
    """
    if pad < corner:
        raise ValueError("pad must be at least corner")
    for f in factors:
        if f.decay not in ("banded", "factorial", "exponential"):
            raise ValueError(f"factor {f.name or f} has no certified decay")
    block = _corner_product(factors, corner, corner + pad)
    check = _corner_product(factors, corner, corner + 2 * pad)
    err = float(np.max(np.abs(block - check))) if corner else 0.0
    if err > tol:
        raise PadInsufficient(err, tol)
    return (block, err) if return_error else block
