"""Quantized trace 2 pi i Tr[PXP, PYP] for Hofstadter band projectors.

Open L x L square lattice, Landau gauge: horizontal hops carry amplitude -t,
vertical hops from (x, y) to (x, y+1) carry -t exp(2 pi i (p/q) x).  X and Y
indicate the right and upper half-planes, split between the two central
columns and rows so that no site sits on a boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from kitaevlab import opnum
from kitaevlab.experiments.report import ExperimentReport


class GapTooSmall(ValueError):
    pass


class RadiusTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class HofstadterConfig:
    L: int = 36
    p: int = 1
    q: int = 3
    band: int | None = 1
    fermi: float | None = None
    windows: tuple[int, ...] = (4, 6, 8, 10)
    hopping: float = 1.0
    onsite: tuple[float, ...] | None = None
    gauge: str = "landau"
    diagnose: bool = True

    def __post_init__(self):
        if not (0 < self.p < self.q) or math.gcd(self.p, self.q) != 1:
            raise ValueError("flux p/q needs coprime 0 < p < q")
        if self.L < 6 * self.q:
            raise ValueError(f"lattice side L={self.L} must be at least 6q={6 * self.q}")
        if self.gauge != "landau":
            raise ValueError("only the Landau gauge is implemented")
        if (self.band is None) == (self.fermi is None):
            raise ValueError("give exactly one of band or fermi")
        if self.band is not None and not (1 <= self.band < self.q):
            raise ValueError(f"band must lie in 1..{self.q - 1} (a gap must sit above it)")
        if not self.windows or any(r < 1 for r in self.windows):
            raise ValueError("window radii must be positive")
        if max(self.windows) > self.L / 3:
            raise ValueError(f"window radius {max(self.windows)} exceeds L/3 (edge contamination)")
        if self.onsite is not None and len(self.onsite) != self.L * self.L:
            raise ValueError("onsite needs one energy per site")


def site_coords(L: int) -> np.ndarray:
    """(x, y) per site, site index = x * L + y."""
    xs, ys = np.meshgrid(np.arange(L), np.arange(L), indexing="ij")
    return np.stack([xs.ravel(), ys.ravel()], axis=1).astype(float)


def hofstadter_hamiltonian(L: int, p: int, q: int, hopping: float = 1.0,
                           onsite: Sequence[float] | None = None) -> np.ndarray:
    n = L * L
    h = np.zeros((n, n), dtype=complex)
    idx = np.arange(n).reshape(L, L)
    if hopping:
        # x-direction
        a, b = idx[1:, :].ravel(), idx[:-1, :].ravel()
        h[a, b] = -hopping
        h[b, a] = -hopping
        # y-direction with Peierls phase depending on x
        phase = np.exp(2j * np.pi * p / q * np.arange(L))
        up, down = idx[:, 1:], idx[:, :-1]
        ph = np.broadcast_to(phase[:, None], up.shape)
        h[up.ravel(), down.ravel()] = -hopping * ph.ravel()
        h[down.ravel(), up.ravel()] = -hopping * np.conj(ph.ravel())
    if onsite is not None:
        h[np.arange(n), np.arange(n)] += np.asarray(onsite, dtype=float)
    return h


def harper_bands(p: int, q: int, hopping: float = 1.0, nk: int = 61) -> np.ndarray:
    """Bulk magnetic Bloch bands, shape (nk * nk, q), sorted per k."""
    out = []
    ks = np.linspace(-np.pi, np.pi, nk)
    phases = 2 * np.pi * p / q * np.arange(q)
    for kx in ks:
        for ky in ks:
            m = np.diag(-2 * hopping * np.cos(ky + phases)).astype(complex)
            for j in range(q):
                hop = -hopping * (np.exp(1j * kx) if j == q - 1 else 1.0)
                m[(j + 1) % q, j] += hop
                m[j, (j + 1) % q] += np.conj(hop)
            out.append(np.linalg.eigvalsh(m))
    return np.array(out)


def gap_midpoint(p: int, q: int, band: int, hopping: float = 1.0) -> float:
    bands = harper_bands(p, q, hopping)
    top, bottom = bands[:, band - 1].max(), bands[:, band].min()
    if bottom <= top:
        raise GapTooSmall(f"no bulk gap above band {band}")
    return float(0.5 * (top + bottom))


def _center(L: int) -> np.ndarray:
    return np.array([(L - 1) / 2, (L - 1) / 2])


def window_sites(coords: np.ndarray, center: np.ndarray, r: int) -> np.ndarray:
    """Sites of the 2r x 2r square around ``center``."""
    d = np.abs(coords - center)
    return np.where((d[:, 0] < r) & (d[:, 1] < r))[0]


def kitaev_local_marker(P, center, radius: int, coords: np.ndarray | None = None,
                        margin: int = 0) -> float:
    """Three-sector real-space Chern marker of a projector.

    Sites within ``radius`` of ``center`` are split into 120 degree sectors
    A, B, C ordered counterclockwise;
    nu = 12 pi i sum_{j in A, k in B, l in C} (P_jk P_kl P_lj - P_jl P_lk P_kj)
       = -24 pi Im sum P_jk P_kl P_lj.
    """
    P = np.asarray(P, dtype=complex)
    n = P.shape[0]
    if coords is None:
        L = int(round(math.sqrt(n)))
        if L * L != n:
            raise ValueError("coords are required for non-square site sets")
        coords = site_coords(L)
    center = np.asarray(center, dtype=float)
    lo, hi = coords.min(axis=0), coords.max(axis=0)
    if np.any(center - radius - margin < lo) or np.any(center + radius + margin > hi):
        raise RadiusTooLarge(f"radius {radius} with margin {margin} leaves the lattice")
    rel = coords - center
    dist = np.hypot(rel[:, 0], rel[:, 1])
    ang = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * np.pi)
    sector = np.minimum((ang // (2 * np.pi / 3)).astype(int), 2)
    inside = dist <= radius
    A, B, C = (np.where(inside & (sector == s))[0] for s in range(3))
    if not (len(A) and len(B) and len(C)):
        return 0.0
    h = np.einsum("jk,kl,lj->", P[np.ix_(A, B)], P[np.ix_(B, C)], P[np.ix_(C, A)])
    return float(-24 * np.pi * h.imag)


def _exp_2pi_i(h: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(2j * np.pi * evals)) @ evecs.conj().T


@dataclass
class HallTrace:
    nu: list[float]
    marker: float
    fermi: float
    gap: float
    residual: float
    phi_partials: list[float] = field(default_factory=list)


def hall_trace(P: np.ndarray, coords: np.ndarray, center: np.ndarray, windows: Sequence[int],
               diagnose: bool = True) -> tuple[list[float], list[float]]:
    """Window sums of 2 pi i diag[PXP, PYP] and, optionally, the singular-value
    partial sums of (e^A - 1)(e^B - 1) with A = 2 pi i PXP, B = 2 pi i PYP."""
    X = (coords[:, 0] > center[0]).astype(float)
    Y = (coords[:, 1] > center[1]).astype(float)
    PXP = (P * X[None, :]) @ P
    PYP = (P * Y[None, :]) @ P
    # diag of PXP PYP - PYP PXP without forming the full products
    d = np.einsum("ij,ji->i", PXP, PYP) - np.einsum("ij,ji->i", PYP, PXP)
    nu = []
    for r in windows:
        w = window_sites(coords, center, r)
        nu.append(float((2j * np.pi * np.sum(d[w])).real))
    partials: list[float] = []
    if diagnose:
        n = P.shape[0]
        eye = np.eye(n)
        M = (_exp_2pi_i(PXP) - eye) @ (_exp_2pi_i(PYP) - eye)
        partials = [opnum.trace_norm(M[np.ix_(w, w)])
                    for w in (window_sites(coords, center, r) for r in windows)]
    return nu, partials


def exp_hofstadter_chern(cfg: HofstadterConfig = HofstadterConfig(),
                         tolerance: float = 0.05) -> ExperimentReport:
    coords = site_coords(cfg.L)
    center = _center(cfg.L)
    h = hofstadter_hamiltonian(cfg.L, cfg.p, cfg.q, cfg.hopping, cfg.onsite)
    spectrum = opnum.hermitian_spectrum(h)
    if cfg.fermi is None:
        fermi = gap_midpoint(cfg.p, cfg.q, cfg.band, cfg.hopping)
    else:
        fermi = cfg.fermi
        if cfg.onsite is None and cfg.hopping:
            bands = harper_bands(cfg.p, cfg.q, cfg.hopping)
            if np.any((bands.min(axis=0) <= fermi) & (fermi <= bands.max(axis=0))):
                raise GapTooSmall(f"fermi level {fermi} lies inside a bulk band")
    gap = spectrum.gap_at(fermi)
    if gap <= 10 * max(spectrum.residual, np.finfo(float).eps):
        raise GapTooSmall(f"spectral gap {gap:.3e} at fermi {fermi} is below 10x residual")
    P = spectrum.projector(fermi)
    nu, partials = hall_trace(P, coords, center, cfg.windows, cfg.diagnose)
    marker = kitaev_local_marker(P, center, max(cfg.windows), coords, margin=cfg.q)

    final = nu[-1]
    nearest = int(round(final))
    tail = nu[-3:]
    cauchy = max((abs(b - a) for a, b in zip(tail, tail[1:])), default=0.0)
    ok = abs(final - nearest) <= tolerance and abs(final - marker) <= tolerance
    return ExperimentReport(
        "chern",
        {"L": cfg.L, "p": cfg.p, "q": cfg.q, "band": cfg.band, "fermi": fermi,
         "windows": list(cfg.windows), "hopping": cfg.hopping,
         "atomic": cfg.onsite is not None and cfg.hopping == 0},
        final, nearest, tolerance, bool(ok),
        {
            "window_values": nu,
            "cauchy_gap": cauchy,
            "local_marker": marker,
            "spectral_gap": gap,
            "eigen_residual": spectrum.residual,
            "occupied": int(np.sum(spectrum.evals < fermi)),
            "phi_trace_norm_partials": partials,
        },
    )
