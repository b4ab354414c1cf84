"""Independent reference computations used to derive frozen test values.

None of these reuse the package's multiplication, reduction or determinant
code paths.
"""

from __future__ import annotations

import itertools
import math


# --- S0 by brute-force rewriting of two-variable Laurent polynomials -------------

def laurent_from_element(e) -> dict:
    """Two-variable Laurent dict {(a, b): c} of a normal form."""
    out = {}
    if e.const_coeff:
        out[(0, 0)] = e.const_coeff
    for k, c in e.u_terms:
        out[(k, 0)] = out.get((k, 0), 0) + c
    for k, c in e.v_terms:
        out[(0, k)] = out.get((0, k), 0) + c
    return out


def reduce_laurent(poly: dict) -> dict:
    """Rewrite every mixed monomial u^a v^b -> u^a + v^b - 1 until none remain."""
    work = dict(poly)
    while True:
        mixed = [m for m, c in work.items() if c and m[0] and m[1]]
        if not mixed:
            return {m: c for m, c in work.items() if c}
        a, b = mixed[0]
        c = work.pop((a, b))
        for m, s in (((a, 0), 1), ((0, b), 1), ((0, 0), -1)):
            work[m] = work.get(m, 0) + s * c


def laurent_mul(p: dict, q: dict) -> dict:
    out = {}
    for (a1, b1), c1 in p.items():
        for (a2, b2), c2 in q.items():
            m = (a1 + a2, b1 + b2)
            out[m] = out.get(m, 0) + c1 * c2
    return out


def rewrite_product(*elements) -> dict:
    """Reduced Laurent dict of a product, multiplying and rewriting letter by letter."""
    acc = {(0, 0): 1}
    for e in elements:
        acc = reduce_laurent(laurent_mul(acc, laurent_from_element(e)))
    return acc


def rewrite_word(word: str) -> dict:
    """Reduce a word in letters u, U (= u^-1), v, V (= v^-1) by local rules:
    cancel x x^-1, and replace adjacent mixed letters x y by x + y - 1."""
    letters = {"u": (1, 0), "U": (-1, 0), "v": (0, 1), "V": (0, -1)}
    acc = {(0, 0): 1}
    for ch in word:
        acc = reduce_laurent(laurent_mul(acc, {letters[ch]: 1}))
    return acc


# --- matrices over S0 through the fiber product ----------------------------------

def _lmul(p: dict, q: dict) -> dict:
    out = {}
    for a, c in p.items():
        for b, d in q.items():
            out[a + b] = out.get(a + b, 0) + c * d
    return {k: v for k, v in out.items() if v}


def _ladd(p: dict, q: dict) -> dict:
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def fiber_images(e) -> tuple[dict, dict]:
    """(v -> 1, u -> 1) images as one-variable Laurent dicts, computed from scratch."""
    p, q = {}, {}
    c0 = e.const_coeff
    p[0] = c0 + sum(c for _, c in e.v_terms)
    q[0] = c0 + sum(c for _, c in e.u_terms)
    for k, c in e.u_terms:
        p[k] = p.get(k, 0) + c
    for k, c in e.v_terms:
        q[k] = q.get(k, 0) + c
    return ({k: v for k, v in p.items() if v}, {k: v for k, v in q.items() if v})


def word_image_fibers(word, n: int = 3) -> tuple[list, list]:
    """Matrix image of a Steinberg word computed separately in Z[u^+-1] and Z[v^+-1]."""
    def ident():
        return [[{0: 1} if i == j else {} for j in range(n)] for i in range(n)]

    def mat_mul(A, B):
        return [[_reduce_sum(_lmul(A[i][k], B[k][j]) for k in range(n)) for j in range(n)]
                for i in range(n)]

    out = []
    for side in (0, 1):
        M = ident()
        for g in word:
            E = ident()
            E[g.i - 1][g.j - 1] = fiber_images(g.arg)[side]
            M = mat_mul(M, E)
        out.append(M)
    return out[0], out[1]


def _reduce_sum(parts) -> dict:
    acc = {}
    for p in parts:
        acc = _ladd(acc, p)
    return acc


# --- numerics ------------------------------------------------------------------

def cofactor_det(m) -> complex:
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * cofactor_det(minor)
    return total


def permutation_det(m) -> complex:
    """Leibniz formula, for tiny matrices."""
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a, b in itertools.combinations(range(n), 2) if perm[a] > perm[b])
        prod = 1
        for i in range(n):
            prod *= m[i][perm[i]]
        total += (-1) ** inv * prod
    return total


def telescoping_product(d, lo: int, hi: int) -> complex:
    """prod_{k=lo}^{hi} d(k-1)/d(k) collapses to d(lo-1)/d(hi)."""
    return d(lo - 1) / d(hi)


def toeplitz_trace_oracle(a: float, b: float) -> float:
    """Tr[aS, bS*] = ab Tr(SS* - S*S) = -ab, so det = exp(-ab)."""
    return math.exp(-a * b)

