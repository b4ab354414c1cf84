"""Exact arithmetic in the universal ring S0 = Z[u, u^-1, v, v^-1] / ((u-1)(v-1)).

Every element has a unique normal form ``c + sum a_k u^k + sum b_k v^k`` with
nonzero exponents.  The mixed rule ``u^a v^b = u^a + v^b - 1`` follows from
``(u^a - 1)(v^b - 1) = p(u)(u - 1)(v - 1)q(v) = 0``, so S0 is commutative.

Text grammar (normal forms only)::

    element := term (('+' | '-') term)*
    term    := ['-'] INT | ['-'] [INT ['*']] ('u' | 'v') ['^' ['-'] INT]

Exponent 0 is rejected, as are mixed monomials such as ``u*v``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from kitaevlab._kernels import mul_parts

Scalar = Union[int, "RingElement"]


class RingSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class KitaevPreconditionError(ValueError):
    """Numeric pair does not satisfy (U-1)(V-1) = 0 = (V-1)(U-1)."""


def _normal_terms(terms: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    out = []
    for e, c in terms.items():
        if e == 0:
            raise ValueError("exponent 0 belongs to the constant coefficient")
        if c:
            out.append((int(e), int(c)))
    out.sort()
    return tuple(out)


@dataclass(frozen=True)
class RingElement:
    """Element of S0 in canonical normal form.

    ``u_terms`` and ``v_terms`` are sorted ``(exponent, coefficient)`` pairs;
    no stored coefficient is zero and exponent 0 never appears.  Dataclass
    equality is therefore ring equality.
    """

    const_coeff: int = 0
    u_terms: tuple[tuple[int, int], ...] = ()
    v_terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_terms(cls, const: int = 0, u: Mapping[int, int] | None = None,
                   v: Mapping[int, int] | None = None) -> "RingElement":
        return cls(int(const), _normal_terms(u or {}), _normal_terms(v or {}))

    @classmethod
    def coerce(cls, x: Scalar) -> "RingElement":
        if isinstance(x, RingElement):
            return x
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return cls(int(x))
        raise TypeError(f"cannot use {type(x).__name__} as an element of S0")

    def is_zero(self) -> bool:
        return not (self.const_coeff or self.u_terms or self.v_terms)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: Scalar) -> "RingElement":
        try:
            return ring_add(self, RingElement.coerce(other))
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        return RingElement(-self.const_coeff,
                           tuple((e, -c) for e, c in self.u_terms),
                           tuple((e, -c) for e, c in self.v_terms))

    def __sub__(self, other: Scalar) -> "RingElement":
        try:
            return ring_add(self, -RingElement.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other: Scalar) -> "RingElement":
        return RingElement.coerce(other) - self

    def __mul__(self, other: Scalar) -> "RingElement":
        try:
            return ring_mul(self, RingElement.coerce(other))
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RingElement":
        if k < 0:
            return ring_inverse(self) ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"RingElement({render(self)!r})"


ZERO = RingElement()
ONE = RingElement(1)


def u_pow(k: int) -> RingElement:
    return ONE if k == 0 else RingElement(0, ((k, 1),))


def v_pow(k: int) -> RingElement:
    return ONE if k == 0 else RingElement(0, (), ((k, 1),))


U = u_pow(1)
V = v_pow(1)


def _merge(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for e, c in b:
        acc[e] = acc.get(e, 0) + c
    return tuple(sorted((e, c) for e, c in acc.items() if c))


def ring_add(a: RingElement, b: RingElement) -> RingElement:
    return RingElement(a.const_coeff + b.const_coeff,
                       _merge(a.u_terms, b.u_terms),
                       _merge(a.v_terms, b.v_terms))


def ring_mul(a: RingElement, b: RingElement) -> RingElement:
    if not a.u_terms and not a.v_terms:
        c = a.const_coeff
        if c == 1:
            return b
        if c == 0:
            return ZERO
    if not b.u_terms and not b.v_terms:
        c = b.const_coeff
        if c == 1:
            return a
        if c == 0:
            return ZERO
    const, u, v = mul_parts(a.const_coeff, a.u_terms, a.v_terms,
                            b.const_coeff, b.u_terms, b.v_terms)
    return RingElement(const, u, v)


def fiber_pair(e: RingElement) -> tuple[dict[int, int], dict[int, int]]:
    """Images of ``e`` in Z[u^+-1] (v -> 1) and Z[v^+-1] (u -> 1).

    S0 is the fiber product of these Laurent rings over Z, so the pair
    determines ``e``.
    """
    su = sum(c for _, c in e.u_terms)
    sv = sum(c for _, c in e.v_terms)
    p = dict(e.u_terms)
    q = dict(e.v_terms)
    if e.const_coeff + sv:
        p[0] = e.const_coeff + sv
    if e.const_coeff + su:
        q[0] = e.const_coeff + su
    return p, q


def from_fiber_pair(p: Mapping[int, int], q: Mapping[int, int]) -> RingElement:
    if sum(p.values()) != sum(q.values()):
        raise ValueError("pair does not agree at u = v = 1")
    u = {e: c for e, c in p.items() if e != 0}
    v = {e: c for e, c in q.items() if e != 0}
    const = p.get(0, 0) - sum(v.values())
    return RingElement.from_terms(const, u, v)


def unit_data(e: RingElement) -> tuple[int, int, int] | None:
    """``(sign, a, b)`` with ``e = sign * u^a v^b`` if ``e`` is a unit, else None."""
    p, q = fiber_pair(e)
    p = {k: c for k, c in p.items() if c}
    q = {k: c for k, c in q.items() if c}
    if len(p) != 1 or len(q) != 1:
        return None
    (a, cp), = p.items()
    (b, cq), = q.items()
    if cp not in (1, -1) or cp != cq:
        return None
    return cp, a, b


def is_unit(e: RingElement) -> bool:
    return unit_data(e) is not None


def ring_inverse(e: RingElement) -> RingElement:
    data = unit_data(e)
    if data is None:
        raise ValueError(f"{render(e)} is not a unit of S0")
    sign, a, b = data
    return sign * (u_pow(-a) * v_pow(-b))


def substitute(e: RingElement, u_image: RingElement, v_image: RingElement) -> RingElement:
    """Image of ``e`` under the endomorphism u -> u_image, v -> v_image.

    The images must be units with (u_image - 1)(v_image - 1) = 0 in both
    orders, which makes the map well defined on S0.
    """
    check_kitaev_pair(u_image, v_image)
    out = RingElement(e.const_coeff)
    for k, c in e.u_terms:
        out = out + c * u_image ** k
    for k, c in e.v_terms:
        out = out + c * v_image ** k
    return out


def check_kitaev_pair(x: RingElement, y: RingElement) -> None:
    if not (is_unit(x) and is_unit(y)):
        raise ValueError("substitution images must be units of S0")
    if not ((x - 1) * (y - 1)).is_zero() or not ((y - 1) * (x - 1)).is_zero():
        raise ValueError(f"images {render(x)}, {render(y)} violate (x-1)(y-1) = 0")


# --- text form ------------------------------------------------------------

def _render_term(c: int, var: str, k: int, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    if var:
        body = var if k == 1 else f"{var}^{k}"
        body = body if mag == 1 else f"{mag}{body}"
    else:
        body = str(mag)
    if first:
        return f"-{body}" if sign == "-" else body
    return f" {sign} {body}"


def render(e: RingElement) -> str:
    parts = []
    if e.const_coeff:
        parts.append(("", 0, e.const_coeff))
    parts += [("u", k, c) for k, c in e.u_terms]
    parts += [("v", k, c) for k, c in e.v_terms]
    if not parts:
        return "0"
    return "".join(_render_term(c, var, k, i == 0) for i, (var, k, c) in enumerate(parts))


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<op>[-+*^])|(?P<var>[uv])|(?P<bad>\S))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def ring_parse(text: str) -> RingElement:
    toks = _tokens(text)
    i = 0
    const = 0
    u: dict[int, int] = {}
    v: dict[int, int] = {}

    def fail(msg: str, at: int):
        raise RingSyntaxError(msg, text, at)

    def peek():
        return toks[i]

    expect_term = True
    sign = 1
    if peek()[0] == "end":
        fail("empty ring element", 0)
    while True:
        kind, val, at = peek()
        if kind == "bad":
            fail(f"unexpected character {val!r}", at)
        if expect_term:
            if kind == "op" and val == "-" and sign == 1 and i == 0:
                sign = -1
                i += 1
                continue
            coeff = None
            if kind == "int":
                coeff = int(val)
                i += 1
                kind, val, at = peek()
                if kind == "op" and val == "*":
                    i += 1
                    kind, val, at = peek()
                    if kind != "var":
                        fail("expected 'u' or 'v' after '*'", at)
            if kind == "var":
                var = val
                i += 1
                k = 1
                kind2, val2, at2 = peek()
                if kind2 == "op" and val2 == "^":
                    i += 1
                    esign = 1
                    kind3, val3, at3 = peek()
                    if kind3 == "op" and val3 == "-":
                        esign = -1
                        i += 1
                        kind3, val3, at3 = peek()
                    if kind3 != "int":
                        fail("expected integer exponent", at3)
                    k = esign * int(val3)
                    if k == 0:
                        fail("exponent 0 is not allowed", at3)
                    i += 1
                c = sign * (1 if coeff is None else coeff)
                target = u if var == "u" else v
                target[k] = target.get(k, 0) + c
                kind4, val4, at4 = peek()
                if kind4 == "var" or (kind4 == "op" and val4 == "*"):
                    fail("mixed monomials are not in normal form", at4)
            elif coeff is not None:
                const += sign * coeff
            else:
                fail("expected a term", at)
            expect_term = False
            continue
        if kind == "end":
            break
        if kind == "op" and val in "+-":
            sign = 1 if val == "+" else -1
            i += 1
            expect_term = True
            if peek()[0] == "end":
                fail("dangling operator", peek()[2])
            continue
        fail(f"unexpected {val!r}", at)
    return RingElement.from_terms(const, u, v)


# --- numeric evaluation ---------------------------------------------------

def _mat_power(m: np.ndarray, minv: np.ndarray, k: int) -> np.ndarray:
    base = m if k > 0 else minv
    return np.linalg.matrix_power(base, abs(k))


def ring_eval(e: RingElement, Umat, Vmat, tol: float = 1e-12) -> np.ndarray:
    """Substitute square matrices U, V into the normal form of ``e``.

    The pair must satisfy the exact Kitaev relation (up to ``tol`` in max
    norm), which makes substitution a ring homomorphism.
    """
    Um = np.asarray(Umat, dtype=complex)
    Vm = np.asarray(Vmat, dtype=complex)
    if Um.ndim != 2 or Um.shape[0] != Um.shape[1]:
        raise ValueError("U must be a square matrix")
    if Vm.shape != Um.shape:
        raise ValueError("U and V must have the same square shape")
    n = Um.shape[0]
    eye = np.eye(n, dtype=complex)
    for left, right in ((Um, Vm), (Vm, Um)):
        if n and np.max(np.abs((left - eye) @ (right - eye))) > tol:
            raise KitaevPreconditionError("(U-1)(V-1) and (V-1)(U-1) must vanish")
    out = e.const_coeff * eye
    if e.u_terms:
        Uinv = np.linalg.inv(Um)
        for k, c in e.u_terms:
            out = out + c * _mat_power(Um, Uinv, k)
    if e.v_terms:
        Vinv = np.linalg.inv(Vm)
        for k, c in e.v_terms:
            out = out + c * _mat_power(Vm, Vinv, k)
    return out
