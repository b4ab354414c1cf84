import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import frozen
import oracles
from kitaevlab import _ringpy
from kitaevlab.symring import (
    ONE,
    U,
    V,
    ZERO,
    KitaevPreconditionError,
    RingElement,
    RingSyntaxError,
    fiber_pair,
    from_fiber_pair,
    is_unit,
    render,
    ring_eval,
    ring_inverse,
    ring_parse,
    substitute,
    u_pow,
    v_pow,
)

try:
    from kitaevlab import _ringcore
except ImportError:
    _ringcore = None

exps = st.integers(-4, 4).filter(bool)
coeffs = st.integers(-5, 5)
sides = st.dictionaries(exps, coeffs, max_size=4)
elements = st.builds(RingElement.from_terms, coeffs, sides, sides)


def to_laurent(e):
    return {k: c for k, c in oracles.laurent_from_element(e).items() if c}


def test_examples_from_closed_forms():
    assert (U - 1) + (1 - U) == ZERO
    assert 1 + (U - 1) == U
    assert render((U + V - 1) + (U - V)) == frozen.SUM_EXAMPLE
    assert ((U - 1) * (V - 1)).is_zero()
    assert U * u_pow(-1) == ONE
    assert render(u_pow(2) * v_pow(-1)) == frozen.U2_VINV
    assert render((2 + U) * (3 * V)) == frozen.TWO_PLUS_U_TIMES_3V


def test_mixed_product_matches_rewriting_oracle():
    e = U * U * v_pow(-1)
    assert to_laurent(e) == oracles.rewrite_word("uuV")


def test_render_and_parse():
    assert render(ZERO) == "0"
    assert render(1 - u_pow(-1)) == "1 - u^-1"
    assert ring_parse("u - 1") == U - 1
    assert ring_parse("3u + 9v - 3") == (2 + U) * (3 * V)
    assert ring_parse("-u^-2 + 4*v") == -u_pow(-2) + 4 * V
    assert ring_parse(" 0 ") == ZERO


@pytest.mark.parametrize("text", ["u^0", "u*v", "u +", "", "2 ^ u", "w", "u^"])
def test_parse_errors(text):
    with pytest.raises(RingSyntaxError):
        ring_parse(text)


def test_parse_error_position():
    with pytest.raises(RingSyntaxError) as info:
        ring_parse("1 + u^0")
    assert info.value.position >= 4


@given(elements)
def test_parse_round_trip(e):
    assert ring_parse(render(e)) == e


@given(elements, elements, elements)
@settings(max_examples=300)
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + ZERO == a and a * ONE == a
    assert a - a == ZERO


@given(elements, elements)
@settings(max_examples=300)
def test_product_matches_rewriting_oracle(a, b):
    assert to_laurent(a * b) == oracles.rewrite_product(a, b)


@given(elements, elements)
@settings(max_examples=300)
def test_product_matches_fiber_oracle(a, b):
    pa, qa = oracles.fiber_images(a)
    pb, qb = oracles.fiber_images(b)
    expected = from_fiber_pair(oracles._lmul(pa, pb), oracles._lmul(qa, qb))
    assert a * b == expected


@given(elements)
def test_fiber_pair_round_trip(e):
    assert from_fiber_pair(*fiber_pair(e)) == e


@pytest.mark.parametrize("a", [-3, -2, -1, 1, 2, 3])
@pytest.mark.parametrize("b", [-3, -2, -1, 1, 2, 3])
def test_kitaev_ideal(a, b):
    x, y = u_pow(a) - 1, v_pow(b) - 1
    assert (x * y).is_zero() and (y * x).is_zero()


def test_units():
    for sign in (1, -1):
        for a in range(-2, 3):
            for b in range(-2, 3):
                w = sign * u_pow(a) * v_pow(b) if a or b else RingElement(sign)
                assert is_unit(w)
                assert w * ring_inverse(w) == ONE
    assert not is_unit(2 + ZERO)
    assert not is_unit(U + V)
    with pytest.raises(ValueError):
        ring_inverse(U - 1)
    assert U ** -2 == u_pow(-2)


def test_substitute_swap_with_inverse():
    # u -> v^-1, v -> u is a ring map because (v^-1 - 1)(u - 1) = 0
    e = 1 - u_pow(-1) + 3 * V
    assert substitute(e, v_pow(-1), U) == 1 - V + 3 * U
    with pytest.raises(ValueError):
        substitute(e, U, U)


@given(elements, elements)
@settings(max_examples=100)
def test_substitute_is_multiplicative(a, b):
    su, sv = v_pow(-1), U
    assert substitute(a * b, su, sv) == substitute(a, su, sv) * substitute(b, su, sv)


def _kitaev_pair(rng, n=6):
    # U - 1 and V - 1 supported on orthogonal coordinate blocks
    Um = np.eye(n, dtype=complex)
    Vm = np.eye(n, dtype=complex)
    k = n // 2
    Um[:k, :k] = rng.standard_normal((k, k)) + 3 * np.eye(k)
    Vm[k:, k:] = rng.standard_normal((n - k, n - k)) + 3 * np.eye(n - k)
    return Um, Vm


def test_eval_examples():
    rng = np.random.default_rng(1)
    Um, Vm = _kitaev_pair(rng)
    np.testing.assert_allclose(ring_eval(ONE, Um, Vm), np.eye(6))
    np.testing.assert_allclose(ring_eval((U - 1) * (V - 1), Um, Vm), np.zeros((6, 6)))
    np.testing.assert_allclose(ring_eval(U * V, Um, Vm), Um + Vm - np.eye(6), atol=1e-12)


def test_eval_rejects_non_kitaev_pair():
    rng = np.random.default_rng(2)
    with pytest.raises(KitaevPreconditionError):
        ring_eval(U, rng.standard_normal((4, 4)), rng.standard_normal((4, 4)))
    with pytest.raises(ValueError):
        ring_eval(U, np.eye(3), np.eye(4))


@given(elements, elements)
@settings(max_examples=60, deadline=None)
def test_eval_is_homomorphism(a, b):
    rng = np.random.default_rng(3)
    Um, Vm = _kitaev_pair(rng)
    lhs = ring_eval(a * b, Um, Vm)
    rhs = ring_eval(a, Um, Vm) @ ring_eval(b, Um, Vm)
    scale = max(1.0, np.max(np.abs(rhs)))
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale


BACKENDS = [_ringpy.mul_parts]
if _ringcore is not None:
    BACKENDS.append(_ringcore.mul_parts)


@pytest.mark.parametrize("kernel", BACKENDS, ids=lambda f: f.__module__.split(".")[-1])
def test_kernels_agree_with_oracle(kernel):
    rng = random.Random(11)
    for _ in range(500):
        a = RingElement.from_terms(rng.randint(-9, 9), {rng.choice([-3, -1, 2, 5]): rng.randint(-9, 9)},
                                   {rng.choice([-2, 1, 4]): rng.randint(-9, 9)})
        b = RingElement.from_terms(rng.randint(-9, 9), {rng.choice([-4, 1, 3]): rng.randint(-9, 9)},
                                   {rng.choice([-1, 2]): rng.randint(-9, 9)})
        c, uu, vv = kernel(a.const_coeff, a.u_terms, a.v_terms, b.const_coeff, b.u_terms, b.v_terms)
        assert to_laurent(RingElement.from_terms(c, dict(uu), dict(vv))) == oracles.rewrite_product(a, b)


@pytest.mark.skipif(_ringcore is None, reason="compiled kernel not built")
def test_compiled_kernel_handles_big_integers():
    big = 3 ** 60
    a = RingElement.from_terms(big, {1: big}, {-1: 1})
    b = RingElement.from_terms(-big, {5000: 2}, {})
    got = _ringcore.mul_parts(a.const_coeff, a.u_terms, a.v_terms, b.const_coeff, b.u_terms, b.v_terms)
    want = _ringpy.mul_parts(a.const_coeff, a.u_terms, a.v_terms, b.const_coeff, b.u_terms, b.v_terms)
    assert got == want
