"""Pure-Python multiplication kernel for the universal Kitaev ring.

Elements are passed as ``(const, u_terms, v_terms)`` where the term tuples
hold ``(exponent, coefficient)`` pairs with nonzero exponents.  The compiled
kernel in ``_ringcore`` exposes the same function.
"""


def _poly_product(a, b, out):
    # Laurent product of two pure-power parts; returns the exponent-0 part.
    const = 0
    for ea, ca in a:
        for eb, cb in b:
            e = ea + eb
            if e == 0:
                const += ca * cb
            else:
                out[e] = out.get(e, 0) + ca * cb
    return const


def _pack(terms):
    return tuple(sorted((e, c) for e, c in terms.items() if c))


def mul_parts(ca, au, av, cb, bu, bv):
    sau = sum(c for _, c in au)
    sav = sum(c for _, c in av)
    sbu = sum(c for _, c in bu)
    sbv = sum(c for _, c in bv)

    # u^i v^j = u^i + v^j - 1 turns every mixed product into pure parts.
    ku_a = cb + sbv
    ku_b = ca + sav
    kv_a = cb + sbu
    kv_b = ca + sau

    u = {}
    v = {}
    for e, c in au:
        u[e] = c * ku_a
    for e, c in bu:
        u[e] = u.get(e, 0) + c * ku_b
    for e, c in av:
        v[e] = c * kv_a
    for e, c in bv:
        v[e] = v.get(e, 0) + c * kv_b

    const = ca * cb - sau * sbv - sbu * sav
    const += _poly_product(au, bu, u)
    const += _poly_product(av, bv, v)
    return const, _pack(u), _pack(v)
