"""Small standard star-monoids used by the corpus and the tests."""

from __future__ import annotations

from itertools import permutations

from .monoid import StarMonoid, validate_monoid


def cyclic_group(n: int) -> StarMonoid:
    """Z_n with b* = -b, elements '0'..'n-1'."""
    els = [str(i) for i in range(n)]
    return validate_monoid(
        {
            "name": f"Z{n}",
            "elements": els,
            "unit": "0",
            "product": [[str((a + c) % n) for c in range(n)] for a in range(n)],
            "involution": {str(b): str((-b) % n) for b in range(n)},
        }
    )


def z2() -> StarMonoid:
    """Z_2 as {u, a} with a.a = u, a* = a."""
    return validate_monoid(
        {"name": "Z2", "elements": ["u", "a"], "unit": "u", "product": [["u", "a"], ["a", "u"]], "involution": {"u": "u", "a": "a"}}
    )


def boolean_filter() -> StarMonoid:
    """{u, p} with p.p = p, p* = p."""
    return validate_monoid(
        {"name": "Bool", "elements": ["u", "p"], "unit": "u", "product": [["u", "p"], ["p", "p"]], "involution": {"u": "u", "p": "p"}}
    )


def symmetric_group(k: int = 3) -> StarMonoid:
    """S_k on permutations written as one-line strings, b* = b^-1; the identity comes first."""
    perms = sorted(permutations(range(k)))
    name = {p: "".join(str(i) for i in p) for p in perms}

    def mul(p, q):  # (p.q)(i) = p(q(i))
        return tuple(p[q[i]] for i in range(k))

    def inv(p):
        r = [0] * k
        for i, pi in enumerate(p):
            r[pi] = i
        return tuple(r)

    return validate_monoid(
        {
            "name": f"S{k}",
            "elements": [name[p] for p in perms],
            "unit": name[tuple(range(k))],
            "product": [[name[mul(p, q)] for q in perms] for p in perms],
            "involution": {name[p]: name[inv(p)] for p in perms},
        }
    )
