"""Characters, dimensions, and tensor product decompositions.

Weight multiplicities come from the Freudenthal recursion, tensor products
from the reflection-based expansion over the weights of the smaller factor.
All arithmetic is exact; intermediate rational values are Fractions and
every result is asserted back to an integer.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import linalg, root_datum
from .linalg import Vec, dot, vec_add, vec_sub
from .root_datum import RootDatum

Decomposition = dict[Vec, int]

_dominant_mults_cache: dict[tuple, dict[Vec, int]] = {}
_dimension_cache: dict[tuple, int] = {}
_orbit_cache: dict[tuple, tuple[Vec, ...]] = {}


def _orbit(d: RootDatum, x: Vec) -> tuple[Vec, ...]:
    key = (d, x)
    got = _orbit_cache.get(key)
    if got is None:
        got = _orbit_cache[key] = root_datum.orbit(d, x)
    return got


def _require_dominant(d: RootDatum, x: Vec, what: str) -> Vec:
    x = tuple(x)
    if len(x) != d.rank:
        raise ValueError(f"{what} has wrong length")
    if not root_datum.is_dominant(d, x):
        raise ValueError(f"{what} {x} is not dominant")
    return x


def _root_heights(d: RootDatum, v: Vec) -> int:
    coeffs = linalg.solve(linalg.transpose(d.simple_roots), v) if d.simple_roots else ()
    if coeffs is None:
        raise ValueError(f"{v} is not in the root span")
    total = 0
    for c in coeffs:
        if c.denominator != 1:
            raise ValueError(f"{v} is not in the root lattice")
        total += int(c)
    return total


def dominant_weights_of(d: RootDatum, lam: Vec) -> tuple[Vec, ...]:
    """All dominant weights below lam: the dominant weights of the irreducible.

    Breadth-first from lam, subtracting one positive root at a time; every
    dominant weight under lam is reachable this way through dominant stops.
    """
    lam = _require_dominant(d, lam, "highest weight")
    posroots = [a for a, _, _ in root_datum.positive_roots(d)]
    seen = {lam}
    frontier = [lam]
    while frontier:
        nxt = []
        for v in frontier:
            for a in posroots:
                w = vec_sub(v, a)
                if w not in seen and root_datum.is_dominant(d, w):
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return tuple(sorted(seen, reverse=True))


def dominant_weight_multiplicities(d: RootDatum, lam: Vec) -> dict[Vec, int]:
    """Multiplicity of each dominant weight of the irreducible with highest weight lam."""
    lam = _require_dominant(d, lam, "highest weight")
    key = (d, lam)
    cached = _dominant_mults_cache.get(key)
    if cached is not None:
        return cached

    posroots = root_datum.positive_roots(d)
    sym = root_datum.symmetrizers(d)
    r2 = root_datum.rho2(d)
    weights = sorted(
        dominant_weights_of(d, lam), key=lambda w: _root_heights(d, vec_sub(lam, w))
    )
    rc_cols = linalg.transpose(d.simple_roots)
    mults: dict[Vec, int] = {}
    for mu in weights:
        if mu == lam:
            mults[mu] = 1
            continue
        num = Fraction(0)
        for a, cov, origin in posroots:
            k = 1
            base = dot(cov, mu)
            while True:
                delta = root_datum.dominant_representative(d, vec_add(mu, linalg.vec_scale(k, a)))
                m = mults.get(delta)
                if m is None:
                    break  # weight strings have no gaps
                num += m * sym[origin] * (base + 2 * k)
                k += 1
        diff = vec_sub(lam, mu)
        coeffs = linalg.solve(rc_cols, diff)
        assert coeffs is not None
        x = vec_add(vec_add(lam, mu), r2)
        denom = sum(
            c * sym[i] * dot(d.simple_coroots[i], x) for i, c in enumerate(coeffs)
        )
        value = 2 * num / denom
        assert value.denominator == 1 and value > 0, (lam, mu, value)
        mults[mu] = int(value)
    _dominant_mults_cache[key] = mults
    return mults


def irreducible_character(d: RootDatum, lam: Vec) -> dict[Vec, int]:
    """Full weight multiset of the irreducible, as weight -> multiplicity."""
    out: dict[Vec, int] = {}
    for mu, m in dominant_weight_multiplicities(d, lam).items():
        for w in _orbit(d, mu):
            out[w] = m
    return out


def dimension(d: RootDatum, lam: Vec) -> int:
    lam = _require_dominant(d, lam, "highest weight")
    key = (d, lam)
    cached = _dimension_cache.get(key)
    if cached is not None:
        return cached
    r2 = root_datum.rho2(d)
    num = den = 1
    for _, cov, _ in root_datum.positive_roots(d):
        num *= dot(cov, vec_add(linalg.vec_scale(2, lam), r2))
        den *= dot(cov, r2)
    value = Fraction(num, den)
    assert value.denominator == 1 and value > 0
    _dimension_cache[key] = int(value)
    return int(value)


def _reflect_strict(d: RootDatum, t: Vec) -> tuple[Vec, int]:
    """Reflect t to the dominant chamber; sign of the word, 0 if t hits a wall."""
    sign = 1
    for _ in range(10**6):
        hit = None
        for i, cov in enumerate(d.simple_coroots):
            p = dot(cov, t)
            if p == 0:
                return t, 0
            if p < 0:
                hit = i
                break
        if hit is None:
            return t, sign
        t = root_datum.reflect(d, hit, t)
        sign = -sign
    raise RuntimeError("reflection loop did not stabilize")


def tensor_decompose(d: RootDatum, lam: Vec, mu: Vec) -> Decomposition:
    """Decompose the tensor product of two irreducibles into irreducibles.

    Iterates over the weights of the smaller factor, adding the doubled
    shifted weight and reflecting to the dominant chamber with signs; terms
    on a wall drop out.
    """
    lam = _require_dominant(d, lam, "left weight")
    mu = _require_dominant(d, mu, "right weight")
    if dimension(d, mu) > dimension(d, lam):
        lam, mu = mu, lam
    r2 = root_datum.rho2(d)
    base = vec_add(linalg.vec_scale(2, lam), r2)
    acc: dict[Vec, int] = {}
    for delta, m in dominant_weight_multiplicities(d, mu).items():
        for w in _orbit(d, delta):
            t, sign = _reflect_strict(d, vec_add(base, linalg.vec_scale(2, w)))
            if sign == 0:
                continue
            half = vec_sub(t, r2)
            assert all(x % 2 == 0 for x in half)
            target = tuple(x // 2 for x in half)
            acc[target] = acc.get(target, 0) + sign * m
    out = {k: v for k, v in acc.items() if v != 0}
    assert all(v > 0 for v in out.values()), (lam, mu, out)
    return out


def tensor_power(d: RootDatum, lam: Vec, n: int) -> Decomposition:
    """Decomposition of the n-th tensor power of an irreducible."""
    if n < 0:
        raise ValueError("power must be nonnegative")
    acc: Decomposition = {(0,) * d.rank: 1}
    for _ in range(n):
        nxt: Decomposition = {}
        for nu, c in acc.items():
            for target, m in tensor_decompose(d, nu, lam).items():
                nxt[target] = nxt.get(target, 0) + c * m
        acc = nxt
    return acc


def dual_label(d: RootDatum, lam: Vec) -> Vec:
    """Highest weight of the dual irreducible."""
    lam = _require_dominant(d, lam, "highest weight")
    return root_datum.dominant_representative(d, tuple(-x for x in lam))


def prv_components(d: RootDatum, lam: Vec, mu: Vec) -> tuple[Vec, ...]:
    """Dominant representatives of lam + w(mu) over the Weyl group.

    Each is the highest weight of a factor of the tensor product (Kumar).
    """
    lam = _require_dominant(d, lam, "left weight")
    mu = _require_dominant(d, mu, "right weight")
    found = {
        root_datum.dominant_representative(d, vec_add(lam, w)) for w in _orbit(d, mu)
    }
    return tuple(sorted(found, reverse=True))


def cartan_component(d: RootDatum, lam: Vec, mu: Vec) -> Vec:
    return vec_add(
        _require_dominant(d, lam, "left weight"), _require_dominant(d, mu, "right weight")
    )


def fundamental_monoid_generators(d: RootDatum) -> tuple[Vec, ...]:
    """Minimal generating set of the monoid of dominant weights.

    Only defined when the datum is semisimple; a central torus makes the
    monoid infinitely generated.  Sorted by descending pairing vector, so for
    a simply connected datum this is the fundamental weights in order.
    """
    if d.semisimple_rank != d.rank:
        raise ValueError("dominant monoid is finitely generated only for semisimple data")
    n = d.rank
    covs = [list(c) for c in d.simple_coroots]
    # minimal positive multiple of each pairing axis realized by a lattice weight
    axis_mult = []
    for i in range(n):
        m = 1
        while True:
            sol = linalg.solve(covs, [m if j == i else 0 for j in range(n)])
            assert sol is not None
            if all(s.denominator == 1 for s in sol):
                axis_mult.append(m)
                break
            m += 1
            if m > 10**4:
                raise RuntimeError("axis search runaway")
    # every minimal monoid element fits under the axis box
    members: list[tuple[Vec, Vec]] = []  # (pairing vector, weight)
    for p in itertools.product(*(range(0, m + 1) for m in axis_mult)):
        if all(x == 0 for x in p):
            continue
        sol = linalg.solve(covs, p)
        assert sol is not None
        if all(s.denominator == 1 for s in sol):
            members.append((p, tuple(int(s) for s in sol)))
    pset = {p for p, _ in members}
    gens = [
        (p, w)
        for p, w in members
        if not any(
            q != p and all(x <= y for x, y in zip(q, p)) and tuple(
                y - x for x, y in zip(q, p)
            ) in pset
            for q in pset
        )
    ]
    gens.sort(key=lambda pw: pw[0], reverse=True)
    return tuple(w for _, w in gens)


_expr_cache: dict[tuple, dict[tuple[int, ...], int]] = {}


def express_in_fundamentals(
    d: RootDatum, lam: Vec
) -> tuple[dict[tuple[int, ...], int], tuple[Vec, ...]]:
    """Polynomial writing the irreducible class over the monoid generators.

    Returns (polynomial, generators): the polynomial maps exponent tuples to
    integer coefficients, and substituting the generator classes recovers the
    class of the irreducible with highest weight lam.
    """
    lam = _require_dominant(d, lam, "highest weight")
    gens = fundamental_monoid_generators(d)
    return _express(d, lam, gens), gens


def _express(d: RootDatum, lam: Vec, gens: tuple[Vec, ...]) -> dict[tuple[int, ...], int]:
    key = (d, lam)
    cached = _expr_cache.get(key)
    if cached is not None:
        return cached
    zero = (0,) * d.rank
    if lam == zero:
        result = {(0,) * len(gens): 1}
        _expr_cache[key] = result
        return result
    exponents = _monoid_expression(d, lam, gens)
    assert exponents is not None, (lam, gens)
    product: Decomposition = {zero: 1}
    for e, g in zip(exponents, gens):
        for _ in range(e):
            nxt: Decomposition = {}
            for nu, c in product.items():
                for target, m in tensor_decompose(d, nu, g).items():
                    nxt[target] = nxt.get(target, 0) + c * m
            product = nxt
    assert product.get(lam) == 1  # top factor is the Cartan component
    poly: dict[tuple[int, ...], int] = {tuple(exponents): 1}
    for nu, c in product.items():
        if nu == lam:
            continue
        for mono, coeff in _express(d, nu, gens).items():
            poly[mono] = poly.get(mono, 0) - c * coeff
    poly = {m: c for m, c in poly.items() if c != 0}
    _expr_cache[key] = poly
    return poly


def _monoid_expression(
    d: RootDatum, lam: Vec, gens: tuple[Vec, ...]
) -> tuple[int, ...] | None:
    """Greedy-with-backtracking exponents writing lam as a sum of generators."""
    target = d.pairing(lam)
    pairings = [d.pairing(g) for g in gens]

    def search(idx: int, remaining: tuple[int, ...]) -> tuple[int, ...] | None:
        if all(x == 0 for x in remaining):
            return (0,) * (len(gens) - idx)
        if idx == len(gens):
            return None
        p = pairings[idx]
        top = min(
            (r // c for r, c in zip(remaining, p) if c > 0), default=0
        )
        for e in range(top, -1, -1):
            rest = tuple(r - e * c for r, c in zip(remaining, p))
            if any(x < 0 for x in rest):
                continue
            tail = search(idx + 1, rest)
            if tail is not None:
                return (e,) + tail
        return None

    return search(0, tuple(target))


_VARS = "xyzwvutsrq"


def format_polynomial(poly: dict[tuple[int, ...], int]) -> str:
    """Human-readable form, generators named x, y, z, ... in order."""
    if not poly:
        return "0"
    items = sorted(poly.items(), key=lambda mc: (sum(mc[0]), mc[0]), reverse=True)
    parts: list[str] = []
    for mono, coeff in items:
        factors = []
        for i, e in enumerate(mono):
            if e == 1:
                factors.append(_VARS[i])
            elif e > 1:
                factors.append(f"{_VARS[i]}^{e}")
        body = "*".join(factors)
        mag = abs(coeff)
        if not body:
            term = str(mag)
        elif mag == 1:
            term = body
        else:
            term = f"{mag}*{body}"
        if not parts:
            parts.append(term if coeff > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if coeff > 0 else f"- {term}")
    return " ".join(parts)
