"""Root data on a free character lattice, with Weyl group machinery.

A datum is stored in coordinates: the character lattice is Z^rank with the
standard dot pairing against the cocharacter lattice, simple roots are weight
vectors and simple coroots are coweight vectors.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import linalg
from .linalg import Vec, dot, vec_sub

Matrix = tuple[tuple[int, ...], ...]


class RootDatumError(ValueError):
    """A root datum axiom failed; the message names the axiom."""


@dataclass(frozen=True)
class RootDatum:
    rank: int
    simple_roots: tuple[Vec, ...]
    simple_coroots: tuple[Vec, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "simple_roots", tuple(tuple(r) for r in self.simple_roots))
        object.__setattr__(
            self, "simple_coroots", tuple(tuple(c) for c in self.simple_coroots)
        )

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_roots)

    def pairing(self, x: Vec) -> Vec:
        """Pairings of x against every simple coroot."""
        return tuple(dot(c, x) for c in self.simple_coroots)


def cartan_matrix(d: RootDatum) -> Matrix:
    return tuple(
        tuple(dot(c, a) for a in d.simple_roots) for c in d.simple_coroots
    )


def validate_root_datum(d: RootDatum) -> None:
    """Raise RootDatumError naming the first violated axiom."""
    if d.rank < 0:
        raise RootDatumError("shape: negative rank")
    if len(d.simple_roots) != len(d.simple_coroots):
        raise RootDatumError("shape: root/coroot count mismatch")
    for v in itertools.chain(d.simple_roots, d.simple_coroots):
        if len(v) != d.rank or not all(isinstance(x, int) for x in v):
            raise RootDatumError("shape: vectors must be integer and of length rank")
    k = d.semisimple_rank
    if k > d.rank:
        raise RootDatumError("shape: more simple roots than rank")
    if len(set(d.simple_roots)) != k:
        raise RootDatumError("shape: duplicate simple roots")
    a = cartan_matrix(d)
    for i in range(k):
        if a[i][i] != 2:
            raise RootDatumError(f"pairing normalization: <coroot {i}, root {i}> != 2")
        for j in range(k):
            if i == j:
                continue
            if a[i][j] > 0:
                raise RootDatumError(f"Cartan sign: positive off-diagonal entry at ({i},{j})")
            if (a[i][j] == 0) != (a[j][i] == 0):
                raise RootDatumError(f"Cartan sign: zero pattern asymmetric at ({i},{j})")
    if linalg.rank(d.simple_roots) != k:
        raise RootDatumError("independence: simple roots are dependent")
    if linalg.rank(d.simple_coroots) != k:
        raise RootDatumError("independence: simple coroots are dependent")
    # finite type: every principal minor of the Cartan matrix is positive
    for subset in itertools.chain.from_iterable(
        itertools.combinations(range(k), n) for n in range(1, k + 1)
    ):
        minor = [[a[i][j] for j in subset] for i in subset]
        if linalg.det(minor) <= 0:
            raise RootDatumError(f"finite type: nonpositive principal minor {list(subset)}")


def reflect(d: RootDatum, i: int, x: Vec) -> Vec:
    c = dot(d.simple_coroots[i], x)
    return tuple(xa - c * aa for xa, aa in zip(x, d.simple_roots[i]))


def coreflect(d: RootDatum, i: int, y: Vec) -> Vec:
    c = dot(y, d.simple_roots[i])
    return tuple(ya - c * ca for ya, ca in zip(y, d.simple_coroots[i]))


def reflection_matrix(d: RootDatum, i: int) -> Matrix:
    alpha, cov = d.simple_roots[i], d.simple_coroots[i]
    return tuple(
        tuple((1 if a == b else 0) - alpha[a] * cov[b] for b in range(d.rank))
        for a in range(d.rank)
    )


def weyl_group(d: RootDatum, limit: int = 10**6) -> tuple[Matrix, ...]:
    """All Weyl group elements as matrices acting on weight coordinates."""
    gens = [reflection_matrix(d, i) for i in range(d.semisimple_rank)]
    ident = tuple(tuple(row) for row in linalg.identity(d.rank))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for g in gens:
                wg = tuple(tuple(map(int, row)) for row in linalg.mat_mul(g, w))
                if wg not in seen:
                    seen.add(wg)
                    nxt.append(wg)
                    if len(seen) > limit:
                        raise RootDatumError("Weyl closure exceeded the element limit")
        frontier = nxt
    return tuple(sorted(seen))


def weyl_order(d: RootDatum) -> int:
    return len(weyl_group(d))


def orbit(d: RootDatum, x: Vec) -> tuple[Vec, ...]:
    """W-orbit of a weight, as a sorted tuple (descending)."""
    x = tuple(x)
    seen = {x}
    frontier = [x]
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(d.semisimple_rank):
                r = reflect(d, i, v)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return tuple(sorted(seen, reverse=True))


def is_dominant(d: RootDatum, x: Vec) -> bool:
    return all(p >= 0 for p in d.pairing(x))


def dominant_representative(d: RootDatum, x: Vec) -> Vec:
    """The unique dominant weight in the W-orbit of x."""
    x = tuple(x)
    for _ in range(10**6):
        i = next(
            (i for i, c in enumerate(d.simple_coroots) if dot(c, x) < 0),
            None,
        )
        if i is None:
            return x
        x = reflect(d, i, x)
    raise RootDatumError("dominant representative did not stabilize")


def _root_coefficients(d: RootDatum, v: Vec) -> tuple[Fraction, ...] | None:
    """Coefficients expressing v over the simple roots, or None if outside the span."""
    if d.semisimple_rank == 0:
        return () if all(x == 0 for x in v) else None
    cols = linalg.transpose(d.simple_roots)
    return linalg.solve(cols, v)


def dominance_leq(d: RootDatum, mu: Vec, lam: Vec) -> bool:
    """Whether lam - mu is a nonnegative integer combination of simple roots."""
    coeffs = _root_coefficients(d, vec_sub(lam, mu))
    return coeffs is not None and all(c.denominator == 1 and c >= 0 for c in coeffs)


def dominance_leq_rational(d: RootDatum, mu: Vec, lam: Vec) -> bool:
    """Rational relaxation of dominance_leq: nonnegative rational combination."""
    coeffs = _root_coefficients(d, vec_sub(lam, mu))
    return coeffs is not None and all(c >= 0 for c in coeffs)


def positive_roots(d: RootDatum) -> tuple[tuple[Vec, Vec, int], ...]:
    """All positive roots as (root, coroot, index of the originating simple root)."""
    seen: dict[Vec, tuple[Vec, int]] = {}
    frontier = [
        (a, c, i) for i, (a, c) in enumerate(zip(d.simple_roots, d.simple_coroots))
    ]
    for a, c, i in frontier:
        seen[a] = (c, i)
    while frontier:
        nxt = []
        for a, c, i in frontier:
            for j in range(d.semisimple_rank):
                ra, rc = reflect(d, j, a), coreflect(d, j, c)
                if ra not in seen:
                    seen[ra] = (rc, i)
                    nxt.append((ra, rc, i))
        frontier = nxt
    out = []
    for a, (c, i) in seen.items():
        coeffs = _root_coefficients(d, a)
        assert coeffs is not None
        if all(x >= 0 for x in coeffs):
            out.append((a, c, i))
    out.sort()
    return tuple(out)


def rho2(d: RootDatum) -> Vec:
    """Sum of all positive roots (twice the Weyl vector)."""
    total = (0,) * d.rank
    for a, _, _ in positive_roots(d):
        total = linalg.vec_add(total, a)
    return total


def symmetrizers(d: RootDatum) -> tuple[Fraction, ...]:
    """Positive d_i with d_i * A[i][j] == d_j * A[j][i], one per simple root.

    Determined up to scale on each Dynkin component; normalized so the
    smallest value in each component is 1.
    """
    k = d.semisimple_rank
    a = cartan_matrix(d)
    vals: list[Fraction | None] = [None] * k
    for start in range(k):
        if vals[start] is not None:
            continue
        vals[start] = Fraction(1)
        stack = [start]
        comp = [start]
        while stack:
            i = stack.pop()
            for j in range(k):
                if j == i or a[i][j] == 0:
                    continue
                implied = vals[i] * a[i][j] / a[j][i]
                if vals[j] is None:
                    vals[j] = implied
                    stack.append(j)
                    comp.append(j)
                elif vals[j] != implied:
                    raise RootDatumError("Cartan sign: no symmetrizer exists")
        low = min(vals[i] for i in comp)
        for i in comp:
            vals[i] = vals[i] / low
    return tuple(vals)  # type: ignore[arg-type]


def quotient_matrix(d: RootDatum) -> tuple[tuple[int, ...], ...]:
    """Integer matrix Q with kernel the saturated root span; Q maps onto Z^(rank-k).

    Coordinates of the torus quotient X* / sat(span of roots).
    """
    k = d.semisimple_rank
    if k == 0:
        return tuple(tuple(row) for row in linalg.identity(d.rank))
    cols = [list(col) for col in zip(*d.simple_roots)]
    _, u, _ = linalg.smith_normal_form(cols)
    return tuple(tuple(row) for row in u[k:])


def root_data_isomorphic(d1: RootDatum, d2: RootDatum) -> Matrix | None:
    """A unimodular lattice map carrying d1 to d2, or None.

    The map M satisfies M @ root1_i = root2_sigma(i) and pulls coroots back
    correspondingly, for some permutation sigma of the simple roots.  When the
    linear conditions leave free directions (torus factors) a bounded integer
    search over the solution space looks for a determinant +-1 point.
    """
    if d1.rank != d2.rank or d1.semisimple_rank != d2.semisimple_rank:
        return None
    n, k = d1.rank, d1.semisimple_rank
    if n == 0:
        return ()
    if k == 0:
        return linalg.identity(n)
    a1, a2 = cartan_matrix(d1), cartan_matrix(d2)
    for sigma in itertools.permutations(range(k)):
        if any(a1[i][j] != a2[sigma[i]][sigma[j]] for i in range(k) for j in range(k)):
            continue
        # unknowns: entries of M, row-major
        rows: list[list[int]] = []
        rhs: list[int] = []
        for i in range(k):
            for r in range(n):  # M @ root1_i = root2_sigma(i), row r
                coeff = [0] * (n * n)
                for c in range(n):
                    coeff[r * n + c] = d1.simple_roots[i][c]
                rows.append(coeff)
                rhs.append(d2.simple_roots[sigma[i]][r])
            for c in range(n):  # coroot2_sigma(i)^T @ M = coroot1_i^T, column c
                coeff = [0] * (n * n)
                for r in range(n):
                    coeff[r * n + c] = d2.simple_coroots[sigma[i]][r]
                rows.append(coeff)
                rhs.append(d1.simple_coroots[i][c])
        part = linalg.solve(rows, rhs)
        if part is None:
            continue
        basis = linalg.nullspace(rows, n * n)
        candidates: list[tuple[Fraction, ...]]
        if not basis:
            candidates = [part]
        else:
            if len(basis) > 6:
                basis = basis[:6]  # fixtures never need more free directions
            span = []
            for coeffs in itertools.product(range(-4, 5), repeat=len(basis)):
                vec = list(part)
                for cf, b in zip(coeffs, basis):
                    vec = [x + cf * y for x, y in zip(vec, b)]
                span.append(tuple(vec))
            candidates = span
        for flat in candidates:
            if any(x.denominator != 1 for x in flat):
                continue
            m = tuple(
                tuple(int(flat[r * n + c]) for c in range(n)) for r in range(n)
            )
            if abs(linalg.det(m)) == 1:
                return m
    return None


def load_datum(path: str | Path) -> RootDatum:
    data = json.loads(Path(path).read_text())
    return RootDatum(
        rank=data["rank"],
        simple_roots=tuple(tuple(r) for r in data["simple_roots"]),
        simple_coroots=tuple(tuple(c) for c in data["simple_coroots"]),
        name=data.get("name", Path(path).stem),
    )


def fixture(name: str) -> RootDatum:
    """Load a named datum shipped with the package."""
    ref = resources.files(__package__).joinpath(f"fixtures/{name}.json")
    data = json.loads(ref.read_text())
    return RootDatum(
        rank=data["rank"],
        simple_roots=tuple(tuple(r) for r in data["simple_roots"]),
        simple_coroots=tuple(tuple(c) for c in data["simple_coroots"]),
        name=data.get("name", name),
    )


def fixture_names() -> tuple[str, ...]:
    ref = resources.files(__package__).joinpath("fixtures")
    return tuple(sorted(p.name[:-5] for p in ref.iterdir() if p.name.endswith(".json")))
