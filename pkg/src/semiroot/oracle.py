"""Opaque-label oracle tables for the representation semiring on a window.

A table holds fresh random labels for the dominant weights in a bounded
window, the unit and duality involution, and the product decomposition of
every label pair whose Cartan component stays inside the window; other pairs
are marked out of window.  The window is closed downward under dominance, so
every component of an in-window product is itself a label.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import char_engine, linalg, root_datum
from .linalg import Vec, dot, vec_add
from .root_datum import RootDatum


class OracleError(ValueError):
    """Semiring axiom violation; the message names the axiom."""


class OracleFormatError(ValueError):
    """Malformed oracle text; the message carries the line number."""


@dataclass
class OracleTable:
    labels: tuple[str, ...]
    unit: str
    dual: dict[str, str]
    products: dict[tuple[str, str], dict[str, int] | None] = field(repr=False)

    @staticmethod
    def pair_key(x: str, y: str) -> tuple[str, str]:
        return (x, y) if x <= y else (y, x)

    def product(self, x: str, y: str) -> dict[str, int] | None:
        return self.products[self.pair_key(x, y)]

    def in_window(self, x: str, y: str) -> bool:
        return self.products[self.pair_key(x, y)] is not None


def window_weights(d: RootDatum, bound: int) -> tuple[Vec, ...]:
    """Dominant weights of the window: the coordinate box, closed under dominance.

    The box keeps every simple-coroot pairing at most `bound` and every
    torus-quotient coordinate at most `bound` in absolute value; downward
    dominance closure then adds the weights below the box.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    k = d.semisimple_rank
    q = root_datum.quotient_matrix(d)
    fmat = [list(c) for c in d.simple_coroots] + [list(row) for row in q]
    finv = linalg.invert(fmat)
    coord_bound = [int(bound * sum(abs(x) for x in row)) for row in finv]
    box: list[Vec] = []
    for x in itertools.product(*(range(-c, c + 1) for c in coord_bound)):
        pairs = d.pairing(x)
        if any(p < 0 or p > bound for p in pairs):
            continue
        if any(abs(t) > bound for t in linalg.mat_vec(q, x)):
            continue
        box.append(x)
    full: set[Vec] = set()
    for lam in box:
        full.update(char_engine.dominant_weights_of(d, lam))
    return tuple(sorted(full, reverse=True))


def _fresh_labels(count: int, rng: random.Random) -> list[str]:
    out: list[str] = []
    seen: set[str] = set()
    while len(out) < count:
        cand = f"{rng.randrange(16 ** 6):06x}"
        if cand not in seen:
            seen.add(cand)
            out.append(cand)
    return out


def materialize_oracle(
    d: RootDatum, bound: int, seed: int = 0
) -> tuple[OracleTable, dict[str, Vec]]:
    """Build the window table for a datum; also return label -> weight provenance.

    The provenance map is for harnesses and tests only; reconstruction must
    never see it.
    """
    root_datum.validate_root_datum(d)
    weights = window_weights(d, bound)
    rng = random.Random(seed)
    ids = _fresh_labels(len(weights), rng)
    label_of = dict(zip(weights, ids))
    wset = set(weights)
    products: dict[tuple[str, str], dict[str, int] | None] = {}
    for i, w1 in enumerate(weights):
        for w2 in weights[i:]:
            key = OracleTable.pair_key(label_of[w1], label_of[w2])
            if vec_add(w1, w2) not in wset:
                products[key] = None
                continue
            decomp = char_engine.tensor_decompose(d, w1, w2)
            assert all(nu in wset for nu in decomp)  # downward closure
            products[key] = {label_of[nu]: m for nu, m in decomp.items()}
    dual = {
        label_of[w]: label_of[char_engine.dual_label(d, w)] for w in weights
    }
    table = OracleTable(
        labels=tuple(sorted(ids)),
        unit=label_of[(0,) * d.rank],
        dual=dual,
        products=products,
    )
    return table, {label_of[w]: w for w in weights}


def format_oracle(t: OracleTable) -> str:
    lines = ["labels: " + " ".join(t.labels), "unit: " + t.unit]
    for x in t.labels:
        y = t.dual[x]
        if x <= y:
            lines.append(f"dual: {x} {y}")
    for x, y in sorted(t.products):
        val = t.products[(x, y)]
        if val is None:
            lines.append(f"prod {x} {y} : ?")
        else:
            body = " ".join(f"{z}*{m}" for z, m in sorted(val.items()))
            lines.append(f"prod {x} {y} : {body}")
    return "\n".join(lines) + "\n"


def parse_oracle(text: str) -> OracleTable:
    labels: tuple[str, ...] | None = None
    unit: str | None = None
    dual: dict[str, str] = {}
    products: dict[tuple[str, str], dict[str, int] | None] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("labels:"):
            labels = tuple(line[len("labels:") :].split())
        elif line.startswith("unit:"):
            parts = line[len("unit:") :].split()
            if len(parts) != 1:
                raise OracleFormatError(f"line {lineno}: unit wants one label")
            unit = parts[0]
        elif line.startswith("dual:"):
            parts = line[len("dual:") :].split()
            if len(parts) != 2:
                raise OracleFormatError(f"line {lineno}: dual wants two labels")
            dual[parts[0]] = parts[1]
            dual[parts[1]] = parts[0]
        elif line.startswith("prod "):
            try:
                head, body = line.split(":", 1)
            except ValueError:
                raise OracleFormatError(f"line {lineno}: missing ':'") from None
            parts = head.split()
            if len(parts) != 3:
                raise OracleFormatError(f"line {lineno}: prod wants two labels")
            key = OracleTable.pair_key(parts[1], parts[2])
            body = body.strip()
            if body == "?":
                products[key] = None
                continue
            val: dict[str, int] = {}
            for item in body.split():
                try:
                    z, m = item.rsplit("*", 1)
                    mult = int(m)
                except ValueError:
                    raise OracleFormatError(
                        f"line {lineno}: bad component {item!r}"
                    ) from None
                if mult < 1 or z in val:
                    raise OracleFormatError(f"line {lineno}: bad component {item!r}")
                val[z] = mult
            if not val:
                raise OracleFormatError(f"line {lineno}: empty product")
            products[key] = val
        else:
            raise OracleFormatError(f"line {lineno}: unrecognized line {line[:40]!r}")
    if labels is None or unit is None:
        raise OracleFormatError("missing labels: or unit: header")
    return OracleTable(labels=labels, unit=unit, dual=dual, products=products)


def validate_oracle(t: OracleTable, assoc_budget: int = 5000) -> None:
    """Check table well-formedness and the semiring axioms on the window.

    Raises OracleError naming the first failed axiom.  Associativity is
    checked on triples whose expansions stay fully in window, up to the
    budget, in deterministic order.
    """
    lset = set(t.labels)
    if len(t.labels) != len(lset) or not t.labels:
        raise OracleError("labels: empty or duplicated")
    if t.unit not in lset:
        raise OracleError("unit: not a label")
    for x in t.labels:
        y = t.dual.get(x)
        if y is None or y not in lset:
            raise OracleError(f"duality: no dual for {x}")
        if t.dual.get(y) != x:
            raise OracleError(f"duality: not an involution at {x}")
    if t.dual[t.unit] != t.unit:
        raise OracleError("duality: unit must be self-dual")
    for x in t.labels:
        for y in t.labels:
            if x <= y and (x, y) not in t.products:
                raise OracleError(f"closure: missing product {x} {y}")
    for key, val in t.products.items():
        if val is None:
            continue
        for z, m in val.items():
            if z not in lset:
                raise OracleError(f"closure: unknown component {z} in {key}")
            if m < 1:
                raise OracleError(f"closure: nonpositive multiplicity in {key}")
    for x in t.labels:
        row = t.product(t.unit, x)
        if row != {x: 1}:
            raise OracleError(f"unit: product with {x} must be that label alone")
    for x in t.labels:
        square = t.product(x, x)
        if square == {x: 1} and x != t.unit:
            raise OracleError(f"unit: {x} behaves like a second unit")
        pairing = t.product(x, t.dual[x])
        if pairing is not None and pairing.get(t.unit) != 1:
            raise OracleError(f"duality: unit multiplicity in {x} times its dual")

    def expand(left: dict[str, int], z: str) -> dict[str, int] | None:
        acc: dict[str, int] = {}
        for nu, c in left.items():
            cell = t.product(nu, z)
            if cell is None:
                return None
            for w, m in cell.items():
                acc[w] = acc.get(w, 0) + c * m
        return acc

    checked = 0
    for x, y, z in itertools.combinations_with_replacement(t.labels, 3):
        if checked >= assoc_budget:
            break
        xy = t.product(x, y)
        yz = t.product(y, z)
        if xy is None or yz is None:
            continue
        lhs = expand(xy, z)
        rhs = expand(yz, x)
        if lhs is None or rhs is None:
            continue
        checked += 1
        if lhs != rhs:
            raise OracleError(f"associativity: ({x} {y}) {z} differs from {x} ({y} {z})")
