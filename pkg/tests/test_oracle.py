import pytest

from semiroot import char_engine, oracle, root_datum
from semiroot.oracle import OracleError, OracleFormatError, OracleTable


def test_window_sl2():
    sl2 = root_datum.fixture("sl2")
    assert oracle.window_weights(sl2, 4) == ((4,), (3,), (2,), (1,), (0,))


def test_window_sl3_saturated():
    sl3 = root_datum.fixture("sl3")
    window = oracle.window_weights(sl3, 2)
    assert len(window) == 11
    assert (3, 0) in window and (0, 3) in window


def test_window_torus():
    t1 = root_datum.fixture("torus1")
    assert set(oracle.window_weights(t1, 2)) == {(-2,), (-1,), (0,), (1,), (2,)}


@pytest.mark.parametrize("name,bound", [("sl3", 3), ("sp4", 3), ("g2", 2)])
def test_window_downward_closed(name, bound):
    d = root_datum.fixture(name)
    window = set(oracle.window_weights(d, bound))
    box = range(-4 * bound, 4 * bound + 1)
    for lam in window:
        for mu in [(a, b) for a in box for b in box]:
            if root_datum.is_dominant(d, mu) and root_datum.dominance_leq(d, mu, lam):
                assert mu in window


def test_materialize_matches_tensor_decompose(sl3_oracle):
    d, t, prov = sl3_oracle
    inv = {v: k for k, v in prov.items()}
    for (x, y), val in t.products.items():
        if val is None:
            continue
        true = char_engine.tensor_decompose(d, prov[x], prov[y])
        assert {inv[nu]: m for nu, m in true.items()} == val


def test_materialize_marks_out_of_window(sl2_oracle):
    d, t, prov = sl2_oracle
    inv = {v: k for k, v in prov.items()}
    assert t.product(inv[(3,)], inv[(3,)]) is None
    assert t.product(inv[(1,)], inv[(3,)]) == {inv[(4,)]: 1, inv[(2,)]: 1}


def test_materialize_unit_and_dual(sl3_oracle):
    d, t, prov = sl3_oracle
    inv = {v: k for k, v in prov.items()}
    assert prov[t.unit] == (0, 0)
    assert t.dual[inv[(1, 0)]] == inv[(0, 1)]
    for x in t.labels:
        assert prov[t.dual[x]] == char_engine.dual_label(d, prov[x])


def test_labels_are_opaque(sl2_oracle):
    _, t, prov = sl2_oracle
    for x in t.labels:
        int(x, 16)
        assert len(x) == 6


def test_materialize_deterministic():
    d = root_datum.fixture("sl3")
    a, _ = oracle.materialize_oracle(d, 2, seed=9)
    b, _ = oracle.materialize_oracle(d, 2, seed=9)
    assert oracle.format_oracle(a) == oracle.format_oracle(b)
    c, _ = oracle.materialize_oracle(d, 2, seed=10)
    assert set(a.labels) != set(c.labels)


def test_format_parse_round_trip(sl3_oracle):
    _, t, _ = sl3_oracle
    text = oracle.format_oracle(t)
    back = oracle.parse_oracle(text)
    assert back == t
    assert oracle.format_oracle(back) == text


def test_parse_rejects_garbage():
    with pytest.raises(OracleFormatError, match="line 1"):
        oracle.parse_oracle("nonsense\n")
    with pytest.raises(OracleFormatError):
        oracle.parse_oracle("labels: a b\nunit: a\nprod a b : b*0\n")
    with pytest.raises(OracleFormatError):
        oracle.parse_oracle("labels: a b\nprod a b : ?\n")


@pytest.mark.parametrize(
    "name,bound",
    [("sl2", 2), ("sl2", 3), ("sl2", 4), ("pgl2", 4), ("sl3", 2), ("sl3", 3),
     ("sp4", 2), ("g2", 2), ("gl2", 3), ("torus1", 4), ("sl2xpgl2", 2)],
)
def test_validate_accepts_fixture_tables(name, bound):
    d = root_datum.fixture(name)
    t, _ = oracle.materialize_oracle(d, bound, seed=1)
    oracle.validate_oracle(t)


def _tiny_table(products):
    return OracleTable(
        labels=("e", "u"),
        unit="e",
        dual={"e": "e", "u": "u"},
        products=products,
    )


def test_validate_rejects_idempotent_nonunit():
    t = _tiny_table(
        {
            ("e", "e"): {"e": 1},
            ("e", "u"): {"u": 1},
            ("u", "u"): {"u": 1},
        }
    )
    with pytest.raises(OracleError):
        oracle.validate_oracle(t)


def test_validate_rejects_collapsed_mass_table():
    t = _tiny_table(
        {
            ("e", "e"): {"e": 1},
            ("e", "u"): {"u": 1},
            ("u", "u"): {"u": 9},
        }
    )
    with pytest.raises(OracleError):
        oracle.validate_oracle(t)


def test_validate_rejects_missing_unit_in_dual_product():
    t = _tiny_table(
        {
            ("e", "e"): {"e": 1},
            ("e", "u"): {"u": 1},
            ("u", "u"): {"u": 2, "e": 2},
        }
    )
    with pytest.raises(OracleError, match="unit"):
        oracle.validate_oracle(t)


def test_validate_rejects_broken_associativity():
    t = OracleTable(
        labels=("e", "a", "b"),
        unit="e",
        dual={"e": "e", "a": "a", "b": "b"},
        products={
            ("e", "e"): {"e": 1},
            ("a", "e"): {"a": 1},
            ("b", "e"): {"b": 1},
            ("a", "a"): {"e": 1, "a": 1},
            ("a", "b"): {"a": 1},
            ("b", "b"): {"e": 1},
        },
    )
    with pytest.raises(OracleError, match="associativity"):
        oracle.validate_oracle(t)


def test_validate_names_unknown_component():
    t = _tiny_table(
        {
            ("e", "e"): {"e": 1},
            ("e", "u"): {"u": 1},
            ("u", "u"): {"e": 1, "ghost": 1},
        }
    )
    with pytest.raises(OracleError, match="ghost"):
        oracle.validate_oracle(t)
