import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holonomy_lab.dsl import (
    BinOp,
    Call,
    Const,
    Imag,
    Neg,
    Num,
    Param,
    SPINOR_TEXT,
    builtin_spinor_family,
    eval_node,
    parse_expression,
    parse_family,
    to_text,
)
from holonomy_lab.errors import DSLError, DSLSyntaxError, EvaluationError, HermiticityError


def test_cartesian_family():
    fam = parse_family("[[x, y],[y, -x]]", ["x", "y"])
    assert fam.dimension == 2
    np.testing.assert_array_equal(fam.evaluate((1.0, 0.0)), [[1, 0], [0, -1]])
    np.testing.assert_array_equal(fam.evaluate((0.3, -0.7)), [[0.3, -0.7], [-0.7, -0.3]])


def test_polar_family():
    fam = parse_family(SPINOR_TEXT, ["r", "phi"])
    np.testing.assert_allclose(fam.evaluate((1.0, math.pi / 2)), [[0, 1], [1, 0]], atol=1e-16)


def test_whitespace_insensitive():
    a = parse_family("[[x,y],[y,-x]]", ["x", "y"])
    b = parse_family(" [ [ x ,\n y ] ,\t[y, - x ]\n]", ["x", "y"])
    assert a == b


def test_sigma_y_is_hermitian():
    fam = parse_family("[[0, i],[-i, 0]]")
    np.testing.assert_array_equal(fam.evaluate(()), [[0, 1j], [-1j, 0]])


def test_unicode_minus_accepted():
    fam = parse_family("[[0, i],[−i, 0]]")
    np.testing.assert_array_equal(fam.evaluate(()), [[0, 1j], [-1j, 0]])


def test_builtin_is_identical_to_parsed_text():
    fam = builtin_spinor_family()
    assert fam == parse_family("[[r*cos(phi), r*sin(phi)],[r*sin(phi), -r*cos(phi)]]", ["r", "phi"])
    np.testing.assert_array_equal(fam.evaluate((2.0, 0.0)), [[2, 0], [0, -2]])
    np.testing.assert_allclose(fam.evaluate((1.0, math.pi)), [[-1, 0], [0, 1]], atol=1e-15)


def test_builtin_eigenvalues_are_plus_minus_r(rng):
    fam = builtin_spinor_family()
    for r, phi in zip(rng.uniform(0.1, 5, 50), rng.uniform(-7, 7, 50)):
        w = np.linalg.eigvalsh(fam.evaluate((r, phi)))
        np.testing.assert_allclose(w, [-r, r], atol=1e-12)


@pytest.mark.parametrize("text, line, col", [
    ("[[x, y],[y, x", 1, 14),
    ("[[x, y],\n [y, x +]]", 2, 9),
    ("[[x, y] [y, x]]", 1, 9),
    ("[[x $ y],[y, x]]", 1, 5),
    ("[[x, y],[y, x]] junk", 1, 17),
    ("[[sin x, y],[y, x]]", 1, 7),
])
def test_syntax_errors_report_position(text, line, col):
    with pytest.raises(DSLSyntaxError) as info:
        parse_family(text, ["x", "y"])
    assert (info.value.line, info.value.column) == (line, col)
    assert f"line {line}, column {col}" in str(info.value)


@pytest.mark.parametrize("text, params, fragment", [
    ("[[x, y, 0],[y, -x, 0]]", ["x", "y"], "not square"),
    ("[[x, z],[z, -x]]", ["x"], "undeclared identifier 'z'"),
    ("[]", [], "empty matrix"),
    ("[[x]]", ["x"], "at least 2"),
    ("[[foo(x), 0],[0, x]]", ["x"], "unknown function"),
    ("[[x, 0],[0, x]]", ["x", "x"], "duplicate"),
    ("[[pi, 0],[0, pi]]", ["pi"], "reserved"),
])
def test_semantic_errors(text, params, fragment):
    with pytest.raises(DSLError, match=fragment):
        parse_family(text, params)


def test_non_hermitian_rejected_with_deviation():
    fam = parse_family("[[0, x],[0, 0]]", ["x"])
    with pytest.raises(HermiticityError) as info:
        fam.evaluate((0.5,))
    assert info.value.deviation == pytest.approx(0.5)
    # within tolerance it passes untouched
    assert fam.evaluate((0.0,)).tolist() == [[0, 0], [0, 0]]


def test_division_by_zero_names_entry():
    fam = parse_family("[[1/x, 0],[0, 1]]", ["x"])
    with pytest.raises(EvaluationError, match=r"entry \[0\]\[0\]"):
        fam.evaluate((0.0,))
    with pytest.raises(EvaluationError):
        parse_family("[[1/0, 0],[0, 1]]").evaluate(())


def test_complex_functions():
    fam = parse_family("[[sqrt(0-1)*0, exp(i*x)],[exp(-i*x), tan(0)]]", ["x"])
    H = fam.evaluate((0.3,))
    assert H[0, 1] == pytest.approx(np.exp(0.3j))
    assert parse_expression("sqrt(-4)").__class__ is Call
    assert complex(eval_node(parse_expression("sqrt(-4)"), {})) == pytest.approx(2j)
    neg = parse_family("[[sqrt(x)*0 + 1, 0],[0, 1]]", ["x"])
    assert neg.evaluate((-1.0,))[0, 0] == 1
    assert complex(eval_node(parse_expression("2*pi - e"), {})) == pytest.approx(2 * math.pi - math.e)


def test_batch_evaluation_matches_pointwise(rng):
    fam = parse_family("[[x*y, cos(x) + i*y],[cos(x) - i*y, exp(y)]]", ["x", "y"])
    pts = rng.normal(size=(20, 2))
    batch = fam.evaluate_many(pts)
    for k, p in enumerate(pts):
        np.testing.assert_array_equal(batch[k], fam.evaluate(p))


def test_cartesian_and_polar_forms_agree(rng):
    cart = parse_family("[[x, y],[y, -x]]", ["x", "y"])
    polar = builtin_spinor_family()
    r = rng.uniform(0, 10, 200)
    phi = rng.uniform(-10, 10, 200)
    a = cart.evaluate_many(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))
    b = polar.evaluate_many(np.column_stack([r, phi]))
    np.testing.assert_allclose(a, b, atol=1e-12)


# --- roundtrip property -------------------------------------------------

leaves = st.one_of(
    st.floats(min_value=0, max_value=1e3, allow_nan=False).map(Num),
    st.just(Imag()),
    st.sampled_from([Const("pi"), Const("e")]),
    st.sampled_from([Param("x"), Param("y")]),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(st.sampled_from(["sin", "cos", "tan", "exp", "sqrt"]), children).map(lambda t: Call(*t)),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


def _same(a, b):
    a = np.broadcast_to(np.asarray(a, dtype=complex), (100,))
    b = np.broadcast_to(np.asarray(b, dtype=complex), (100,))
    return np.array_equal(a, b, equal_nan=True)


@settings(max_examples=200, deadline=None)
@given(trees)
def test_print_parse_roundtrip(tree):
    text = to_text(tree)
    reparsed = parse_expression(text, ["x", "y"])
    assert to_text(reparsed) == text
    pts = np.random.default_rng(7).normal(size=(100, 2)) * 3
    env = {"x": pts[:, 0].astype(complex), "y": pts[:, 1].astype(complex)}
    with np.errstate(all="ignore"):
        assert _same(eval_node(tree, env), eval_node(reparsed, env))


def test_matrix_roundtrip(rng):
    fam = parse_family("[[x - (y - 1), -(x*y)/2],[-(x*y)/(2), 1 - -x]]", ["x", "y"])
    again = parse_family(fam.expr.to_text(), ["x", "y"])
    assert again == fam
    pts = rng.normal(size=(100, 2))
    np.testing.assert_array_equal(fam.evaluate_many(pts), again.evaluate_many(pts))
