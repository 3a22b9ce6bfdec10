"""Oracle backends: integer lattices, normal forms, validity, plugins, and
the budgeted word-problem solver."""

import sys

import numpy as np
import pytest

from relhyp import filling
from relhyp import oracle as ora
from relhyp.errors import OracleInvalidError, ParseError
from relhyp.presentation import EMPTY_WORD, HLetter, Word, XLetter
from relhyp.presets import (
    free_product_zz,
    hz,
    x_squared,
    xw,
    z_example,
    zmod2_star,
)


# ---------------------------------------------------------------------------
# integer lattice helpers


def _matmul(A, V):
    return (np.array(A, dtype=object) @ np.array(V, dtype=object)).tolist()


def test_column_echelon_transform_identity():
    A = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    H, V, pivots = ora.column_echelon(A)
    assert _matmul(A, V) == [list(r) for r in H]
    det = round(float(np.linalg.det(np.array(V, dtype=float))))
    assert det in (1, -1)
    assert len(pivots) <= 3


def test_integer_kernel_saturated():
    (v,) = ora.integer_kernel([[1, 1]])
    assert v[0] + v[1] == 0 and abs(v[0]) == 1
    (k,) = ora.integer_kernel([[2, 4]])
    assert k in ((2, -1), (-2, 1))
    assert ora.integer_kernel([[1, 0], [0, 1]]) == []


def test_solve_integer():
    assert ora.solve_integer([[2], [0]], [4, 0]) == (2,)
    assert ora.solve_integer([[2], [0]], [3, 0]) is None
    sol = ora.solve_integer([[1, 2]], [5])
    assert sol is not None and sol[0] + 2 * sol[1] == 5


def test_reduce_mod_lattice_membership():
    ech = ora.row_echelon_lattice([(1, 1)])
    assert ora.reduce_mod(ech, (2, 2)) == (0, 0)
    assert any(ora.reduce_mod(ech, (3, 4)))
    ech2 = ora.row_echelon_lattice([(2, 0), (0, 3)])
    assert ora.reduce_mod(ech2, (4, -6)) == (0, 0)
    assert any(ora.reduce_mod(ech2, (1, 0)))


# ---------------------------------------------------------------------------
# free-product oracle


def test_free_product_normal_form_merges_syllables():
    _, O = free_product_zz()
    w = Word((hz(1, 1), hz(2, 1), hz(2, -1)))
    assert O.normal_form(w) == Word((hz(1, 1),))


def test_free_product_equality_is_order_sensitive():
    _, O = free_product_zz()
    u = Word((hz(1, 1), hz(2, 1)))
    v = Word((hz(2, 1), hz(1, 1)))
    assert not O.equal(u, v)
    assert O.equal(u, u)
    assert O.is_trivial(Word((hz(1, 2), hz(1, -2))))


def test_free_product_requires_empty_relator_set():
    P, _ = z_example()
    with pytest.raises(OracleInvalidError):
        ora.FreeProductOracle(P)


def test_free_product_peripheral_membership_and_cosets():
    _, O = free_product_zz()
    assert O.in_peripheral(Word((hz(1, 5),)), 1)
    assert not O.in_peripheral(Word((hz(1, 5),)), 2)
    assert O.in_peripheral(EMPTY_WORD, 1)
    assert not O.in_peripheral(Word((hz(1, 1), hz(2, 1))), 1)
    base = Word((hz(1, 2),))
    assert O.coset_key(base + Word((hz(2, 3),)), 2) == \
        O.coset_key(base + Word((hz(2, 7),)), 2)
    assert O.coset_key(base + Word((hz(2, 3),)), 2) != \
        O.coset_key(Word((hz(1, 3), hz(2, 3))), 2)


def test_free_product_with_finite_factors():
    _, O = zmod2_star()
    flip = HLetter(1, 1)
    assert O.is_trivial(Word((flip, flip)))
    long = Word((HLetter(1, 1), HLetter(2, 1), HLetter(1, 1), HLetter(2, 1)))
    assert len(O.normal_form(long)) == 4


# ---------------------------------------------------------------------------
# integer-quotient oracle


def test_integer_quotient_cancels_opposite_widths():
    _, O = z_example()
    assert O.normal_form(Word((hz(1, 3), hz(2, 3)))).is_empty


def test_integer_quotient_identifies_images():
    _, O = z_example()
    assert O.equal(Word((hz(1, 3),)), Word((hz(2, -3),)))
    assert not O.equal(Word((hz(1, 3),)), Word((hz(2, 3),)))


def test_integer_quotient_normal_form_is_retraction():
    _, O = z_example()
    samples = [
        EMPTY_WORD,
        Word((hz(1, 2),)),
        Word((hz(1, 2), hz(2, 5))),
        Word((hz(2, -1), hz(1, 4), hz(2, 2))),
    ]
    for u in samples:
        nf = O.normal_form(u)
        assert O.normal_form(nf) == nf
        for v in samples:
            lhs = O.normal_form(u + v)
            rhs = O.normal_form(O.normal_form(u) + O.normal_form(v))
            assert lhs == rhs


def test_integer_quotient_rejects_images_missing_the_relator():
    P, _ = z_example()
    with pytest.raises(OracleInvalidError):
        ora.IntegerQuotientOracle(P, 1, {}, {1: [(1,)], 2: [(1,)]}, None)


def test_integer_quotient_peripheral_and_coset_keys():
    _, O = z_example()
    # every element is peripheral for each factor: both map onto all of the
    # quotient
    assert O.in_peripheral(Word((hz(1, 3), hz(2, 1))), 2)
    assert O.coset_key(Word((hz(1, 4),)), 1) == O.coset_key(EMPTY_WORD, 1)


# ---------------------------------------------------------------------------
# finite-quotient oracle


def test_finite_quotient_normal_form_x_cubed():
    _, O = x_squared()
    assert O.normal_form(xw("x", "x", "x")) == xw("x")
    assert O.normal_form(xw("x", "x")).is_empty


def test_finite_quotient_relative_distances():
    _, O = x_squared()
    assert O.relative_distance(EMPTY_WORD) == 0
    assert O.relative_distance(xw("x")) == 1
    geo = O.geodesic_word(xw("x", "x", "x"))
    assert len(geo) == 1 and O.equal(geo, xw("x"))


def test_finite_quotient_rejects_non_vanishing_relator():
    P, _ = x_squared()
    z3 = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
    with pytest.raises(OracleInvalidError):
        ora.build_oracle(P, {"kind": "finite_quotient", "size": 3,
                             "table": z3, "x_images": {"x": 1}})


# ---------------------------------------------------------------------------
# configuration dispatch


def test_build_oracle_rejects_unknown_kind():
    P, _ = z_example()
    with pytest.raises(ParseError):
        ora.build_oracle(P, {"kind": "magic"})


def test_build_oracle_rejects_missing_dim():
    P, _ = z_example()
    with pytest.raises(ParseError):
        ora.build_oracle(P, {"kind": "integer_quotient"})


# ---------------------------------------------------------------------------
# plugin oracle

PLUGIN_EXPONENT_SUM = """\
import json
import sys

for line in sys.stdin:
    line = line.strip()
    if not line:
        continue
    letters = json.loads(line)
    n = 0
    for letter in letters:
        h = letter["h"]
        n += h["elem"] if h["lambda"] == 1 else -h["elem"]
    out = [] if n == 0 else [{"h": {"lambda": 1, "elem": n}}]
    sys.stdout.write(json.dumps(out) + "\\n")
    sys.stdout.flush()
"""


def test_plugin_oracle_speaks_line_json(tmp_path):
    script = tmp_path / "zplug.py"
    script.write_text(PLUGIN_EXPONENT_SUM)
    P, _ = z_example()
    with ora.build_oracle(P, {"kind": "plugin",
                              "command": [sys.executable, str(script)]}) as O:
        assert O.kind == "plugin"
        assert O.normal_form(Word((hz(1, 3), hz(2, 3)))).is_empty
        assert O.equal(Word((hz(1, 3),)), Word((hz(2, -3),)))
        # repeated queries are served from the cache
        assert O.normal_form(Word((hz(1, 3),))) == Word((hz(1, 3),))
        assert O.normal_form(Word((hz(1, 3),))) == Word((hz(1, 3),))


def test_plugin_oracle_bad_reply_is_an_oracle_error(tmp_path):
    script = tmp_path / "broken.py"
    script.write_text("import sys\n"
                      "for line in sys.stdin:\n"
                      "    sys.stdout.write('not json\\n')\n"
                      "    sys.stdout.flush()\n")
    P, _ = z_example()
    with pytest.raises(OracleInvalidError):
        ora.build_oracle(P, {"kind": "plugin",
                             "command": [sys.executable, str(script)]})


# ---------------------------------------------------------------------------
# budgeted word problem


def test_budgeted_relator_itself_has_area_one():
    P, _ = z_example()
    verdict = ora.budgeted_word_problem(P, Word((hz(1, 1), hz(2, 1))), 5, 10)
    assert isinstance(verdict, ora.Trivial) and verdict.area == 1


def test_budgeted_stacked_loop_has_area_two():
    P, _ = z_example()
    verdict = ora.budgeted_word_problem(P, Word((hz(1, 2), hz(2, 2))), 5, 10)
    assert isinstance(verdict, ora.Trivial) and verdict.area == 2


def test_budgeted_oracle_refutes_free_product_loop():
    P, O = free_product_zz()
    verdict = ora.budgeted_word_problem(P, Word((hz(1, 1), hz(2, 1))), 5, 10,
                                        oracle=O)
    assert isinstance(verdict, ora.NontrivialCertified)
    assert not verdict.witness.is_empty


def test_budgeted_unknown_when_caps_too_small():
    P, O = z_example()
    verdict = ora.budgeted_word_problem(P, Word((hz(1, 5), hz(2, 5))), 3, 10,
                                        oracle=O)
    assert isinstance(verdict, filling.Unknown)


def test_budgeted_never_contradicts_the_oracle():
    P, O = z_example()
    letters = [hz(lam, k) for lam in (1, 2) for k in (-2, -1, 1, 2)]
    words = [EMPTY_WORD]
    words += [Word((a,)) for a in letters]
    words += [Word((a, b)) for a in letters for b in letters]
    for w in words:
        verdict = ora.budgeted_word_problem(P, w, 4, 10, oracle=O)
        if O.is_trivial(w):
            assert isinstance(verdict, (ora.Trivial, filling.Unknown))
        else:
            assert isinstance(verdict, ora.NontrivialCertified)
