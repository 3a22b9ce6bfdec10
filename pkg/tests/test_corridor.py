"""Tests for relative automorphisms, free actions, corridor length fields,
flare separation checks, and the corridor pairing identity."""

import copy
import random
from fractions import Fraction

import pytest

from relhyp.cayley import rel_length, truncated_ball
from relhyp.corridor import (
    Corridor,
    FreeAction,
    RelAutomorphism,
    apply_action,
    apply_automorphism,
    build_corridor,
    check_separated,
    check_uniform_flare,
    corridor_cocycle_pairing,
    encode_action,
    fn_ball,
    fn_inverse,
    fn_is_reduced,
    fn_reduce,
    fn_sphere,
    identity_automorphism,
    link_inverses,
    parse_action,
    side_retention_report,
    validate_action,
    validate_relaut,
)
from relhyp.errors import ParseError
from relhyp.presentation import Word, free_reduce
from relhyp.presets import (
    f2,
    f2_stretch_action,
    f2_stretch_action_doc,
    free_product_zz,
    hz,
    identity_action,
    xw,
    z_example,
)


def _stretch():
    """The x -> xy, y -> x example action (single basis letter)."""
    return f2_stretch_action()


def _swap_automorphism():
    """The involution x <-> y on the peripheral-free two-generator group."""
    alpha = RelAutomorphism(x_images={"x": xw("y"), "y": xw("x")},
                            sigma={}, peripheral_maps={}, conjugators={})
    alpha.inverse = alpha
    return alpha


def _conjugation_action():
    """Inner conjugation by h1(1) on the two-line integer example: the
    identity on the group, but with a nontrivial conjugator in its data."""
    P, O = z_example()
    gens = {lam: tuple(P.models[lam].generators()) for lam in P.models}
    fwd = RelAutomorphism(x_images={}, sigma={1: 1, 2: 2},
                          peripheral_maps=gens,
                          conjugators={2: Word((hz(1, 1),))})
    bwd = RelAutomorphism(x_images={}, sigma={1: 1, 2: 2},
                          peripheral_maps=gens,
                          conjugators={2: Word((hz(1, -1),))})
    link_inverses(fwd, bwd)
    return P, O, FreeAction(1, (fwd,))


def _commutator(P):
    return free_reduce(P, xw("x-", "y-", "x", "y"))


# ---------------------------------------------------------------------------
# words over the acting free group's basis


def test_basis_word_reduction_and_inversion():
    assert fn_reduce((1, -1, 2)) == (2,)
    assert fn_reduce((1, 2, -2, -1)) == ()
    assert fn_reduce((2, 1, 1)) == (2, 1, 1)
    assert fn_is_reduced((1, 2, -1))
    assert not fn_is_reduced((1, -1))
    assert fn_inverse((1, 2)) == (-2, -1)
    assert fn_reduce(fn_inverse((1, 2)) + (1, 2)) == ()
    with pytest.raises(ValueError):
        fn_reduce((1, 0))


def test_sphere_and_ball_enumeration():
    assert fn_sphere(1, 1) == [(-1,), (1,)]
    assert fn_sphere(1, 2) == [(-1, -1), (1, 1)]
    assert len(fn_sphere(2, 1)) == 4
    assert len(fn_sphere(2, 2)) == 12
    assert all(fn_is_reduced(a) for a in fn_sphere(2, 3))
    assert len(fn_ball(2, 2)) == 1 + 4 + 12
    assert fn_ball(2, 2) == fn_ball(2, 2)


# ---------------------------------------------------------------------------
# automorphism validation


def test_validation_passes_for_stretch_action():
    P, O, action = _stretch()
    assert validate_action(P, O, action)
    assert validate_relaut(P, O, action.automorphisms[0]).ok


def test_validation_passes_for_peripheral_identity():
    P, O = z_example()
    report = validate_action(P, O, identity_action(P))
    assert report.ok and report.failures == ()


def test_wrong_inverse_reported_with_witness():
    P, O = f2()
    alpha = RelAutomorphism(x_images={"x": xw("x", "y"), "y": xw("x")},
                            sigma={}, peripheral_maps={}, conjugators={})
    wrong = RelAutomorphism(x_images={"x": xw("y"), "y": xw("x")},
                            sigma={}, peripheral_maps={}, conjugators={})
    link_inverses(alpha, wrong)
    report = validate_relaut(P, O, alpha)
    assert not report.ok
    assert ("composition", "y") in report.failures
    assert ("composition-reverse", "x") in report.failures


def test_missing_inverse_reported():
    P, O = f2()
    alpha = RelAutomorphism(x_images={"x": xw("x", "y"), "y": xw("x")},
                            sigma={}, peripheral_maps={}, conjugators={})
    report = validate_relaut(P, O, alpha)
    assert not report.ok
    assert any(kind == "inverse" for kind, _ in report.failures)


def test_structural_failures_reported():
    P, O = f2()
    missing = RelAutomorphism(x_images={"x": xw("y")}, sigma={},
                              peripheral_maps={}, conjugators={})
    missing.inverse = missing
    assert any(k == "x-images"
               for k, _ in validate_relaut(P, O, missing).failures)

    Pz, Oz = z_example()
    bad_sigma = RelAutomorphism(
        x_images={}, sigma={1: 1, 2: 1},
        peripheral_maps={lam: tuple(Pz.models[lam].generators())
                         for lam in Pz.models},
        conjugators={})
    bad_sigma.inverse = bad_sigma
    assert any(k == "sigma"
               for k, _ in validate_relaut(Pz, Oz, bad_sigma).failures)

    bad_arity = RelAutomorphism(
        x_images={}, sigma={1: 1, 2: 2},
        peripheral_maps={1: (), 2: tuple(Pz.models[2].generators())},
        conjugators={})
    bad_arity.inverse = bad_arity
    assert any(k == "model-map"
               for k, _ in validate_relaut(Pz, Oz, bad_arity).failures)

    P2, O2, action = _stretch()
    assert not validate_action(
        P2, O2, FreeAction(2, action.automorphisms)).ok


def test_factor_swap_automorphism_on_free_product():
    P, O = free_product_zz()
    swap = RelAutomorphism(
        x_images={}, sigma={1: 2, 2: 1},
        peripheral_maps={1: tuple(P.models[2].generators()),
                         2: tuple(P.models[1].generators())},
        conjugators={})
    swap.inverse = swap
    assert validate_relaut(P, O, swap).ok
    image = apply_automorphism(P, swap, Word((hz(1, 1), hz(2, -2))))
    assert image == Word((hz(2, 1), hz(1, -2)))


def test_inner_conjugation_automorphism_is_valid():
    P, O, action = _conjugation_action()
    assert validate_action(P, O, action).ok
    image = apply_automorphism(P, action.automorphisms[0], Word((hz(2, 3),)))
    assert len(image) == 3
    assert O.equal(image, Word((hz(2, 3),)))


# ---------------------------------------------------------------------------
# applying automorphisms and action words


def test_apply_substitutes_and_reduces():
    P, O, action = _stretch()
    alpha = action.automorphisms[0]
    assert apply_automorphism(P, alpha, xw("x", "y")) == xw("x", "y", "x")
    assert apply_automorphism(P, alpha, xw("x-")) == xw("y-", "x-")
    comm = _commutator(P)
    assert apply_automorphism(P, alpha, comm) == \
        free_reduce(P, P.inverse_word(comm))


def test_identity_automorphism_fixes_words():
    P, O = f2()
    alpha = identity_automorphism(P)
    for w in (xw("x", "y", "x-"), xw("y-"), Word(())):
        assert apply_automorphism(P, alpha, w) == free_reduce(P, w)


def test_apply_action_rejects_bad_basis_words():
    P, O, action = _stretch()
    with pytest.raises(ValueError):
        apply_action(P, action, (1, -1), xw("x"))
    with pytest.raises(ValueError):
        apply_action(P, action, (5,), xw("x"))


def test_negative_letters_use_the_inverse_automorphism():
    P, O, action = _stretch()
    assert apply_action(P, action, (-1,), xw("x", "y")) == xw("x")
    assert apply_action(P, action, (1,), xw("x", "y")) == \
        apply_automorphism(P, action.automorphisms[0], xw("x", "y"))


def test_apply_action_composition_randomized():
    P, O, action = _stretch()
    mixed = FreeAction(2, (action.automorphisms[0], _swap_automorphism()))
    assert validate_action(P, O, mixed).ok
    rng = random.Random(7)
    ball = truncated_ball(P, O, 3, 1).vertices
    for _ in range(40):
        a = fn_reduce(rng.choices([-2, -1, 1, 2], k=rng.randrange(4)))
        b = fn_reduce(rng.choices([-2, -1, 1, 2], k=rng.randrange(4)))
        w = rng.choice(ball)
        assert apply_action(P, mixed, a, apply_action(P, mixed, b, w)) == \
            apply_action(P, mixed, fn_reduce(a + b), w)


# ---------------------------------------------------------------------------
# corridors


def test_corridor_entries_for_stretch_example():
    P, O, action = _stretch()
    corridor = build_corridor(P, O, action, xw("x"), 1)
    values = {a: L.value for a, L in corridor.entries.items()}
    assert values == {(): 1, (1,): 1, (-1,): 2}
    assert corridor.all_exact


def test_corridor_constant_under_inner_conjugation():
    P, O, action = _conjugation_action()
    corridor = build_corridor(P, O, action, Word((hz(2, 3),)), 2)
    assert {L.value for L in corridor.entries.values()} == {1}


def test_corridor_of_empty_word_is_zero():
    P, O, action = _stretch()
    corridor = build_corridor(P, O, action, Word(()), 2)
    assert set(corridor.entries) == set(fn_ball(1, 2))
    assert all(L.value == 0 for L in corridor.entries.values())


def test_corridor_base_entry_matches_relative_length():
    P, O, action = _stretch()
    for g in truncated_ball(P, O, 3, 1).vertices:
        corridor = build_corridor(P, O, action, g, 1)
        assert corridor.entries[()].value == rel_length(P, O, g).value


def test_corridor_translates_along_the_action():
    P, O, action = _stretch()
    g = xw("x", "y", "x")
    wide = build_corridor(P, O, action, g, 3)
    for b in fn_ball(1, 2):
        shifted = build_corridor(P, O, action, apply_action(P, action, b, g), 1)
        for a in fn_ball(1, 1):
            assert shifted.entries[a].value == \
                wide.entries[fn_reduce(fn_inverse(b) + a)].value


# ---------------------------------------------------------------------------
# separation checks


def test_identity_action_is_always_violated():
    P, O = f2()
    action = identity_action(P)
    for lam in (1.1, 2.0, 10.0):
        report = check_separated(P, O, action, [xw("x", "x", "x")], lam, 1, 1)
        assert report.verdict == "violated" and not report.separated
        assert all(lens == (3, 3, 3) for *_, lens in report.violations)
    Pz, Oz = z_example()
    report = check_separated(Pz, Oz, identity_action(Pz),
                             [Word((hz(1, 1),))], 1.5, 1, 1)
    assert report.verdict == "violated"
    assert report.violations[0][4] == (1, 1, 1)


def test_hand_checked_stretched_word_is_separated():
    P, O, action = _stretch()
    report = check_separated(P, O, action, [xw("x", "y")], 1.5, 1, 1)
    assert report.separated and report.violations == ()
    assert report.sample_size == 1 and report.w_radius == 1


def test_separation_parameter_validation():
    P, O, action = _stretch()
    for bad in ((1.0, 1, 1), (1.5, 0, 1), (1.5, 1, 0)):
        with pytest.raises(ValueError):
            check_separated(P, O, action, [], *bad)


def test_flare_base_check_isolates_the_periodic_commutator_orbit():
    P, O, action = _stretch()
    ball = truncated_ball(P, O, 6, 1).vertices
    report = check_uniform_flare(P, O, action, ball, 1.2, 2, 3)
    assert report.verdict == "violated"
    comm = _commutator(P)
    pair = {comm, free_reduce(P, P.inverse_word(comm))}
    assert {v[0] for v in report.violations} == pair
    assert all(v[1] == () and v[4] == (4, 4, 4) for v in report.violations)
    # independent replay: both second iterates keep length 4 < 1.2 * 4
    alpha = action.automorphisms[0]
    for g in pair:
        fwd = apply_automorphism(P, alpha, apply_automorphism(P, alpha, g))
        bwd = apply_automorphism(P, alpha.inverse,
                                 apply_automorphism(P, alpha.inverse, g))
        assert len(fwd) == 4 and len(bwd) == 4
        assert max(len(fwd), len(bwd)) < 1.2 * len(g)


def test_flare_base_check_passes_once_periodic_orbit_is_excluded():
    P, O, action = _stretch()
    comm = _commutator(P)
    pair = {comm, free_reduce(P, P.inverse_word(comm))}
    sample = [g for g in truncated_ball(P, O, 6, 1).vertices if g not in pair]
    report = check_uniform_flare(P, O, action, sample, 1.2, 2, 3)
    assert report.separated and report.sample_size == 1455


def test_flare_base_check_passes_at_higher_length_threshold():
    P, O, action = _stretch()
    ball = truncated_ball(P, O, 6, 1).vertices
    report = check_uniform_flare(P, O, action, ball, 1.2, 2, 5)
    assert report.separated and report.violations == ()


def test_corridor_wide_check_sees_off_base_dips():
    P, O, action = _stretch()
    comm = _commutator(P)
    pair = {comm, free_reduce(P, P.inverse_word(comm))}
    sample = [g for g in truncated_ball(P, O, 6, 1).vertices if g not in pair]
    report = check_separated(P, O, action, sample, 1.2, 2, 3)
    assert report.w_radius == 2
    assert report.verdict == "violated"
    assert all(v[1] != () for v in report.violations)
    assert {v[0] for v in report.violations} == {
        xw("x-", "y-", "x", "y", "x-", "y-"),
        xw("x-", "y-", "x", "y", "y", "x"),
        xw("x-", "y-", "y-", "x-", "y", "x"),
        xw("y", "x", "y-", "x-", "y", "x"),
    }
    assert all(v[4] == (7, 7, 8) for v in report.violations)


def test_bounded_metric_makes_separation_vacuous():
    P, O, action = _conjugation_action()
    sample = [Word((hz(1, k),)) for k in range(-3, 4) if k] + \
        [Word((hz(1, 1), hz(2, -2))), Word(())]
    for act in (action, identity_action(P)):
        report = check_separated(P, O, act, sample, 1.5, 1, 2)
        assert report.separated and report.violations == ()
        assert report.sample_size == len(sample)


def test_violations_grow_with_the_stretch_factor():
    P, O, action = _stretch()
    sample = truncated_ball(P, O, 4, 1).vertices
    small = check_uniform_flare(P, O, action, sample, 1.2, 2, 3)
    large = check_uniform_flare(P, O, action, sample, 1.5, 2, 3)
    keys = lambda r: {v[:4] for v in r.violations}
    assert keys(small) <= keys(large)
    if large.separated:
        assert small.separated


def test_base_slice_violations_embed_in_corridor_wide_check():
    P, O, action = _stretch()
    sample = truncated_ball(P, O, 4, 1).vertices
    base = check_uniform_flare(P, O, action, sample, 1.2, 2, 3)
    wide = check_separated(P, O, action, sample, 1.2, 2, 3)
    assert {v[:4] for v in base.violations} <= {v[:4] for v in wide.violations}
    if wide.separated:
        assert base.separated


def test_side_retention_ratios():
    P, O, action = _stretch()
    report = side_retention_report(P, O, action, xw("x", "x", "x"), 1.2, 2)
    assert report == {(-1, -1): (Fraction(2), True),
                      (1, 1): (Fraction(1), True)}
    comm = side_retention_report(P, O, action, _commutator(P), 1.2, 2)
    assert comm[(1, 1)] == (Fraction(1), True)
    assert side_retention_report(P, O, action, Word(()), 1.2, 2) == {}


# ---------------------------------------------------------------------------
# the corridor pairing identity


def test_pairing_hand_example():
    P, O, action = _stretch()
    report = corridor_cocycle_pairing(P, O, action, xw("x"), (-1,), (1,))
    assert (report.lhs, report.rhs, report.equal) == (3, 3, True)


def test_pairing_trivial_cases():
    P, O, action = _stretch()
    same = corridor_cocycle_pairing(P, O, action, xw("x", "y"), (1,), (1,))
    assert (same.lhs, same.rhs, same.equal) == (0, 0, True)
    empty = corridor_cocycle_pairing(P, O, action, Word(()), (-1,), (1, 1))
    assert (empty.lhs, empty.rhs, empty.equal) == (0, 0, True)


def test_pairing_through_peripheral_letters():
    P, O, action = _conjugation_action()
    report = corridor_cocycle_pairing(P, O, action, Word((hz(1, 2),)),
                                      (-1,), (1, 1))
    assert (report.lhs, report.rhs, report.equal) == (3, 3, True)


def test_pairing_randomized_batch():
    P, O, action = _stretch()
    rng = random.Random(11)
    ball = truncated_ball(P, O, 4, 1).vertices
    for _ in range(25):
        g = rng.choice(ball)
        u = fn_reduce(rng.choices([-1, 1], k=rng.randrange(4)))
        v = fn_reduce(rng.choices([-1, 1], k=rng.randrange(4)))
        report = corridor_cocycle_pairing(P, O, action, g, u, v)
        assert report.equal and report.lhs == report.rhs


# ---------------------------------------------------------------------------
# action documents


def test_action_document_round_trip():
    P, O = f2()
    doc = f2_stretch_action_doc()
    action = parse_action(P, doc)
    assert validate_action(P, O, action).ok
    encoded = encode_action(P, action)
    again = parse_action(P, encoded)
    assert encode_action(P, again) == encoded
    w = xw("x", "y-", "x")
    assert apply_action(P, action, (1,), w) == \
        apply_action(P, again, (1,), w)


def test_peripheral_action_document_round_trip():
    P, O, action = _conjugation_action()
    encoded = encode_action(P, action)
    again = parse_action(P, encoded)
    assert validate_action(P, O, again).ok
    w = Word((hz(2, 3),))
    assert apply_action(P, again, (1,), w) == apply_action(P, action, (1,), w)
    assert encode_action(P, again) == encoded


def test_action_document_errors():
    P, O = f2()
    good = f2_stretch_action_doc()

    with pytest.raises(ParseError):
        parse_action(P, [])
    with pytest.raises(ParseError):
        parse_action(P, {"basis": 0, "automorphisms": []})
    with pytest.raises(ParseError):
        parse_action(P, {"basis": "2", "automorphisms": []})
    with pytest.raises(ParseError):
        parse_action(P, {"basis": 2, "automorphisms": good["automorphisms"]})

    unknown = copy.deepcopy(good)
    unknown["automorphisms"][0]["x_images"]["z"] = [{"x": "x", "sign": 1}]
    with pytest.raises(ParseError) as err:
        parse_action(P, unknown)
    assert "x_images" in err.value.path

    headless = copy.deepcopy(good)
    del headless["automorphisms"][0]["inverse"]
    with pytest.raises(ParseError) as err:
        parse_action(P, headless)
    assert "automorphisms[0]" in err.value.path

    Pz, Oz, actz = _conjugation_action()
    encoded = encode_action(Pz, actz)
    stray = copy.deepcopy(encoded)
    stray["automorphisms"][0]["peripheral_maps"]["7"] = [1]
    with pytest.raises(ParseError):
        parse_action(Pz, stray)
    scalar = copy.deepcopy(encoded)
    scalar["automorphisms"][0]["peripheral_maps"]["1"] = 1
    with pytest.raises(ParseError):
        parse_action(Pz, scalar)
