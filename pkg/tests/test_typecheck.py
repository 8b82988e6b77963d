from __future__ import annotations

import warnings

import pytest

from conftest import corpus_text, population
from knotlang.context import EMPTY, Context
from knotlang.errors import ErrorKind, TypingError
from knotlang.sorts import sort_of_source
from knotlang.syntax import NAT, Arrow, Lam, Ref, erase_levels, free_vars, parse_source, parse_type
from knotlang.typecheck import ArrowLevelDefaulted, Mode, check_source, explain, typecheck_source

KNOT_VARIANTS = ["knot.src", "knot_eta.src", "knot_let.src", "knot_pair.src"]


def check(text: str, mode: Mode, ctx: Context = EMPTY):
    return typecheck_source(ctx, parse_source(text), mode)


def error(text: str, mode: Mode, ctx: Context = EMPTY) -> TypingError:
    with pytest.raises(TypingError) as info:
        check(text, mode, ctx)
    return info.value


# --- the knot ---------------------------------------------------------------------


def test_knot_is_well_typed_without_restrictions():
    assert check(corpus_text("knot.src"), Mode.UNRESTRICTED) == NAT


def test_full_ground_rejects_the_capture_of_r():
    err = error(corpus_text("knot.src"), Mode.FULL_GROUND)
    assert err.kind is ErrorKind.NonFullGroundCapture
    assert isinstance(err.term, Lam)
    assert (err.loc.line, err.loc.col) == (3, 9)
    assert err.found == "Ref (Nat -> Nat)"


def test_sorted_rejects_the_backpatch():
    err = error(corpus_text("knot.src"), Mode.SORTED)
    assert err.kind is ErrorKind.SortMismatch
    assert (err.loc.line, err.loc.col) == (4, 1)
    assert (err.expected, err.found) == ("Nat ->[0] Nat", "Nat ->[1] Nat")
    assert err.render("knot.src") == "knot.src:4:1: SortMismatch: expected Nat ->[0] Nat, found Nat ->[1] Nat"


@pytest.mark.parametrize("name", KNOT_VARIANTS)
def test_every_knot_variant_is_rejected_by_both_restrictions(name):
    text = corpus_text(name)
    assert check(text, Mode.UNRESTRICTED) == NAT
    assert error(text, Mode.FULL_GROUND).kind is ErrorKind.NonFullGroundCapture
    assert error(text, Mode.SORTED).kind is ErrorKind.SortMismatch


def test_no_backpatch_variant_is_sorted():
    assert check(corpus_text("knot_nobackpatch.src"), Mode.SORTED) == NAT


# --- sorted lambdas -----------------------------------------------------------------


def test_closed_lambda_is_level_zero():
    assert check("lam x : Nat . x", Mode.SORTED) == Arrow(NAT, NAT, 0)


def test_lambda_capturing_a_reference_is_level_one():
    text = "let r = new (lam x : Nat . x) in (lam x : Nat . (!r) x) 5"
    assert check(text, Mode.SORTED) == NAT
    d = check_source(EMPTY, parse_source(text), Mode.SORTED)
    lams = [n for n in d.walk() if n.rule == "Lam"]
    assert sorted(n.type.level for n in lams) == [0, 1]


def test_annotation_must_equal_the_inferred_level():
    ctx = Context.of(r=Ref(NAT))
    assert check("lam [1] x : Nat . !r", Mode.SORTED, ctx) == Arrow(NAT, NAT, 1)
    err = error("lam [2] x : Nat . !r", Mode.SORTED, ctx)
    assert err.kind is ErrorKind.SortMismatch
    # cumulativity is not implemented: a level-0 lambda is not a level-1 one
    assert error("lam [1] x : Nat . x", Mode.SORTED).kind is ErrorKind.SortMismatch


def test_annotations_are_ignored_without_sorts():
    assert check("lam [3] x : Nat . x", Mode.UNRESTRICTED) == Arrow(NAT, NAT)


def test_parameter_arrows_default_to_level_zero_with_a_warning():
    with pytest.warns(ArrowLevelDefaulted):
        ty = check("lam g : Nat -> Nat . g 1", Mode.SORTED)
    assert ty == Arrow(Arrow(NAT, NAT, 0), NAT, 0)


def test_leveled_parameter_arrows_are_kept():
    with warnings.catch_warnings():
        warnings.simplefilter("error", ArrowLevelDefaulted)
        ty = check("lam g : Nat ->[1] Nat . g 1", Mode.SORTED)
    assert ty == Arrow(Arrow(NAT, NAT, 1), NAT, 0)


def test_levels_are_compared_exactly_in_application():
    text = "let r = new 0 in (lam g : Nat ->[0] Nat . g 1) (lam x : Nat . !r)"
    assert error(text, Mode.SORTED).kind is ErrorKind.SortMismatch
    assert check(text, Mode.UNRESTRICTED) == NAT


def test_full_ground_checks_nested_lambdas():
    # the outer lambda captures nothing; the inner one captures g
    text = "lam y : Nat . let g = lam x : Nat . x in lam z : Nat . g z"
    err = error(text, Mode.FULL_GROUND)
    assert err.kind is ErrorKind.NonFullGroundCapture
    assert (err.loc.line, err.loc.col) == (1, 42)


def test_full_ground_allows_ground_captures():
    assert check("let r = new 0 in lam x : Nat . r := x", Mode.FULL_GROUND) == Arrow(NAT, parse_type("Unit"))


# --- structural errors ----------------------------------------------------------------


@pytest.mark.parametrize(
    "text, kind",
    [
        ("y", ErrorKind.UnboundVariable),
        ("lam x : Nat . y", ErrorKind.UnboundVariable),
        ("1 2", ErrorKind.NotAFunction),
        ("!1", ErrorKind.NotARef),
        ("1 := 2", ErrorKind.NotARef),
        ("proj1 1", ErrorKind.NotAProduct),
        ("(lam x : Nat . x) unit", ErrorKind.Mismatch),
        ("new 0 := unit", ErrorKind.Mismatch),
        ("1; 2", ErrorKind.Mismatch),
    ],
)
def test_structural_errors_in_every_mode(text, kind, mode):
    assert error(text, mode).kind is kind


def test_structural_rules():
    assert check("<1, unit>", Mode.SORTED) == parse_type("<Nat x Unit>")
    assert check("proj2 <1, unit>", Mode.SORTED) == parse_type("Unit")
    assert check("let r = new 1 in r := 2; !r", Mode.SORTED) == NAT
    assert check("new new 0", Mode.SORTED) == parse_type("Ref Ref Nat")


def test_restricted_errors_only_in_their_modes():
    text = corpus_text("knot.src")
    kinds = {}
    for mode in Mode:
        try:
            check(text, mode)
        except TypingError as err:
            kinds[mode] = err.kind
    assert kinds == {Mode.FULL_GROUND: ErrorKind.NonFullGroundCapture, Mode.SORTED: ErrorKind.SortMismatch}


# --- derivations ------------------------------------------------------------------------


def test_explain_unit_is_a_single_node():
    d = explain(parse_source("unit"), Mode.SORTED)
    assert (d.rule, d.premises) == ("Unit", [])
    assert d.render() == "[Unit] . |- unit : Unit :: Type 0"


def test_explain_raises_like_the_checker():
    with pytest.raises(TypingError):
        explain(parse_source(corpus_text("knot.src")), Mode.SORTED)


# --- properties over generated programs ---------------------------------------------------


def test_mode_monotonicity():
    for mode in (Mode.FULL_GROUND, Mode.SORTED):
        for e in population(mode, 300):
            ty = typecheck_source(EMPTY, e, mode)
            assert typecheck_source(EMPTY, e, Mode.UNRESTRICTED) == erase_levels(ty)


def test_determinism():
    for e in population(Mode.SORTED, 100):
        assert check_source(EMPTY, e, Mode.SORTED) == check_source(EMPTY, e, Mode.SORTED)


def test_lambda_levels_are_sound():
    """Every sorted lambda's level is recomputed from its captures in the tree."""
    lambdas = 0
    for e in population(Mode.SORTED, 300):
        for node in check_source(EMPTY, e, Mode.SORTED).walk():
            if node.rule != "Lam":
                continue
            lambdas += 1
            expected = max((sort_of_source(node.ctx, node.ctx.lookup(v)) for v in free_vars(node.subject)),
                           default=0)
            assert node.type.level == expected
            assert node.sort == node.type.level
    assert lambdas > 100
