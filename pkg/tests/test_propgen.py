from __future__ import annotations

import pytest

from conftest import SUITE_CFG, population, suite_settings
from knotlang.context import EMPTY
from knotlang.errors import TypingError
from knotlang.eval import Machine
from knotlang.propgen import (
    DEFAULT_WEIGHTS,
    GenConfig,
    config_from_mapping,
    generate,
    parse_config,
    ref_depth,
    shrink,
    term_size,
)
from knotlang.syntax import NAT, Assign, Lam, Let, Lit, New, Ref, UnitV, parse_source
from knotlang.syntax.ast import subterms
from knotlang.typecheck import Mode, check_source, typecheck_source


def test_every_generated_program_type_checks(mode):
    programs = population(mode)
    assert len(programs) >= 1000
    for e in programs:
        typecheck_source(EMPTY, e, mode)


def test_generation_rarely_falls_back(mode):
    fallbacks = sum(e == Lit(0) for e in population(mode))
    assert fallbacks < len(population(mode)) // 20


def test_generated_programs_use_the_store_and_closures(mode):
    kinds = {type(n).__name__ for e in population(mode, 200) for n in subterms(e)}
    assert {"Lam", "App", "New", "Deref", "Assign", "Seq", "Let"} <= kinds


def test_sorted_generation_reaches_higher_levels():
    levels = set()
    for e in population(Mode.SORTED, 300):
        for node in check_source(EMPTY, e, Mode.SORTED).walk():
            if node.rule == "Lam":
                levels.add(node.type.level)
    assert {0, 1} <= levels


def test_generation_is_reproducible():
    cfg = GenConfig(seed=42, mode=Mode.SORTED)
    assert generate(cfg) == generate(cfg)
    assert generate(GenConfig(seed=42, mode=Mode.SORTED)) == generate(cfg)


def test_different_seeds_differ():
    assert len({generate(GenConfig(seed=s)) for s in range(50)}) > 40


@pytest.mark.parametrize("seed", range(20))
def test_depth_zero_programs_are_leaves(seed):
    e = generate(GenConfig(seed=seed, max_depth=0, mode=Mode.UNRESTRICTED))
    assert isinstance(e, (Lit, UnitV))


def test_level_cap_bounds_reference_nesting():
    for seed in range(300):
        e = generate(GenConfig(seed=seed, mode=Mode.SORTED, level_cap=2))
        for node in check_source(EMPTY, e, Mode.SORTED).walk():
            assert ref_depth(node.type) <= 2


def test_level_cap_is_validated():
    with pytest.raises(ValueError):
        GenConfig(level_cap=4)


def test_generated_lambdas_carry_no_level_annotation():
    for e in population(Mode.SORTED, 300):
        assert all(n.level is None for n in subterms(e) if isinstance(n, Lam))


def test_refs_and_lambdas_each_get_a_quarter_of_the_weight():
    total = sum(DEFAULT_WEIGHTS.values())
    assert DEFAULT_WEIGHTS["lam"] / total >= 0.25
    assert DEFAULT_WEIGHTS["ref"] / total >= 0.25


def test_ref_depth():
    assert ref_depth(NAT) == 0
    assert ref_depth(Ref(Ref(NAT))) == 2


# --- shrinking ------------------------------------------------------------------------


def _well_typed(e) -> bool:
    try:
        typecheck_source(EMPTY, e, Mode.UNRESTRICTED)
    except TypingError:
        return False
    return True


def _assigns(e) -> bool:
    """Failing predicate: a well-typed program whose run performs an assignment."""
    if not _well_typed(e):
        return False
    rules = []
    Machine(1000, lambda r: rules.append(r.rule)).run(e)
    return "assign" in rules


def test_shrink_drops_an_irrelevant_let():
    e = parse_source("let junk = 5 in let r = new 0 in r := 1")
    out = shrink(e, _assigns)
    assert _assigns(out)
    assert not any(isinstance(n, Let) and n.name == "junk" for n in subterms(out))


def test_shrink_reduces_an_assignment_chain_to_new_and_assign():
    e = parse_source("let r = new 3 in let s = new 4 in r := 5; s := !r; r := !s; !r")
    out = shrink(e, _assigns)
    assert _assigns(out)
    kinds = [type(n) for n in subterms(out)]
    assert kinds.count(New) == 1 and kinds.count(Assign) == 1
    # shrinking never inlines a let, so the binding survives
    assert out == parse_source("let r = new 0 in r := 0")


def test_shrink_keeps_a_minimal_term():
    assert shrink(Lit(0), lambda e: True) == Lit(0)
    minimal = parse_source("new 0 := 0")
    assert shrink(minimal, _assigns) == minimal


def test_shrink_output_always_fails():
    def failing(e) -> bool:
        return _well_typed(e) and any(isinstance(n, Lam) for n in subterms(e))

    for e in population(Mode.UNRESTRICTED, 100):
        if failing(e):
            out = shrink(e, failing)
            assert failing(out)
            assert term_size(out) <= term_size(e)


# --- suite configuration ----------------------------------------------------------------


def test_parse_config():
    text = "# comment\nseed = 7\nmode = sorted  # trailing\n\nweight.lam = 9\n"
    values = parse_config(text)
    assert values == {"seed": "7", "mode": "sorted", "weight.lam": "9"}
    cfg = config_from_mapping(values)
    assert (cfg.seed, cfg.mode, cfg.weights["lam"], cfg.weights["ref"]) == (7, Mode.SORTED, 9.0, 4.0)


def test_parse_config_rejects_malformed_lines():
    with pytest.raises(ValueError):
        parse_config("seed 7")
    with pytest.raises(ValueError):
        config_from_mapping({"weight.bogus": "1"})


def test_suite_configuration_file():
    values = suite_settings()
    assert SUITE_CFG.exists()
    cfg = config_from_mapping(values)
    assert cfg.max_depth <= 8 and cfg.level_cap <= 3
    assert int(values["programs"]) >= 1000
