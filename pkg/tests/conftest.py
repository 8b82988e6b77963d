"""Shared fixtures: the shipped corpus, the suite configuration, and the
generated program populations reused by several property suites."""

from __future__ import annotations

import contextlib
import functools
import time
from importlib import resources
from pathlib import Path

import pytest

from knotlang.propgen import GenConfig, config_from_mapping, generate, parse_config
from knotlang.typecheck import Mode

CORPUS = Path(str(resources.files("knotlang").joinpath("corpus")))
SUITE_CFG = Path(__file__).with_name("suite.cfg")
MODES = list(Mode)


def corpus_text(name: str) -> str:
    return (CORPUS / name).read_text(encoding="utf-8")


def corpus_programs() -> list[str]:
    return sorted(p.name for p in CORPUS.glob("*.src"))


@functools.cache
def suite_settings() -> dict[str, str]:
    return parse_config(SUITE_CFG.read_text(encoding="utf-8"))


def suite_int(key: str) -> int:
    return int(suite_settings()[key])


def generate_population(mode: Mode, count: int | None = None, max_depth: int | None = None,
                        seed_offset: int = 0) -> tuple:
    """``count`` generated programs for ``mode`` from the suite's seed range."""
    base = config_from_mapping(suite_settings())
    count = suite_int("programs") if count is None else count
    depth = base.max_depth if max_depth is None else max_depth
    first = base.seed + seed_offset
    return tuple(
        generate(GenConfig(seed=first + i, max_depth=depth, max_allocs=base.max_allocs, mode=mode,
                           level_cap=base.level_cap, weights=base.weights))
        for i in range(count)
    )


population = functools.cache(generate_population)


@pytest.fixture(params=MODES, ids=[m.value for m in MODES])
def mode(request) -> Mode:
    return request.param


# --- acceptance report ---------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@contextlib.contextmanager
def criterion(number: int, title: str):
    """Record one acceptance criterion; the body appends detail strings."""
    details: list[str] = []
    start = time.perf_counter()
    try:
        yield details
    except BaseException as err:
        ACCEPTANCE[number] = (title, False, f"{type(err).__name__}: {err}".splitlines()[0][:160])
        raise
    details.append(f"{time.perf_counter() - start:.2f}s")
    ACCEPTANCE[number] = (title, True, "; ".join(details))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title} ({detail})")
