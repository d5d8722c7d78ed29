import random

import pytest
from hypothesis import given, strategies as st

from causaltasks.errors import InputError
from causaltasks.geometry import Point
from causaltasks.lattice import LatticeScenario
from causaltasks.scenario import (ScenarioDocument, ScenarioError, document_for, format_inline,
                                  format_scenario, parse_pattern, parse_scenario)
from causaltasks.tasks import CallMode, OriginalSignalTask, Promise, RefinedBitTask, SummoningTask

REFINED = """\
# the at-least-one variant
task = refined
promise = at_least_one
D = 8
eps = 1
"""


def test_refined_example():
    doc = parse_scenario(REFINED)
    task = doc.to_task()
    assert task == RefinedBitTask(8, 1, Promise.AT_LEAST_ONE)
    assert task.layout == (-1, 0, 8, 9) and task.deadline == 2
    assert isinstance(doc.to_scenario(), LatticeScenario)


def test_negative_distance_reports_line():
    with pytest.raises(ScenarioError) as err:
        parse_scenario(REFINED.replace("D = 8", "D = -3"))
    assert err.value.line == 4 and err.value.reason == "D must be ≥ 1"
    assert str(err.value) == "line 4: D must be ≥ 1"


def test_distance_too_short_for_eps():
    with pytest.raises(ScenarioError) as err:
        parse_scenario(REFINED.replace("eps = 1", "eps = 5"))
    assert err.value.line == 4 and "2·eps" in err.value.reason


def test_summoning_example():
    doc = parse_scenario("task=summoning\nmode=multiple\nstart=0,0\npair=0,-1 -> 3,-2\npair = 0,1->3,2  # right\n")
    task = doc.to_task()
    assert isinstance(task, SummoningTask) and task.mode is CallMode.MULTIPLE
    assert task.pair(2).ret == Point(3, (2,))


def test_original_example():
    doc = parse_scenario("task = original\nD = 6\nstates = 2\n")
    assert doc.to_task() == OriginalSignalTask(6)
    sc = doc.to_scenario(relay_site=2)
    assert doc.bounds(sc).states == 2 and doc.bounds(sc).alphabet == sc.n_symbols


def test_summoning_has_no_lattice():
    doc = parse_scenario("task=summoning\nmode=single\nstart=0,0\npair=0,0 -> 1,0\n")
    with pytest.raises(InputError):
        doc.to_scenario()


@pytest.mark.parametrize("text, line, fragment", [
    ("", None, "missing required key 'task'"),
    ("task = refined\npromise = at_least_one\nD = 8\n", None, "missing required key 'eps'"),
    ("task = nonsense\n", 1, "task must be"),
    ("task = original\nD = 8\ncolour = red\n", 3, "unknown key"),
    ("task = original\nD = 8\nD = 9\n", 3, "duplicate key"),
    ("task = original\nD = 8\nmode = single\n", 3, "does not apply"),
    ("task = original\nD = eight\n", 2, "decimal integer"),
    ("task = original\nD 8\n", 2, "expected 'key = value'"),
    ("task = refined\npromise = maybe\nD = 8\neps = 1\n", 2, "promise must be"),
    ("task = summoning\nmode = sometimes\nstart = 0,0\npair = 0,0 -> 1,0\n", 2, "mode must be"),
    ("task = summoning\nmode = single\nstart = 0\npair = 0,0 -> 1,0\n", 3, "start must be"),
    ("task = summoning\nmode = single\nstart = 0,0\npair = 0,0 - 1,0\n", 4, "pair must look like"),
    ("task = summoning\nmode = single\nstart = 0,0\npair = 0,0 -> 1,0\npair = 0,0->1,0\n", 5, "pairwise distinct"),
    ("task = original\nD = 1\n", 2, "D must be"),
    ("task = original\nD = 8\nalphabet = 1\n", 3, "alphabet must be"),
    ("task = original\nD = 8\nwindow = 3,1,5\n", 3, "window must"),
])
def test_errors(text, line, fragment):
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    assert err.value.line == line
    assert fragment in err.value.reason


def test_window_too_small_for_refined_layout():
    with pytest.raises(ScenarioError) as err:
        parse_scenario(REFINED + "window = 0,5,2\n")
    assert err.value.line == 6


def test_causally_invalid_pairs_still_parse():
    doc = parse_scenario("task=summoning\nmode=single\nstart=0,0\npair=0,0 -> 1,5\n")
    assert doc.pairs == ((0, 0, 1, 5),)


def test_bad_utf8():
    with pytest.raises(ScenarioError) as err:
        parse_scenario(b"task = refined\xff\n")
    assert "UTF-8" in err.value.reason


_ints = st.integers(-50, 50)
_pair = st.tuples(_ints, _ints, _ints, _ints)
_window = st.one_of(st.none(), st.tuples(st.integers(-20, 0), st.integers(0, 20), st.integers(0, 20)))

summoning_docs = st.builds(
    ScenarioDocument, task=st.just("summoning"), mode=st.sampled_from(["single", "multiple"]),
    start=st.tuples(_ints, _ints), pairs=st.lists(_pair, min_size=1, max_size=5, unique=True).map(tuple),
    window=_window)


@st.composite
def refined_docs(draw):
    eps = draw(st.integers(1, 5))
    return ScenarioDocument(task="refined", promise=draw(st.sampled_from(["exactly_one", "at_least_one"])),
                            D=draw(st.integers(2 * eps, 40)), eps=eps,
                            states=draw(st.one_of(st.none(), st.integers(1, 3))),
                            alphabet=draw(st.one_of(st.none(), st.integers(2, 4))))


original_docs = st.builds(ScenarioDocument, task=st.just("original"), D=st.integers(2, 40),
                          states=st.one_of(st.none(), st.integers(1, 3)))


@given(st.one_of(summoning_docs, refined_docs(), original_docs))
def test_round_trip(doc):
    text = format_scenario(doc)
    assert parse_scenario(text) == doc
    assert parse_scenario(text.encode()) == doc
    assert format_scenario(parse_scenario(text)) == text


@given(summoning_docs)
def test_inline_form_is_one_line_of_lines(doc):
    inline = format_inline(doc)
    assert "\n" not in inline and "  " not in inline
    assert parse_scenario(inline.replace(" ", "\n")) == doc


def test_document_for_task():
    doc = parse_scenario("task=summoning\nmode=single\nstart=1,2\npair=1,2 -> 4,0\n")
    assert document_for(doc.to_task()) == doc


def test_byte_fuzz_is_total():
    """Arbitrary bytes either parse or raise ScenarioError; nothing else escapes."""
    rng = random.Random(2024)
    seeds = [REFINED.encode(), b"task=summoning\nmode=single\nstart=0,0\npair=0,0 -> 1,0\n",
             b"task = original\nD = 6\nwindow = -2,8,9\n"]
    alphabet = b"=,->#\n 0123456789-+abcDepstw\xff\xc3"
    outcomes = {"ok": 0, "error": 0}
    for i in range(10_000):
        data = bytearray(rng.choice(seeds))
        for _ in range(rng.randint(1, 6)):
            op = rng.randrange(3)
            pos = rng.randrange(len(data) + 1)
            if op == 0:
                data.insert(pos, rng.choice(alphabet))
            elif op == 1 and data:
                del data[min(pos, len(data) - 1)]
            elif data:
                data[min(pos, len(data) - 1)] = rng.randrange(256)
        try:
            parse_scenario(bytes(data))
            outcomes["ok"] += 1
        except ScenarioError:
            outcomes["error"] += 1
    assert outcomes["ok"] > 0 and outcomes["error"] > 0


@pytest.mark.parametrize("task, text, expected", [
    (RefinedBitTask(8, 1), "(0,1)", (0, 1)),
    (RefinedBitTask(8, 1), "1, 1", (1, 1)),
    (OriginalSignalTask(8), "{1,2}", frozenset({1, 2})),
    (OriginalSignalTask(8), "2", frozenset({2})),
])
def test_parse_pattern(task, text, expected):
    assert parse_pattern(task, text) == expected


@pytest.mark.parametrize("task, text", [
    (RefinedBitTask(8, 1), "(0,0)"),
    (RefinedBitTask(8, 1, Promise.EXACTLY_ONE), "1,1"),
    (OriginalSignalTask(8), "{3}"),
    (OriginalSignalTask(8), "one"),
    (OriginalSignalTask(8), "{}"),
])
def test_parse_pattern_rejects(task, text):
    with pytest.raises(InputError):
        parse_pattern(task, text)
