import random

import pytest

from smlab.adding import build_zmachine, z_word
from smlab.composition import pump_history, pump_machine, pump_word, simulate_composed
from smlab.machine import (
    NotAdmissible,
    NotApplicable,
    RuleRef,
    SMachineError,
    apply_rule,
    check_admissible,
    computation_stats,
    enumerate_applicable,
    remove_loops,
    run_history,
)
from smlab.machine_io import MachineParseError, dump_machine, parse_machine, parse_word
from oracles import random_lpr
from smlab.words import aletter, format_word, qletter

Z = build_zmachine(["a"])
Z2 = build_zmachine(["a", "b"])
L, R = qletter(1, "L"), qletter(3, "R")
P1 = qletter(2, "p(1)")


def w(text, m=Z):
    return parse_word(text, m)


def test_admissible_decomposition():
    d = check_admissible(w("L a0 p(1) R"), Z)
    assert [format_word((q,)) for q in d.qs] == ["L", "p(1)", "R"]
    assert [format_word(s) for s in d.sectors] == ["a0", ""]
    assert d.tapes == (1, 2)


def test_inverted_state_letter_reads_previous_tape():
    d = check_admissible(w("p(1)^-1 a0 p(1) R"), Z)
    assert d.tapes == (1, 2)


@pytest.mark.parametrize("text", ["a0 p(1) R", "L p(1) R a0", "L R", "L a0 R p(1)"])
def test_inadmissible_words(text):
    raw = []
    for tok in text.split():
        raw.append(qletter(Z.q_part_of(tok), tok) if tok in ("L", "R", "p(1)") else aletter(0, tok))
    with pytest.raises(NotAdmissible):
        check_admissible(raw, Z)


def test_tape_letter_outside_its_sector_is_rejected():
    with pytest.raises(NotAdmissible):
        check_admissible((L, P1, aletter(0, "a1"), R), Z)


def test_apply_r12():
    out, cells = apply_rule(RuleRef("r12(a)"), w("L a0 p(1) R"), Z)
    assert format_word(out) == "L a1 p(2) R"
    assert cells == 4


def test_r13_blocked_by_nonempty_left_tape():
    with pytest.raises(NotApplicable):
        apply_rule(RuleRef("r13"), w("L a0 p(1) R"), Z)


def test_state_mismatch_not_applicable():
    with pytest.raises(NotApplicable):
        apply_rule(RuleRef("r21"), w("L a0 p(1) R"), Z)


def test_inverse_roundtrip_randomized():
    rng = random.Random(11)
    checked = 0
    for _ in range(400):
        x = random_lpr(rng, Z2)
        for ref in Z2.refs():
            try:
                y, _ = apply_rule(ref, x, Z2)
            except NotApplicable:
                continue
            back, _ = apply_rule(ref.inverse(), y, Z2)
            assert back == x
            checked += 1
    assert checked > 400


def test_run_history_examples():
    start = w("L a0 p(1) R")
    c = run_history(start, [], Z)
    assert c.words == (start,) and computation_stats(c) == (0, 4, 0)
    c = run_history(start, [RuleRef("r12(a)"), RuleRef("r21")], Z)
    assert format_word(c.end) == "L a1 p(1) R"
    with pytest.raises(SMachineError):
        run_history(start, [RuleRef("r12(a)"), RuleRef("r12(a)", -1)], Z)


def test_run_history_reports_failing_step():
    with pytest.raises(NotApplicable) as info:
        run_history(w("L a0 p(1) R"), [RuleRef("r12(a)"), RuleRef("r13")], Z)
    assert info.value.step == 1


def test_determinism():
    rng = random.Random(2)
    start = z_word(["a", "a"])
    h = [RuleRef("r12(a)"), RuleRef("r21"), RuleRef("r1(a)")]
    assert run_history(start, h, Z).words == run_history(start, h, Z).words
    for _ in range(20):
        x = random_lpr(rng, Z)
        refs = enumerate_applicable(x, Z)
        if refs:
            assert run_history(x, refs[:1], Z).words == run_history(x, refs[:1], Z).words


def test_enumerate_applicable_examples():
    assert len(enumerate_applicable(w("L a0 p(1) R"), Z, length_preserving=True)) <= 2
    assert RuleRef("r2(a)") in enumerate_applicable(w("L p(2) a0 R"), Z)
    stop = w("k1 k2", pump_machine())
    assert RuleRef("eta0") in enumerate_applicable(stop, pump_machine())


def test_pump_computation():
    m = pump_machine()
    c = run_history(pump_word(0), pump_history(3), m)
    assert c.words[3] == pump_word(3)
    assert c.end == pump_word(0)
    assert computation_stats(c)[1] == 5


def test_remove_loops_splices_and_respects_the_junction_rule():
    m = pump_machine()
    h = [RuleRef("eta0"), RuleRef("eta0"), RuleRef("eta1", -1), RuleRef("eta0"), RuleRef("eta0")]
    c = remove_loops(run_history(pump_word(0), h, m))
    assert c.words == tuple(pump_word(k) for k in range(4))
    blocked = [RuleRef("eta0"), RuleRef("eta0"), RuleRef("eta1", -1), RuleRef("eta0", -1)]
    c = run_history(pump_word(0), blocked, m)
    assert remove_loops(c) == c


def test_remove_loops_on_composed_pump_run():
    base = run_history(pump_word(0), pump_history(3), pump_machine())
    full = simulate_composed(base).computation
    out = remove_loops(full)
    assert len(out.history) < len(full.history)
    assert out.start == full.start and out.end == full.end
    assert run_history(out.start, out.history, full.machine).words == out.words
    t = len(out.history)
    for i in range(1, t):
        for j in range(i + 1, t):
            if out.words[i] == out.words[j]:
                assert out.history[i - 1] == out.history[j].inverse()


def test_adding_walks_are_loop_free():
    rng = random.Random(4)
    for _ in range(100):
        start = x = random_lpr(rng, Z, 4)
        h = []
        for _ in range(30):
            opts = [r for r in enumerate_applicable(x, Z) if not h or r != h[-1].inverse()]
            if not opts:
                break
            h.append(rng.choice(opts))
            x = run_history(x, h[-1:], Z).end
        full = run_history(start, h, Z)
        assert remove_loops(full) == full


def _equal_length_runs(x, first, t, m):
    """Number of computations of length t from x starting with ``first`` that
    keep every word at the length of x."""
    size = len(x)

    def extend(word, last, depth):
        if depth == t:
            return 1
        total = 0
        for r in enumerate_applicable(word, m, length_preserving=True):
            if r == last.inverse():
                continue
            total += extend(run_history(word, [r], m).end, r, depth + 1)
        return total

    try:
        y = run_history(x, [first], m).end
    except NotApplicable:
        return 0
    if len(y) != size:
        return 0
    return extend(y, first, 1)


def test_equal_length_computations_are_unique():
    rng = random.Random(9)
    for _ in range(60):
        x = random_lpr(rng, Z, 5)
        for first in enumerate_applicable(x, Z, length_preserving=True):
            for t in range(1, 7):
                assert _equal_length_runs(x, first, t, Z) <= 1


def test_machine_file_roundtrip():
    for m in (Z2, pump_machine()):
        text = dump_machine(m)
        again = parse_machine(text)
        assert again == m
        assert dump_machine(again) == text


def test_machine_file_proper_subset_commuting_set():
    text = dump_machine(Z)
    assert "Y1={a0}" in text and "->l" in text
    assert parse_machine(text).rule("r3(a)").commuting[1] == frozenset({"a0"})


@pytest.mark.parametrize(
    "text",
    [
        "",
        "smachine v2\n",
        "smachine v1\nparts: 2\nq 1: k\n",
        "smachine v1\nparts: 1\nq 1: k\nrule r: [k -> k, k -> k]\n",
        "smachine v1\nparts: 2\nq 1: k\nq 2: m\ny 1: a\nrule r: [k -> k, m -> b m]\n",
    ],
)
def test_machine_file_errors(text):
    with pytest.raises(MachineParseError):
        parse_machine(text)
