import math
import random
import time
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import pytest

from oracles import PlanarDiagram, binary_by_positions, random_lpr
from smlab import cli
from smlab.adding import binary_value, build_zmachine, cycle_boundaries, tape_of
from smlab.bcd import (
    WeightProfile,
    all_bcds,
    chord_dispersion,
    delete_chord,
    dispersion,
    dispersion_brute,
    dump_bcd,
    grid,
    half_disc_counts,
    is_close,
    parse_bcd,
    random_bcd,
)
from smlab.composition import compose, dump_presentation, emit_presentation, parse_presentation, pump_machine
from smlab.diagrams import check_band_bounds, glue, lower_bound_ratio, trapezium_stats
from smlab.experiments import adding_computation, compose_records, composed_pump, composed_trapezium, records_to_csv
from smlab.machine import computation_stats, enumerate_applicable, run_history
from smlab.machine_io import dump_machine, parse_machine
from smlab.words import LengthProfile

FIXTURES = Path(__file__).parent / "fixtures"
Z = build_zmachine(["a"])
Z2 = build_zmachine(["a", "b"])


def crit(k, title):
    return pytest.mark.criterion(k, title)


def closed_form(n):
    return sum((2 * k + 2) * 2 ** (n - k - 1) for k in range(n)) + 2 * n + 1


@lru_cache(maxsize=None)
def adding(n):
    return adding_computation(n)


@lru_cache(maxsize=None)
def composed(n):
    return composed_trapezium(n)


@crit(1, "full-count length matches the closed form and lies in [2^n, 6*2^n], n=1..12, under 2 s")
def test_adding_lengths(record_property):
    t0 = time.perf_counter()
    lengths = {n: len(adding(n)) for n in range(1, 13)}
    elapsed = time.perf_counter() - t0
    for n, length in lengths.items():
        assert length == closed_form(n)
        assert 2 ** n <= length <= 6 * 2 ** n
    assert elapsed < 2.0
    record_property("detail", f"l(12)={lengths[12]}, {elapsed:.2f} s")


@crit(2, "every word of the full count has the same length, n<=12")
def test_adding_constant_width(record_property):
    for n in range(1, 13):
        assert len({len(w) for w in adding(n).words}) == 1
    record_property("detail", "12 runs")


@crit(3, "tape value is c+1 after cycle c for every cycle, n<=10")
def test_counter_semantics(record_property):
    checked = 0
    for n in range(1, 11):
        c = adding(n)
        bounds = cycle_boundaries(n)
        assert len(bounds) == 2 ** n - 1
        for cycle, t in enumerate(bounds):
            assert binary_value(tape_of(c.words[t])) == cycle + 1
            checked += 1
    assert binary_by_positions([1] * 10) == 2 ** 10 - 1
    record_property("detail", f"{checked} cycles")


@crit(4, "at most two length-preserving rules apply to random LpR words")
def test_two_length_preserving_rules(record_property):
    rng = random.Random(88)
    worst = 0
    for i in range(600):
        m = Z if i % 2 else Z2
        x = random_lpr(rng, m, 8)
        worst = max(worst, len(enumerate_applicable(x, m, length_preserving=True)))
    assert worst <= 2
    record_property("detail", f"600 words, max {worst}")


def random_walk(rng, m, start, steps):
    h, x = [], start
    for _ in range(steps):
        opts = [r for r in enumerate_applicable(x, m) if not h or r != h[-1].inverse()]
        if not opts:
            break
        h.append(rng.choice(opts))
        x = run_history(x, h[-1:], m).end
    return run_history(start, h, m)


@crit(5, "random LpR computations never exceed the longer end word")
def test_width_bounded_by_ends(record_property):
    rng = random.Random(90)
    done = longest = 0
    while done < 250:
        m = Z if done % 2 else Z2
        c = random_walk(rng, m, random_lpr(rng, m, 8), rng.randint(1, 50))
        if not c.history:
            continue
        bound = max(len(c.start), len(c.end))
        assert all(len(w) <= bound for w in c.words)
        done += 1
        longest = max(longest, len(c.history))
    assert done >= 200
    record_property("detail", f"{done} computations, longest {longest}")


@crit(6, "D_1 <= r^2 - r on random and exhaustive diagrams, under 30 s")
def test_quadratic_dispersion_bound(record_property):
    t0 = time.perf_counter()
    rng = random.Random(6)
    for _ in range(1200):
        r, q = rng.randint(0, 12), rng.randint(0, 12)
        assert dispersion(random_bcd(rng, r, q)) <= r * r - r
    exhaustive = 0
    for total in range(0, 7):
        for r in range(0, total + 1):
            for d in all_bcds(r, total - r):
                assert dispersion(d) <= r * r - r
                exhaustive += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    record_property("detail", f"1200 random + {exhaustive} exhaustive, {elapsed:.1f} s")


@crit(7, "marked-chord fixture gives D_1 = 1 on the marked chord")
def test_marked_chord_fixture():
    d, K = parse_bcd((FIXTURES / "marked_chord.bcd").read_text())
    assert K == 1
    assert chord_dispersion(d)["Q1"] == 1


@crit(8, "dispersion never increases when a chord is deleted, K in {1,2,3}")
def test_deletion_monotone(record_property):
    rng = random.Random(8)
    deletions = 0
    profiles = [WeightProfile.linear(K) for K in (1, 2, 3)]
    for _ in range(520):
        d = random_bcd(rng, rng.randint(0, 8), rng.randint(0, 8))
        for p in profiles:
            base = dispersion(d, p)
            for c in d.chords():
                assert dispersion(delete_chord(d, c), p) <= base
                deletions += 1
    record_property("detail", f"{deletions} deletions")


@crit(9, "deleting a close chord drops dispersion by at least l'(l-l')/K^2")
def test_close_chord_drop(record_property):
    rng = random.Random(5)
    qualifying = skipped = 0
    for _ in range(600):
        d = random_bcd(rng, rng.randint(1, 8), rng.randint(2, 7))
        for c in d.chords("Q"):
            for cp in d.chords("Q"):
                if cp == c or not is_close(d, cp, c):
                    continue
                l, lp = len(d.crossing(c)), len(d.crossing(cp))
                cap = max(half_disc_counts(d, cp, c).values(), default=0)
                for K in (1, 2, 3, 4):
                    if cap > K:
                        skipped += 1
                        continue
                    p = WeightProfile.linear(K)
                    drop = dispersion(d, p) - dispersion(delete_chord(d, cp), p)
                    assert drop >= Fraction(lp * (l - lp), K * K)
                    qualifying += 1
    assert qualifying >= 50
    record_property("detail", f"{qualifying} qualifying, {skipped} skipped")


@crit(10, "every band stays inside its cell bracket for the adding and composed families")
def test_band_bounds(record_property):
    profile = LengthProfile.default(Z.relation_length())
    bands = 0
    for n in range(1, 11):
        t = trapezium_stats(adding(n), profile)
        assert check_band_bounds(t, Z.relation_length()) == []
        bands += t.height
    L = composed_pump().relation_length()
    for n in range(1, 13):
        t = composed(n)
        assert check_band_bounds(t, L) == []
        bands += t.height
    record_property("detail", f"{bands} bands")


@crit(11, "composed length doubles and width-n is constant, under 60 s")
def test_composed_growth(record_property):
    t0 = time.perf_counter()
    runs = {n: composed(n) for n in range(4, 15)}
    elapsed = time.perf_counter() - t0
    growth = [math.log2(runs[n + 1].height / runs[n].height) for n in range(10, 14)]
    assert all(abs(g - 1) < 0.05 for g in growth)
    offsets = {computation_stats(runs[n].computation)[1] - n for n in range(4, 14)}
    assert len(offsets) == 1
    assert elapsed < 60.0
    record_property("detail", f"max |g-1|={max(abs(g - 1) for g in growth):.4f}, width-n={offsets.pop()}, {elapsed:.1f} s")


@crit(12, "glued area >= c*l*log2(l) with one c>0, area/(d^2 log2 d) within a factor 2")
def test_quadratic_log_shape(record_property):
    glued = {n: glue(composed(n), composed(n).height) for n in range(6, 14)}
    scaled = {n: g.area / (g.height * math.log2(g.height)) for n, g in glued.items()}
    c = min(scaled.values())
    assert c > 0
    assert all(g.area >= c * g.height * math.log2(g.height) for g in glued.values())
    ratios = [lower_bound_ratio(glued[n]) for n in range(8, 14)]
    assert max(ratios) / min(ratios) <= 2.0
    record_property("detail", f"c={c:.3f}, ratio spread {max(ratios) / min(ratios):.3f}")


@crit(13, "grid dispersion is zero for h,b<=8, fast, brute and geometric agree")
def test_grid_dispersion(record_property):
    profiles = [WeightProfile.linear(K) for K in (1, 2, 3)]
    for h in range(1, 9):
        for b in range(1, 9):
            g = grid(h, b)
            for p in profiles:
                assert dispersion(g, p) == 0
                assert dispersion_brute(g, p) == 0
            if h * b <= 36:
                assert PlanarDiagram(g.boundary).dispersion(profiles[2].alpha) == 0
    record_property("detail", "64 grids")


@crit(14, "machine, diagram and presentation files round-trip; CSV is byte-stable")
def test_roundtrips(tmp_path, capsys):
    for m in (Z, Z2, pump_machine(), compose(pump_machine())):
        assert parse_machine(dump_machine(m)) == m
        p = emit_presentation(m)
        assert parse_presentation(dump_presentation(p)) == p
    rng = random.Random(14)
    for _ in range(50):
        d = random_bcd(rng, rng.randint(0, 6), rng.randint(0, 6))
        K = rng.choice((None, 1, 2, 3))
        assert parse_bcd(dump_bcd(d, K)) == (d, K)
    assert records_to_csv(compose_records(8)) == records_to_csv(compose_records(8))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["compose", "run", "--n-max", "7", "--csv", str(path)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
