import itertools
import re
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIVE_HARD, hard, soft
from floorplan.encoder import (MINIMIZE_PRODUCT, ConstraintSystem, emit_smtlib, encode,
                               encode_case1, encode_case2, encode_case3, evaluate, symbols)
from floorplan.errors import ModeMismatch
from floorplan.model import BigMParams, CoordSort, Mode, big_m_params, rects_disjoint

# emission order of the four pair inequalities and the indicator pair that selects each
SELECTORS = [(0, 0), (1, 0), (0, 1), (1, 1)]


def test_two_block_counts():
    s = encode_case1(hard((2, 1), (1, 1)))
    names = {n for n, _ in s.declarations}
    assert {"x_1", "y_1", "x_2", "y_2", "c", "d"} <= names
    assert len(s.pair_indicators) == 1
    assert len(s.group("pair")) == 4
    assert len(s.group("boundary")) + len(s.group("origin")) == 8


def test_five_block_counts():
    s = encode_case1(hard(*FIVE_HARD))
    assert len(s.pair_indicators) == 10
    assert len(s.group("pair")) == 40


def test_single_block_has_no_pairs():
    s = encode_case1(hard((4, 4)))
    assert s.group("pair") == [] and s.pair_indicators == []
    assert len(s.group("boundary")) == 2


@given(st.lists(st.tuples(st.integers(1, 9), st.integers(1, 9)), min_size=1, max_size=7),
       st.sampled_from([Mode.CASE1, Mode.CASE2]))
def test_declarations_cover_assertions(dims, mode):
    s = encode(hard(*dims, mode=mode))
    declared = [n for n, _ in s.declarations]
    assert len(declared) == len(set(declared))
    used = {sym for a in s.assertions for sym in symbols(a.formula)}
    assert used <= set(declared)
    n = len(dims)
    assert len(s.pair_indicators) == n * (n - 1) // 2


def test_mode_mismatch():
    with pytest.raises(ModeMismatch):
        encode_case2(hard((1, 2)))
    with pytest.raises(ModeMismatch):
        encode_case3(hard((1, 2)))


def test_minimal_skeleton():
    s = ConstraintSystem("e", Mode.CASE1, CoordSort.INT, BigMParams(Fraction(1), Fraction(1)))
    s.declare("x", "Int")
    text = emit_smtlib(s)
    assert text.splitlines() == ["(set-logic QF_LIA)", "(declare-const x Int)",
                                 "(check-sat)(get-model)"]


def test_two_block_literal_big_m():
    text = emit_smtlib(encode_case1(hard((2, 1), (1, 1))))
    pair_lines = [ln for ln in text.splitlines() if "px_1_2" in ln and ln.startswith("(assert (")
                  and "(and" not in ln]
    assert len(pair_lines) == 4
    assert "(* 3 (+ px_1_2 py_1_2))" in pair_lines[0]
    assert "(* 3 (+ (- 1 px_1_2) py_1_2))" in pair_lines[1]
    assert "(* 2 (- (+ 1 px_1_2) py_1_2))" in pair_lines[2]
    assert "(* 2 (- (- 2 px_1_2) py_1_2))" in pair_lines[3]


def test_minimize_directive_and_area_bound():
    s = encode_case1(hard((2, 1), (1, 1)), area_bound=3)
    text = emit_smtlib(s, objective=MINIMIZE_PRODUCT)
    assert "(minimize (* c d))" in text
    assert "(assert (<= (* c d) 3))" in text
    assert text.startswith("(set-logic QF_NIA)")
    assert emit_smtlib(encode_case1(hard((2, 1)), region_cap=(2, 1))).startswith("(set-logic QF_LIA)")


def test_emission_is_deterministic():
    inst = hard(*FIVE_HARD, mode=Mode.CASE2)
    assert emit_smtlib(encode(inst, region_cap=(20, 20))) == emit_smtlib(encode(inst, region_cap=(20, 20)))


def test_real_sorted_systems_stay_single_sorted():
    s = encode_case3(soft(4, 4))
    assert {sort for _, sort in s.declarations} == {"Real"}
    text = emit_smtlib(s)
    assert text.startswith("(set-logic QF_NRA)")
    assert "(or (= px_1_2 0.0) (= px_1_2 1.0))" in text
    assert "(assert (= (* w_1 h_1) 4.0))" in text
    assert "(assert (>= h_1 (* (/ 1.0 10.0) w_1)))" in text


def test_case2_hard_blocks_pinned():
    from floorplan.model import Block, ProblemInstance
    inst = ProblemInstance("m", (Block.hard("a", 3, 1), Block.rotatable("b", 1, 3)), Mode.CASE2)
    s = encode_case2(inst)
    fixed = s.group("fix")
    assert [a.note for a in fixed] == ["a"]


def test_case2_box_admits_a_row_of_turned_blocks():
    # (1,2) and (3,1) lie side by side at height 1 only if the region may be 5 wide,
    # more than M = max(W, H) = 4
    s = encode_case2(hard((1, 2), (3, 1), mode=Mode.CASE2))
    assert s.bounds.M == 4 and s.box == (5, 5)
    text = emit_smtlib(s)
    assert "(assert (<= c 5))" in text and "(* 5 (+ px_1_2 py_1_2))" in text


def test_y_boundary_uses_height():
    # a 1x5 block with region capped at 5 wide and 1 tall only fits rotated
    s = encode_case2(hard((1, 5), mode=Mode.CASE2))
    env = {"x_1": 0, "y_1": 0, "z_1": 1, "c": 5, "d": 1}
    assert all(evaluate(a.formula, env) for a in s.group("boundary"))
    env["z_1"] = 0
    assert not all(evaluate(a.formula, env) for a in s.group("boundary"))


def pair_env(system, placement, px, py, extra=None):
    env = dict(extra or {})
    for bid, (x, y) in placement.items():
        sym = system.symbol_table[bid]
        env[sym.x], env[sym.y] = x, y
    _, _, pxn, pyn = system.pair_indicators[0]
    env[pxn], env[pyn] = px, py
    return env


def test_pairwise_block_sound_and_complete_by_enumeration():
    """For every integer placement of two blocks in the W x H box: some indicator
    choice satisfies the four inequalities iff the rectangles are disjoint."""
    inst = hard((2, 1), (1, 2))
    s = encode_case1(inst)
    p = big_m_params(inst)
    pair = s.group("pair")
    for x1, y1, x2, y2 in itertools.product(range(int(p.W) - 1), range(int(p.H)),
                                            range(int(p.W)), range(int(p.H) - 1)):
        ok = any(all(evaluate(a.formula, pair_env(s, {"b1": (x1, y1), "b2": (x2, y2)}, px, py))
                     for a in pair) for px, py in SELECTORS)
        assert ok == rects_disjoint((x1, y1, 2, 1), (x2, y2, 1, 2))


unit = st.fractions(min_value=0, max_value=1, max_denominator=50)


@given(unit, unit, unit, unit, st.sampled_from([Mode.CASE1, Mode.CASE2]),
       st.integers(0, 1), st.integers(0, 1))
def test_big_m_vacuity(u1, v1, u2, v2, mode, z1, z2):
    inst = hard((3, 2), (1, 4), mode=mode)
    s = encode(inst)
    box_w, box_h = s.box
    env = {}
    dims = {}
    for b, z, u, v in ((inst.blocks[0], z1, u1, v1), (inst.blocks[1], z2, u2, v2)):
        w, h = (b.height, b.width) if (mode is Mode.CASE2 and z) else (b.width, b.height)
        dims[b.id] = (u * (box_w - w), v * (box_h - h))
        if mode is Mode.CASE2:
            env[s.symbol_table[b.id].z] = z
    pair = s.group("pair")
    for selected, (px, py) in enumerate(SELECTORS):
        e = pair_env(s, dims, px, py, env)
        for k, a in enumerate(pair):
            if k != selected:
                assert evaluate(a.formula, e), (k, px, py)


def test_soft_square_is_admissible():
    s = encode_case3(soft(4))
    env = {"x_1": 0, "y_1": 0, "w_1": 2, "h_1": 2, "c": 2, "d": 2}
    assert all(evaluate(a.formula, env) for a in s.assertions)


def test_soft_band_forces_narrow_shape():
    s = encode_case3(soft(4, band=(4, 10)))
    shape = s.group("shape")
    for w in [Fraction(k, 8) for k in range(1, 24)]:
        env = {"w_1": w, "h_1": 4 / w}
        assert all(evaluate(a.formula, env) for a in shape) == (4 <= (4 / w) / w <= 10)


def test_two_soft_squares_tile():
    s = encode_case3(soft(4, 4))
    env = {"x_1": 0, "y_1": 0, "w_1": 2, "h_1": 2, "x_2": 2, "y_2": 0, "w_2": 2, "h_2": 2,
           "px_1_2": 0, "py_1_2": 0, "c": 4, "d": 2}
    assert all(evaluate(a.formula, env) for a in s.assertions)


def test_symbol_table_has_mode_specific_symbols():
    s2 = encode_case2(hard((1, 2), (2, 3), mode=Mode.CASE2))
    assert all(sym.z for sym in s2.symbol_table.values())
    s3 = encode_case3(soft(3, 5))
    assert all(sym.w and sym.h and sym.z is None for sym in s3.symbol_table.values())
    assert re.fullmatch(r"x_\d+", s3.symbol_table["s1"].x)
