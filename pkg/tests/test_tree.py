import dataclasses
import math

import pytest

from lychaos.errors import DeciderNotEstablished, DepthInfeasible, MalformedSpec
from lychaos.scramble import Target
from lychaos.shiftops import Norm, SparseVector
from lychaos.tree import branching, build_nested_tree, structural_problems, verify_tree
from lychaos.weights import Side, constant, piecewise

C2 = constant(2)
TWO = piecewise([(None, 0, 0.5), (1, None, 2)])


def basis(side, count, radius=1.0):
    return [Target(SparseVector.basis(side, j), radius) for j in range(1, count + 1)]


@pytest.fixture(scope="module")
def tree4():
    return build_nested_tree(C2, basis(Side.UNILATERAL, 4), 4)


def test_branching_recurrence():
    assert [branching(n) for n in range(0, 6)] == [0, 2, 6, 14, 30, 62]


def test_depth_four_sizes_and_invariants(tree4):
    assert tree4.sizes == [2, 6, 14, 30]
    assert tree4.check_invariants() == []
    for lv in tree4.levels:
        assert all(2 * b.radius < 1 / lv.n for b in lv.balls)


def test_depth_four_verifies(tree4):
    rep = verify_tree(C2, tree4)
    assert rep.passed, rep.first_failure
    assert all(c.ok for c in rep.levels)
    assert len(rep.leaf_records) > 0


def test_density_shadow(tree4):
    for lv, host in zip(tree4.levels, tree4.basis):
        inside = [b for b in lv.balls if b.parent is None]
        assert len(inside) == 2


def test_ancestors(tree4):
    # leaf slots 0 and 14 descend from the two children of level-3 ball 0
    assert tree4.ancestor(0, 3) == 0 and tree4.ancestor(14, 3) == 0
    assert tree4.ancestor(28, 3) is None
    assert tree4.ancestor(0, 1) == 0


def test_depth_one():
    t = build_nested_tree(C2, basis(Side.UNILATERAL, 1), 1)
    assert t.sizes == [2]
    assert verify_tree(C2, t).passed
    (lv,) = t.levels
    assert all(2 * b.radius < 1 for b in lv.balls)


def test_infeasible_depth_reports_max():
    with pytest.raises(DepthInfeasible) as exc:
        build_nested_tree(C2, basis(Side.UNILATERAL, 6), 6)
    assert exc.value.max_depth == 4


def test_preconditions():
    with pytest.raises(DeciderNotEstablished):
        build_nested_tree(constant(1), basis(Side.UNILATERAL, 2), 2)
    with pytest.raises(MalformedSpec):
        build_nested_tree(C2, basis(Side.UNILATERAL, 2), 3)
    with pytest.raises(MalformedSpec):
        build_nested_tree(C2, basis(Side.UNILATERAL, 2), 0)


def test_bilateral_tree():
    t = build_nested_tree(TWO, basis(Side.BILATERAL, 3), 3)
    assert t.sizes == [2, 6, 14]
    assert verify_tree(TWO, t).passed


@pytest.mark.parametrize("p", [Norm.P2, Norm.SUP])
def test_other_norms(p):
    t = build_nested_tree(C2, basis(Side.UNILATERAL, 3), 3, p)
    assert verify_tree(C2, t).passed


def test_tampering_is_detected(tree4):
    lv = tree4.levels[1]
    fat = dataclasses.replace(lv.balls[0], log_radius=math.log(0.3))
    broken = dataclasses.replace(tree4, levels=(tree4.levels[0], dataclasses.replace(lv, balls=(fat,) + lv.balls[1:]))
                                 + tree4.levels[2:])
    problems = structural_problems(broken)
    assert any("diameter" in s for s in problems) and any("nested" in s for s in problems)
    assert not verify_tree(C2, broken).passed
    swapped = dataclasses.replace(tree4, levels=tuple(dataclasses.replace(l, q_time=l.p_time) for l in tree4.levels))
    assert not verify_tree(C2, swapped).passed
