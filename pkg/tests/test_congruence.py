import numpy as np
import pytest

from varcong.congruence import (CapExceeded, EquivalenceRelation, UnionFind,
                                congruence_closure, dump_congruences,
                                enumerate_all_congruences,
                                equivalence_from_matrix, is_congruence,
                                principal_congruence_count,
                                principal_congruences)
from varcong.semigroup import build
from varcong.transform import all_transformations, compose


@pytest.fixture(scope="module")
def t2():
    return build(all_transformations(2), compose)


def test_constructors_and_canonical_labels():
    d = EquivalenceRelation.diagonal(4)
    u = EquivalenceRelation.universal(4)
    assert d.num_blocks() == 4 and u.num_blocks() == 1
    p = EquivalenceRelation.from_pairs(4, [(3, 1)])
    assert p.to_blocks() == [[0], [1, 3], [2]]
    b = EquivalenceRelation.from_blocks(4, [[1, 3], [0], [2]])
    assert b == p
    assert hash(b) == hash(p)
    with pytest.raises(ValueError):
        EquivalenceRelation.from_blocks(4, [[0, 1], [2]])  # 3 uncovered
    with pytest.raises(ValueError):
        EquivalenceRelation.from_blocks(4, [[0, 1], [1, 2], [3]])


def test_lattice_operations():
    x = EquivalenceRelation.from_pairs(5, [(0, 1), (2, 3)])
    y = EquivalenceRelation.from_pairs(5, [(1, 2), (3, 4)])
    assert x.meet(y) == EquivalenceRelation.diagonal(5)
    assert x.join(y) == EquivalenceRelation.universal(5)
    assert x.leq(x.join(y)) and x.meet(y).leq(x)
    assert not x.leq(y)
    assert x.pair_count() == 5 + 2 * 2


def test_compose_and_matrix():
    x = EquivalenceRelation.from_pairs(4, [(0, 1)])
    y = EquivalenceRelation.from_pairs(4, [(1, 2)])
    m = x.compose(y)
    assert m[0, 2] and not m[2, 0]  # one-step relational composition
    assert (x.matrix() == x.matrix().T).all()
    assert equivalence_from_matrix(x.matrix()) == x
    with pytest.raises(ValueError):
        equivalence_from_matrix(m)


def test_restrict_and_image_under():
    x = EquivalenceRelation.from_pairs(6, [(0, 1), (2, 3), (4, 5)])
    sub = x.restrict([0, 1, 4])
    assert sub.to_blocks() == [[0, 1], [2]]
    push = x.image_under(np.array([0, 0, 1, 1, 1, 2]), 3)
    assert push.num_blocks() == 2  # 4~5 forces 1~2 downstairs


def test_union_find_labels():
    uf = UnionFind(5)
    uf.union(0, 4)
    uf.union(4, 2)
    rel = EquivalenceRelation(uf.labels())
    assert rel.to_blocks() == [[0, 2, 4], [1], [3]]


def test_serialize_round_trip():
    x = EquivalenceRelation.from_pairs(4, [(0, 3)])
    assert x.serialize() == "[[0,3],[1],[2]]"
    text = dump_congruences([x, EquivalenceRelation.diagonal(4)])
    assert text.splitlines() == sorted(["[[0,3],[1],[2]]", "[[0],[1],[2],[3]]"])


def test_congruence_closure(t2):
    # closing {identity ~ swap} inside T_2
    swap = next(i for i, f in enumerate(t2.elements) if f.images == (2, 1))
    ident = t2.identity_index()
    rel = congruence_closure(t2, [(ident, swap)])
    assert is_congruence(rel, t2)
    assert rel.contains(ident, swap)
    # left translation by a constant drags the constants together
    consts = [i for i, f in enumerate(t2.elements) if len(set(f.images)) == 1]
    assert rel.contains(*consts)
    assert rel.num_blocks() == 2


def test_is_congruence_detects_failure(t2):
    swap = next(i for i, f in enumerate(t2.elements) if f.images == (2, 1))
    not_cong = EquivalenceRelation.from_pairs(4, [(t2.identity_index(), swap)])
    assert not is_congruence(not_cong, t2)


def test_enumerate_all_congruences_t2(t2):
    congs = enumerate_all_congruences(t2)
    assert len(congs) == 4
    keys = {c.key() for c in congs}
    assert EquivalenceRelation.diagonal(4).key() in keys
    assert EquivalenceRelation.universal(4).key() in keys
    for c in congs:
        assert is_congruence(c, t2)
    # sorted coarse-to-fine by block count, then by label key
    blocks = [c.num_blocks() for c in congs]
    assert blocks == sorted(blocks, reverse=True)


def test_principal_congruences(t2):
    principals = principal_congruences(t2)
    assert principal_congruence_count(t2) == len(principals)
    # principals of T_2 already form the whole lattice minus the diagonal
    assert len(principals) == 3


def test_cap_guard(t2):
    with pytest.raises(CapExceeded) as exc:
        enumerate_all_congruences(t2, cap=3)
    assert "cap" in str(exc.value)
    with pytest.raises(CapExceeded):
        principal_congruences(t2, cap=3)
