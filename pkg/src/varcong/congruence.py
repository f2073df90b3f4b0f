"""Equivalence relations on an indexed universe, and the congruence oracle.

An equivalence is stored as a canonical block-label array: block ids are
numbered by first occurrence, so two equal partitions have identical
arrays and the bytes of the array serve as a hash key.

The oracle (enumerate_all_congruences) knows nothing about the structure
theory implemented elsewhere: it computes principal congruences by
union-find saturation against the full multiplication table and closes
the set under binary joins.
"""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

LABEL_DTYPE = np.int32


def canonical_labels(labels):
    """Relabel so block ids appear in first-occurrence order."""
    labels = np.asarray(labels)
    uniq, inv = np.unique(labels, return_inverse=True)
    first = np.full(len(uniq), len(labels), dtype=np.int64)
    np.minimum.at(first, inv, np.arange(len(labels)))
    new_id = np.empty(len(uniq), dtype=LABEL_DTYPE)
    new_id[np.argsort(first, kind="stable")] = np.arange(len(uniq), dtype=LABEL_DTYPE)
    return new_id[inv].astype(LABEL_DTYPE)


class UnionFind:
    """Plain union-find with path halving, no ranks (unions are few here)."""

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True

    def labels(self):
        return canonical_labels([self.find(x) for x in range(len(self.parent))])


class EquivalenceRelation:
    __slots__ = ("n", "block_id", "_key")

    def __init__(self, labels):
        labels = canonical_labels(labels)
        labels.flags.writeable = False
        object.__setattr__(self, "n", len(labels))
        object.__setattr__(self, "block_id", labels)
        object.__setattr__(self, "_key", labels.tobytes())

    def __setattr__(self, name, value):
        raise AttributeError("EquivalenceRelation is immutable")

    @staticmethod
    def diagonal(n):
        return EquivalenceRelation(np.arange(n))

    @staticmethod
    def universal(n):
        return EquivalenceRelation(np.zeros(n, dtype=LABEL_DTYPE))

    @staticmethod
    def from_pairs(n, pairs):
        uf = UnionFind(n)
        for x, y in pairs:
            uf.union(x, y)
        return EquivalenceRelation(uf.labels())

    @staticmethod
    def from_blocks(n, blocks):
        labels = np.full(n, -1, dtype=LABEL_DTYPE)
        for b, block in enumerate(blocks):
            for x in block:
                if labels[x] != -1:
                    raise ValueError(f"element {x} in two blocks")
                labels[x] = b
        if (labels == -1).any():
            raise ValueError("blocks do not cover the universe")
        return EquivalenceRelation(labels)

    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, EquivalenceRelation) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"EquivalenceRelation({self.num_blocks()} blocks on {self.n})"

    def num_blocks(self):
        return int(self.block_id.max()) + 1 if self.n else 0

    def contains(self, x, y):
        return self.block_id[x] == self.block_id[y]

    def blocks(self):
        out = [[] for _ in range(self.num_blocks())]
        for x, b in enumerate(self.block_id):
            out[b].append(x)
        return out

    def pair_count(self):
        """Number of ordered pairs in the relation, diagonal included."""
        sizes = np.bincount(self.block_id)
        return int((sizes.astype(np.int64) ** 2).sum())

    def leq(self, other):
        """self a refinement of other (self included in other as a relation)."""
        if self.n != other.n:
            raise ValueError("universe mismatch")
        reps = first_occurrence(self.block_id)
        return bool((other.block_id == other.block_id[reps[self.block_id]]).all())

    def meet(self, other):
        if self.n != other.n:
            raise ValueError("universe mismatch")
        k = int(other.block_id.max()) + 1 if other.n else 1
        return EquivalenceRelation(self.block_id.astype(np.int64) * k + other.block_id)

    def join(self, other):
        if self.n != other.n:
            raise ValueError("universe mismatch")
        return EquivalenceRelation(join_labels(self.block_id, other.block_id))

    def compose(self, other):
        """Relational product as a boolean matrix; not an equivalence in general."""
        if self.n != other.n:
            raise ValueError("universe mismatch")
        b1, b2 = self.block_id, other.block_id
        k1 = int(b1.max()) + 1 if self.n else 1
        k2 = int(b2.max()) + 1 if other.n else 1
        # meet[p, q] = some y has b1[y] = p and b2[y] = q
        meets = np.zeros((k1, k2), dtype=bool)
        meets[b1, b2] = True
        return meets[np.ix_(b1, b2)]

    def matrix(self):
        return self.block_id[:, None] == self.block_id[None, :]

    def restrict(self, subset):
        """Restriction to a subset, re-indexed by position in `subset`."""
        subset = np.asarray(subset)
        return EquivalenceRelation(self.block_id[subset])

    def image_under(self, mapping, target_size):
        """Equivalence on the target generated by the pushed-forward pairs."""
        mapping = np.asarray(mapping)
        uf = UnionFind(target_size)
        reps = first_occurrence(self.block_id)
        for x in range(self.n):
            uf.union(int(mapping[x]), int(mapping[reps[self.block_id[x]]]))
        return EquivalenceRelation(uf.labels())

    def to_blocks(self):
        return sorted(sorted(b) for b in self.blocks())

    def serialize(self):
        return "[" + ",".join("[" + ",".join(map(str, b)) + "]" for b in self.to_blocks()) + "]"


def first_occurrence(labels):
    """Index of the first element of each block of a canonical label array."""
    k = int(labels.max()) + 1 if len(labels) else 0
    reps = np.full(k, len(labels), dtype=np.int64)
    np.minimum.at(reps, labels, np.arange(len(labels)))
    return reps


def join_labels(b1, b2):
    """Join of two partitions given as label arrays, as canonical labels."""
    n = len(b1)
    uf = UnionFind(n)
    reps1 = first_occurrence(b1)
    reps2 = first_occurrence(np.asarray(b2))
    for x in range(n):
        uf.union(x, int(reps1[b1[x]]))
        uf.union(x, int(reps2[b2[x]]))
    return uf.labels()


def _generated_from_matrix(matrix):
    m = np.asarray(matrix, dtype=bool)
    uf = UnionFind(len(m))
    xs, ys = np.nonzero(m)
    for x, y in zip(xs.tolist(), ys.tolist()):
        uf.union(x, y)
    return m, EquivalenceRelation(uf.labels())


def relation_is_equivalence(matrix):
    m, rel = _generated_from_matrix(matrix)
    return bool((m == rel.matrix()).all())


def equivalence_from_matrix(matrix, check=True):
    """The matrix must already be an equivalence; its labels are returned."""
    m, rel = _generated_from_matrix(matrix)
    if check and not (m == rel.matrix()).all():
        raise ValueError("matrix is not an equivalence relation")
    return rel


class CapExceeded(RuntimeError):
    def __init__(self, what, size, cap):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


def _violation_pairs(mul, labels):
    """Label pairs that compatibility forces to merge, or None at fixpoint.

    For each element x let rx be the first element of its block.  Left
    compatibility needs b[s*x] = b[s*rx] for all s, right compatibility
    b[x*s] = b[rx*s]; violating positions contribute the offending product
    pairs (as block labels, deduplicated).
    """
    reps = first_occurrence(labels)
    rx = reps[labels]
    prod_labels = labels[mul]
    out = []
    left_bad = prod_labels != prod_labels[:, rx]
    if left_bad.any():
        s, x = np.nonzero(left_bad)
        out.append(np.stack([prod_labels[s, x], prod_labels[s, rx[x]]], axis=1))
    right_bad = prod_labels != prod_labels[rx, :]
    if right_bad.any():
        x, s = np.nonzero(right_bad)
        out.append(np.stack([prod_labels[x, s], prod_labels[rx[x], s]], axis=1))
    if not out:
        return None
    return np.unique(np.concatenate(out), axis=0)


def is_congruence(rel, S):
    mul = S.mul if hasattr(S, "mul") else np.asarray(S)
    if rel.n != len(mul):
        raise ValueError("relation universe does not match the semigroup")
    return _violation_pairs(mul, rel.block_id) is None


def closure_labels(mul, labels):
    """Saturate a label array to the least congruence containing it."""
    labels = canonical_labels(labels)
    while True:
        bad = _violation_pairs(mul, labels)
        if bad is None:
            return labels
        k = int(labels.max()) + 1
        uf = UnionFind(k)
        for p, q in bad.tolist():
            uf.union(p, q)
        remap = np.array([uf.find(b) for b in range(k)], dtype=LABEL_DTYPE)
        labels = canonical_labels(remap[labels])


def congruence_closure(S, pairs=(), start=None):
    """Smallest congruence of S containing the given pairs (and `start`)."""
    mul = S.mul if hasattr(S, "mul") else np.asarray(S)
    m = len(mul)
    if start is None:
        labels = np.arange(m, dtype=LABEL_DTYPE)
    else:
        labels = start.block_id
    pairs = list(pairs)
    if pairs:
        uf = UnionFind(m)
        reps = first_occurrence(labels)
        for x in range(m):
            uf.union(x, int(reps[labels[x]]))
        for x, y in pairs:
            uf.union(int(x), int(y))
        labels = uf.labels()
    return EquivalenceRelation(closure_labels(mul, labels))


def _principal_labels(mul, x, y):
    """Labels of the principal congruence (x,y)#.

    The congruence generated by a single pair is the equivalence closure
    of the translated pairs (sxt, syt) over s, t in S^1, so those are
    merged in one pass; the saturation scan then runs to fixpoint, which
    doubles as verification (it terminates immediately when the seed was
    already saturated).
    """
    m = len(mul)
    lx = np.concatenate([[x], mul[:, x]])
    ly = np.concatenate([[y], mul[:, y]])
    mx = np.concatenate([lx[:, None], mul[lx, :]], axis=1).ravel()
    my = np.concatenate([ly[:, None], mul[ly, :]], axis=1).ravel()
    graph = csr_matrix((np.ones(len(mx), dtype=np.int8), (mx, my)), shape=(m, m))
    _, labels = connected_components(graph, directed=False)
    return closure_labels(mul, labels)


def principal_congruences(S, cap=300, progress=None):
    """Distinct closures (x,y)# over all pairs, the diagonal excluded."""
    mul = S.mul if hasattr(S, "mul") else np.asarray(S)
    m = len(mul)
    if m > cap:
        raise CapExceeded("principal congruence pass", m, cap)
    seen = {}
    for x in range(m):
        if progress is not None:
            progress(x, m)
        for y in range(x + 1, m):
            rel = EquivalenceRelation(_principal_labels(mul, x, y))
            seen.setdefault(rel.key(), rel)
    return list(seen.values())


def principal_congruence_count(S, cap=300, progress=None):
    return len(principal_congruences(S, cap=cap, progress=progress))


def enumerate_all_congruences(S, cap=300, progress=None):
    """The whole congruence lattice: principal congruences, then join closure.

    Joins of congruences taken in Eq(S) are again congruences, so the BFS
    needs only partition joins; every discovered relation is nevertheless
    re-checked against the table.
    """
    mul = S.mul if hasattr(S, "mul") else np.asarray(S)
    m = len(mul)
    if m > cap:
        raise CapExceeded("congruence enumeration", m, cap)
    gens = principal_congruences(S, cap=cap, progress=progress)
    delta = EquivalenceRelation.diagonal(m)
    found = {delta.key(): delta}
    for g in gens:
        found.setdefault(g.key(), g)
    gen_labels = [g.block_id for g in gens]
    frontier = [g for g in gens]
    while frontier:
        nxt = []
        for rel in frontier:
            for gl in gen_labels:
                joined = EquivalenceRelation(join_labels(rel.block_id, gl))
                if joined.key() not in found:
                    found[joined.key()] = joined
                    nxt.append(joined)
        frontier = nxt
        if progress is not None:
            progress(len(found), None)
    out = list(found.values())
    for rel in out:
        assert is_congruence(rel, mul), "join closure left the congruence lattice"
    out.sort(key=lambda rel: (rel.n - rel.num_blocks(), rel.key()))
    return out


def dump_congruences(rels):
    """One serialized congruence per line, lexicographically sorted."""
    return "\n".join(sorted(rel.serialize() for rel in rels))
