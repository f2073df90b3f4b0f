"""Total transformations of a finite set {1..n}.

Composition is left-to-right throughout: x(fg) = (xf)g.  Externally
everything is one-indexed; tuples of images are the value identity of a
transformation.
"""

from itertools import product


class Transformation:
    """A total map on {1..n}, stored as the tuple of images of 1..n."""

    __slots__ = ("n", "images")

    def __init__(self, images):
        images = tuple(int(x) for x in images)
        n = len(images)
        if n == 0:
            raise ValueError("empty transformation")
        for x in images:
            if not 1 <= x <= n:
                raise ValueError(f"image value {x} outside 1..{n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Transformation is immutable")

    def __call__(self, x):
        return self.images[x - 1]

    def __eq__(self, other):
        return isinstance(other, Transformation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Transformation({list(self.images)})"

    def __str__(self):
        return format_transformation(self)


def compose(f, g):
    """f then g: x(fg) = (xf)g."""
    if f.n != g.n:
        raise ValueError(f"domain mismatch: {f.n} vs {g.n}")
    return Transformation(g.images[x - 1] for x in f.images)


def image(f):
    return frozenset(f.images)


def kernel(f):
    """Kernel classes as a tuple of sorted tuples, ordered by minimum."""
    classes = {}
    for x in range(1, f.n + 1):
        classes.setdefault(f.images[x - 1], []).append(x)
    return tuple(sorted((tuple(c) for c in classes.values()), key=lambda c: c[0]))


def rank(f):
    return len(set(f.images))


def is_idempotent(f):
    return compose(f, f) == f


def is_permutation(f):
    return rank(f) == f.n


def identity(n):
    return Transformation(range(1, n + 1))


def constant(n, x):
    return Transformation([x] * n)


def inverse(p):
    if not is_permutation(p):
        raise ValueError("not a permutation")
    inv = [0] * p.n
    for x in range(1, p.n + 1):
        inv[p.images[x - 1] - 1] = x
    return Transformation(inv)


def all_transformations(n):
    """All of T_n in lexicographic order of image tuples."""
    return [Transformation(t) for t in product(range(1, n + 1), repeat=n)]


def idempotents(n):
    return [f for f in all_transformations(n) if is_idempotent(f)]


def parse_transformation(text):
    """Parse the line format 'n: i1 i2 ... in', e.g. '4: 1 2 3 3'."""
    head, sep, tail = text.partition(":")
    if not sep:
        raise ValueError(f"missing ':' in transformation {text!r}")
    try:
        n = int(head.strip())
    except ValueError:
        raise ValueError(f"bad domain size in {text!r}") from None
    parts = tail.split()
    if len(parts) != n:
        raise ValueError(f"expected {n} images in {text!r}, got {len(parts)}")
    return Transformation(int(p) for p in parts)


def format_transformation(f):
    return f"{f.n}: " + " ".join(str(x) for x in f.images)


class SandwichElement:
    """An idempotent a with its kernel blocks A_1..A_r and image points a_i.

    Blocks are ordered by their minimum element; a_i is the unique image
    point inside A_i (an idempotent fixes its image, so each kernel class
    holds exactly one image point).
    """

    __slots__ = ("a", "blocks", "reps", "r", "n")

    def __init__(self, a):
        if not is_idempotent(a):
            raise ValueError(f"{a} is not idempotent; normalize_sandwich first")
        blocks = kernel(a)
        reps = []
        img = image(a)
        for block in blocks:
            inside = [x for x in block if x in img]
            assert len(inside) == 1
            reps.append(inside[0])
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "reps", tuple(reps))
        object.__setattr__(self, "r", len(blocks))
        object.__setattr__(self, "n", a.n)
        assert set(self.reps) == set(img)

    def __setattr__(self, name, value):
        raise AttributeError("SandwichElement is immutable")

    def block_sizes(self):
        return tuple(len(b) for b in self.blocks)

    def __eq__(self, other):
        return isinstance(other, SandwichElement) and self.a == other.a

    def __hash__(self):
        return hash(self.a)

    def __repr__(self):
        return f"SandwichElement({format_transformation(self.a)!r})"


def normalize_sandwich(a):
    """Permutation p and idempotent a' = ap with T^a isomorphic to T^{a'}.

    The isomorphism is f -> p^{-1} f.  Choice of p is deterministic: the
    image point of each kernel block of a is sent to the block's minimum,
    and the remaining points are matched up in increasing order.
    """
    blocks = kernel(a)
    p_map = {}
    for block in blocks:
        v = a.images[block[0] - 1]  # common image of the block
        p_map[v] = block[0]
    sources = [x for x in range(1, a.n + 1) if x not in p_map]
    targets = [x for x in range(1, a.n + 1) if x not in set(p_map.values())]
    for s, t in zip(sources, targets):
        p_map[s] = t
    p = Transformation(p_map[x] for x in range(1, a.n + 1))
    aprime = compose(a, p)
    assert is_idempotent(aprime) and rank(aprime) == rank(a)
    return p, SandwichElement(aprime)
