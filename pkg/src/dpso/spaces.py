"""Discrete search spaces: hypercube bitstrings and permutations.

Points are plain tuples. A bitstring is a tuple of 0/1 ints of length n. A
permutation is a tuple of images in one-line notation, 0-indexed:
p = (2, 0, 1) maps 0 -> 2, 1 -> 0, 2 -> 1. Composition follows function
application, (a o b)[i] = a[b[i]].

Hypercube neighbors differ in one bit; permutation neighbors differ by one
transposition of positions. Distance is Hamming distance on the hypercube
and Cayley distance (n minus the number of cycles of x o y^-1) on
permutations; both equal the minimum number of moves between points. The
objective everywhere is distance to the space's target point, so 0 is
optimal.
"""

from dataclasses import dataclass
from math import comb

HYPERCUBE = "hypercube"
PERMUTATIONS = "permutations"


@dataclass(frozen=True)
class Space:
    """A search space instance: kind, size, and target point."""

    kind: str
    n: int
    target: tuple

    def __post_init__(self):
        if self.kind not in (HYPERCUBE, PERMUTATIONS):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.n < 1:
            raise ValueError(f"space size must be >= 1, got {self.n}")
        check_point(self, self.target)


def hypercube(n, target=None):
    """Bitstrings of length n; target defaults to all ones."""
    if n < 1:
        raise ValueError(f"space size must be >= 1, got {n}")
    if target is None:
        target = (1,) * n
    return Space(HYPERCUBE, n, tuple(target))


def permutation_space(n, target=None):
    """Permutations of {0..n-1}; target defaults to the identity."""
    if n < 1:
        raise ValueError(f"space size must be >= 1, got {n}")
    if target is None:
        target = tuple(range(n))
    return Space(PERMUTATIONS, n, tuple(target))


def check_point(space, x):
    """Raise ValueError unless x is a valid point of the space."""
    if len(x) != space.n:
        raise ValueError(f"point has length {len(x)}, space needs {space.n}")
    if space.kind == HYPERCUBE:
        if any(b not in (0, 1) for b in x):
            raise ValueError(f"bitstring entries must be 0 or 1: {x!r}")
    else:
        if sorted(x) != list(range(space.n)):
            raise ValueError(f"not a permutation of 0..{space.n - 1}: {x!r}")


def diameter(space):
    """Maximum distance between two points of the space."""
    return space.n if space.kind == HYPERCUBE else space.n - 1


def compose(a, b):
    """Permutation composition (a o b)[i] = a[b[i]]."""
    return tuple(a[b[i]] for i in range(len(a)))


def invert(p):
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def cycles_of(p):
    """Cycles of a permutation, each led by its smallest element, in order
    of their smallest elements. The canonical enumeration used by the
    weighted samplers, so draw sequences are reproducible."""
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(cyc)
    return out


def cycle_type(p):
    """Cycle lengths of p, sorted non-increasing (a partition of n)."""
    return tuple(sorted((len(c) for c in cycles_of(p)), reverse=True))


def distance(space, x, y):
    if space.kind == HYPERCUBE:
        return sum(a != b for a, b in zip(x, y))
    return space.n - len(cycles_of(compose(x, invert(y))))


def displacement_type(space, x, y):
    """Cycle type of x o y^-1; the permutation analogue of the set of
    differing bit positions in that distance and improving-move counts
    depend on x, y only through it."""
    if space.kind != PERMUTATIONS:
        raise ValueError("displacement_type is defined on permutations only")
    return cycle_type(compose(x, invert(y)))


def objective_value(space, x):
    """Distance to the target; 0 iff x is the target."""
    return distance(space, x, space.target)


def sample_uniform_point(space, stream):
    if space.kind == HYPERCUBE:
        return tuple(stream.next_below(2) for _ in range(space.n))
    out = list(range(space.n))
    for i in range(space.n - 1, 0, -1):
        j = stream.next_below(i + 1)
        out[i], out[j] = out[j], out[i]
    return tuple(out)


def sample_uniform_neighbor(space, x, stream):
    if space.kind == HYPERCUBE:
        i = stream.next_below(space.n)
        return x[:i] + (1 - x[i],) + x[i + 1:]
    if space.n < 2:
        raise ValueError("a 1-element permutation space has no neighbors")
    i = stream.next_below(space.n)
    j = stream.next_below(space.n - 1)
    if j >= i:
        j += 1
    return _swapped(x, i, j)


def _swapped(x, i, j):
    y = list(x)
    y[i], y[j] = y[j], y[i]
    return tuple(y)


def count_improving_neighbors(space, x, anchor):
    """Number of neighbors of x strictly closer to anchor.

    Hypercube: one per differing bit, so the count is the distance.
    Permutations: transposing positions i, j moves x closer to anchor
    exactly when anchor[i] and anchor[j] lie in one cycle of
    x o anchor^-1, so the count is sum C(k, 2) over cycle lengths k.
    """
    if space.kind == HYPERCUBE:
        return distance(space, x, anchor)
    sigma = compose(x, invert(anchor))
    return sum(comb(len(c), 2) for c in cycles_of(sigma))


def sample_improving_neighbor(space, x, anchor, stream):
    """Uniform draw among the neighbors of x strictly closer to anchor.

    Runs in O(n): permutations pick a cycle of x o anchor^-1 with weight
    C(k, 2), then a uniform element pair inside it, never materializing
    the improving set.
    """
    if space.kind == HYPERCUBE:
        diff = [i for i in range(space.n) if x[i] != anchor[i]]
        if not diff:
            raise ValueError("x equals anchor: no improving neighbor exists")
        i = diff[stream.next_below(len(diff))]
        return x[:i] + (1 - x[i],) + x[i + 1:]
    sigma = compose(x, invert(anchor))
    cycs = [c for c in cycles_of(sigma) if len(c) >= 2]
    total = sum(comb(len(c), 2) for c in cycs)
    if total == 0:
        raise ValueError("x equals anchor: no improving neighbor exists")
    t = stream.next_below(total)
    for cyc in cycs:
        w = comb(len(cyc), 2)
        if t < w:
            break
        t -= w
    k = len(cyc)
    r = stream.next_below(k)
    s = stream.next_below(k - 1)
    if s >= r:
        s += 1
    inv_anchor = invert(anchor)
    i, j = inv_anchor[cyc[r]], inv_anchor[cyc[s]]
    return _swapped(x, i, j)


def sample_bitstring_at_distance(space, anchor, d, stream):
    """Uniform bitstring at Hamming distance d from anchor: flip a uniform
    d-subset of positions (partial Fisher-Yates over the index list)."""
    if space.kind != HYPERCUBE:
        raise ValueError("sample_bitstring_at_distance needs a hypercube")
    if not 0 <= d <= space.n:
        raise ValueError(f"distance must be in [0, {space.n}], got {d}")
    idx = list(range(space.n))
    y = list(anchor)
    for t in range(d):
        j = t + stream.next_below(space.n - t)
        idx[t], idx[j] = idx[j], idx[t]
        y[idx[t]] = 1 - y[idx[t]]
    return tuple(y)


def render_point(space, x):
    """Compact text form: bits concatenated ("0110"), or comma-separated
    1-indexed one-line notation ("2,1,3,4")."""
    if space.kind == HYPERCUBE:
        return "".join(str(b) for b in x)
    return ",".join(str(v + 1) for v in x)


def parse_point(space, text):
    if space.kind == HYPERCUBE:
        x = tuple(int(ch) for ch in text.strip())
    else:
        x = tuple(int(part) - 1 for part in text.strip().split(","))
    check_point(space, x)
    return x
