"""Built-in complex families, the canonical small fixtures and seeded random complexes."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .complex import WeightedComplex, build_complex, closure, simplex_key


# -- canonical fixtures -------------------------------------------------------------

def single_edge(augmented="off") -> WeightedComplex:
    return build_complex([[0, 1]], augmented=augmented)


def hollow_triangle(augmented="off") -> WeightedComplex:
    return cycle(3, filled=False, augmented=augmented)


def filled_triangle(augmented="off") -> WeightedComplex:
    return build_complex([[0, 1, 2]], augmented=augmented)


def weighted_edge(augmented="off") -> WeightedComplex:
    return build_complex([[0, 1]], {"0": 1.0, "1": 2.0, "0,1": 3.0}, augmented=augmented)


def fixtures(path_length: int = 5, augmented="off") -> dict[str, WeightedComplex]:
    """F1 single edge, F2 hollow triangle, F3 filled triangle, F4 path, F5 weighted edge."""
    return {
        "F1": single_edge(augmented),
        "F2": hollow_triangle(augmented),
        "F3": filled_triangle(augmented),
        "F4": path(path_length, augmented),
        "F5": weighted_edge(augmented),
    }


# -- families ----------------------------------------------------------------------

def path(n: int, augmented="off") -> WeightedComplex:
    """Path on n vertices."""
    if n < 2:
        raise ValueError("a path needs at least 2 vertices")
    return build_complex([[i, i + 1] for i in range(n - 1)], augmented=augmented)


def cycle(n: int, filled: bool = False, augmented="off") -> WeightedComplex:
    """Cycle on n vertices; ``filled`` adds the fan triangulation from vertex 0."""
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    if filled:
        tops = [[0, i, i + 1] for i in range(1, n - 1)]
    else:
        tops = [sorted((i, (i + 1) % n)) for i in range(n)]
    return build_complex(tops, augmented=augmented)


def full_simplex(n: int, augmented="off") -> WeightedComplex:
    """Closure of the simplex on n vertices."""
    if n < 1:
        raise ValueError("need at least one vertex")
    return build_complex([list(range(n))], augmented=augmented)


def torus(augmented="off") -> WeightedComplex:
    """Seven-vertex triangulation of the torus: {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    tops = []
    for i in range(7):
        tops.append(sorted({i, (i + 1) % 7, (i + 3) % 7}))
        tops.append(sorted({i, (i + 2) % 7, (i + 3) % 7}))
    return build_complex(tops, augmented=augmented)


def random_flag(n: int, p: float, seed: int, max_dim: int = 3, augmented="off") -> WeightedComplex:
    """Clique complex of an Erdős–Rényi graph G(n, p), truncated at ``max_dim``.

    Isolated vertices are kept as 0-simplices.
    """
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n), dtype=bool)
    for i, j in combinations(range(n), 2):
        if rng.random() < p:
            adj[i, j] = adj[j, i] = True
    tops = [[v] for v in range(n)]
    for size in range(2, max_dim + 2):
        for c in combinations(range(n), size):
            if all(adj[a, b] for a, b in combinations(c, 2)):
                tops.append(list(c))
    return build_complex(tops, augmented=augmented)


def tree(branching: int, depth: int, augmented="off") -> WeightedComplex:
    """Rooted tree with the given branching factor; ``depth`` levels below the root."""
    if branching < 1 or depth < 1:
        raise ValueError("branching and depth must be positive")
    edges, level, nxt = [], [0], 1
    for _ in range(depth):
        new = []
        for v in level:
            for _ in range(branching):
                edges.append([v, nxt])
                new.append(nxt)
                nxt += 1
        level = new
    return build_complex(edges, augmented=augmented)


def grid(rows: int, cols: int, augmented="off") -> WeightedComplex:
    """rows x cols vertex grid, each square cut into two triangles along a diagonal."""
    if rows < 2 or cols < 2:
        raise ValueError("grid needs at least 2 x 2 vertices")

    def v(i, j):
        return i * cols + j

    tops = []
    for i in range(rows - 1):
        for j in range(cols - 1):
            tops.append(sorted([v(i, j), v(i + 1, j), v(i + 1, j + 1)]))
            tops.append(sorted([v(i, j), v(i, j + 1), v(i + 1, j + 1)]))
    return build_complex(tops, augmented=augmented)


def random_complex(rng: np.random.Generator, max_simplices: int = 60, max_dim: int = 3,
                   weighted: bool = True, augmented="off") -> WeightedComplex:
    """Random complex on 4-8 vertices with at most ``max_simplices`` simplices.

    Starts from one edge and adds random top simplices of 1 to max_dim + 1
    vertices while the closure stays within budget.  Weights are drawn
    from U(0.5, 2) when ``weighted``.
    """
    nv = int(rng.integers(4, 9))
    first = sorted(rng.choice(nv, size=2, replace=False).tolist())
    tops = [first]
    current = closure(tops)
    for _ in range(40):
        size = int(rng.integers(1, max_dim + 2))
        cand = sorted(rng.choice(nv, size=size, replace=False).tolist())
        trial = current | closure([cand])
        if len(trial) <= max_simplices:
            tops.append(cand)
            current = trial
    if not weighted:
        return build_complex(tops, augmented=augmented)
    weights = {simplex_key(s): float(rng.uniform(0.5, 2.0)) for s in sorted(current, key=lambda s: (len(s), s))}
    return build_complex(tops, weights, augmented=augmented)


def random_complexes(seed: int, count: int, **kwargs) -> list[WeightedComplex]:
    rng = np.random.default_rng(seed)
    return [random_complex(rng, **kwargs) for _ in range(count)]


FAMILIES = ("path", "cycle", "full-simplex", "torus", "random-flag", "tree", "grid")


def from_spec(tokens: list[str], augmented="off") -> WeightedComplex:
    """Build a family member from CLI-style tokens, e.g. ``["cycle", "3", "hollow"]``."""
    if not tokens:
        raise ValueError(f"empty generator spec; families: {', '.join(FAMILIES)}")
    name, args = tokens[0], tokens[1:]

    def need(k):
        if len(args) != k:
            raise ValueError(f"{name} takes {k} argument(s), got {len(args)}")

    if name == "path":
        need(1)
        return path(int(args[0]), augmented)
    if name == "cycle":
        if len(args) not in (1, 2):
            raise ValueError("cycle takes n and optionally filled|hollow")
        mode = args[1] if len(args) == 2 else "hollow"
        if mode not in ("filled", "hollow"):
            raise ValueError(f"cycle mode must be filled or hollow, got {mode!r}")
        return cycle(int(args[0]), mode == "filled", augmented)
    if name == "full-simplex":
        need(1)
        return full_simplex(int(args[0]), augmented)
    if name == "torus":
        need(0)
        return torus(augmented)
    if name == "random-flag":
        need(3)
        return random_flag(int(args[0]), float(args[1]), int(args[2]), augmented=augmented)
    if name == "tree":
        need(2)
        return tree(int(args[0]), int(args[1]), augmented)
    if name == "grid":
        need(2)
        return grid(int(args[0]), int(args[1]), augmented)
    raise ValueError(f"unknown family {name!r}; families: {', '.join(FAMILIES)}")
