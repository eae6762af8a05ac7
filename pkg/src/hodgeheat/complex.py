"""Weighted simplicial complexes and the exact boundary/coboundary calculus.

Simplices are tuples of strictly increasing non-negative integers; the empty
tuple ``()`` is the empty simplex, present only in augmented mode.  Cochains
are stored as dense vectors indexed by the global simplex order of the
complex (sorted by dimension, then lexicographically).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

Simplex = tuple[int, ...]

EMPTY: Simplex = ()


class ComplexError(ValueError):
    """Malformed complex input.  ``location`` names the offending item."""

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location


def simplex_key(simplex: Simplex) -> str:
    """Comma-joined vertex list used in files ("" for the empty simplex)."""
    return ",".join(str(v) for v in simplex)


def parse_simplex_key(key: str) -> Simplex:
    key = key.strip()
    if not key:
        return EMPTY
    try:
        return make_simplex(int(v) for v in key.split(","))
    except ValueError as exc:
        raise ComplexError(str(exc), location=f"weights[{key!r}]") from None


def make_simplex(vertices: Iterable[int]) -> Simplex:
    verts = [int(v) for v in vertices]
    if any(v < 0 for v in verts):
        raise ComplexError(f"negative vertex identifier in {verts}")
    s = tuple(sorted(verts))
    if len(set(s)) != len(s):
        raise ComplexError(f"duplicate vertex in simplex {verts}")
    return s


def dim(simplex: Simplex) -> int:
    return len(simplex) - 1


def faces(simplex: Simplex) -> list[Simplex]:
    """Codimension-1 faces in order of the removed vertex position."""
    return [simplex[:j] + simplex[j + 1:] for j in range(len(simplex))]


def closure(top_simplices: Iterable[Iterable[int]]) -> set[Simplex]:
    out: set[Simplex] = set()
    for top in top_simplices:
        s = make_simplex(top)
        if not s:
            raise ComplexError("top simplices must be nonempty vertex lists")
        for r in range(1, len(s) + 1):
            out.update(combinations(s, r))
    return out


@dataclass(frozen=True, eq=False)
class WeightedComplex:
    """A finite, face-closed simplicial complex with positive weights.

    Use :func:`build_complex` rather than the constructor; it checks closure,
    orders simplices and fills the incidence tables.
    """

    simplices: tuple[Simplex, ...]
    weights: np.ndarray
    augmented: bool = False
    index: Mapping[Simplex, int] = field(repr=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.simplices)

    def __contains__(self, simplex) -> bool:
        return tuple(simplex) in self.index

    @property
    def dim(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    @property
    def min_degree(self) -> int:
        return -1 if self.augmented else 0

    @cached_property
    def degree_slices(self) -> dict[int, slice]:
        out: dict[int, slice] = {}
        start = 0
        for k in range(self.min_degree, self.dim + 1):
            n = sum(1 for s in self.simplices if len(s) == k + 1)
            out[k] = slice(start, start + n)
            start += n
        return out

    def block(self, k: int) -> tuple[Simplex, ...]:
        return self.simplices[self.degree_slices[k]] if k in self.degree_slices else ()

    def weight(self, simplex: Simplex) -> float:
        return float(self.weights[self.position(simplex)])

    def position(self, simplex: Simplex) -> int:
        try:
            return self.index[tuple(simplex)]
        except KeyError:
            raise ComplexError(f"simplex {tuple(simplex)} not in complex") from None

    def block_weights(self, k: int) -> np.ndarray:
        return self.weights[self.degree_slices[k]]

    @cached_property
    def face_lists(self) -> dict[Simplex, tuple[Simplex, ...]]:
        out = {}
        for s in self.simplices:
            if not s:
                out[s] = ()
            elif len(s) == 1:
                out[s] = (EMPTY,) if self.augmented else ()
            else:
                out[s] = tuple(faces(s))
        return out

    @cached_property
    def coface_lists(self) -> dict[Simplex, tuple[Simplex, ...]]:
        co: dict[Simplex, list[Simplex]] = {s: [] for s in self.simplices}
        for s, fs in self.face_lists.items():
            for f in fs:
                co[f].append(s)
        return {s: tuple(v) for s, v in co.items()}

    @cached_property
    def gamma(self) -> np.ndarray:
        """Coface weight sums, indexed like ``simplices``."""
        w = self.weights
        return np.array([sum(w[self.index[c]] for c in self.coface_lists[s])
                         for s in self.simplices], dtype=float)

    def vertex_degrees(self) -> dict[int, int]:
        """Combinatorial degree of each vertex in the 1-skeleton."""
        return {s[0]: sum(1 for c in self.coface_lists[s] if len(c) == 2)
                for s in self.block(0)}

    @cached_property
    def coboundary_blocks(self) -> dict[int, np.ndarray]:
        """Integer matrices of the degree-k coboundary, shape (n_{k+1}, n_k)."""
        out = {}
        for k in range(self.min_degree, self.dim):
            lo, hi = self.block(k), self.block(k + 1)
            pos = {s: i for i, s in enumerate(lo)}
            mat = np.zeros((len(hi), len(lo)), dtype=np.int64)
            for i, sigma in enumerate(hi):
                for tau in self.face_lists[sigma]:
                    mat[i, pos[tau]] = orientation_sign(self, tau, sigma)
            out[k] = mat
        return out

    @cached_property
    def coboundary_matrix(self) -> np.ndarray:
        """Global coboundary on all simplices: D[sigma, tau] = theta(tau, sigma)."""
        n = len(self)
        mat = np.zeros((n, n), dtype=np.int64)
        for k, blk in self.coboundary_blocks.items():
            mat[self.degree_slices[k + 1], self.degree_slices[k]] = blk
        return mat

    @cached_property
    def boundary_matrix(self) -> np.ndarray:
        """Weighted adjoint of the coboundary, M^{-1} D^T M."""
        w = self.weights
        return (self.coboundary_matrix.T * w[None, :]) / w[:, None]

    def cochain(self, values: Mapping[Simplex, complex] | None = None) -> "Cochain":
        vec = np.zeros(len(self), dtype=complex)
        for s, v in (values or {}).items():
            vec[self.position(s)] = v
        return Cochain(self, vec)

    def indicator(self, simplex: Simplex) -> "Cochain":
        return self.cochain({tuple(simplex): 1.0})


def build_complex(top_simplices: Iterable[Iterable[int]],
                  weights: Mapping | str = "combinatorial",
                  augmented: str | bool = "off",
                  empty_weight: float = 1.0) -> WeightedComplex:
    """Close ``top_simplices`` under faces and attach weights.

    ``weights`` is either ``"combinatorial"`` (m = 1 everywhere) or a mapping
    from simplices (tuples, vertex lists or comma keys) to positive reals that
    covers the whole closure.  ``augmented`` is ``"off"``, ``"on"`` or
    ``"auto"``; for a finite complex the total vertex mass is finite, so
    ``"auto"`` includes the empty simplex.
    """
    tops = list(top_simplices)
    if not tops:
        raise ComplexError("no top simplices given")
    simplices = closure(tops)
    return _assemble(simplices, weights, augmented, empty_weight)


def complex_from_simplices(simplices: Iterable[Iterable[int]],
                           weights: Mapping | str = "combinatorial",
                           augmented: str | bool = "off",
                           empty_weight: float = 1.0) -> WeightedComplex:
    """Build from an explicit simplex list, which must already be face-closed."""
    given = {make_simplex(s) for s in simplices}
    given.discard(EMPTY)
    if not given:
        raise ComplexError("no simplices given")
    for s in sorted(given, key=lambda s: (len(s), s)):
        if len(s) > 1:
            for f in faces(s):
                if f not in given:
                    raise ComplexError(f"missing face {list(f)} of simplex {list(s)}",
                                       location=f"simplices[{simplex_key(s)!r}]")
    return _assemble(given, weights, augmented, empty_weight)


def _augmented_flag(augmented) -> bool:
    if augmented is True or augmented in ("on", "true", "auto"):
        # finite vertex set => finite total vertex mass
        return True
    if augmented is False or augmented in ("off", "false", None):
        return False
    raise ComplexError(f"unknown augmentation mode {augmented!r}")


def _assemble(simplices: set[Simplex], weights, augmented, empty_weight) -> WeightedComplex:
    aug = _augmented_flag(augmented)
    if aug:
        simplices = set(simplices) | {EMPTY}
    ordered = tuple(sorted(simplices, key=lambda s: (len(s), s)))
    index = {s: i for i, s in enumerate(ordered)}

    if isinstance(weights, str):
        if weights != "combinatorial":
            raise ComplexError(f"unknown weight mode {weights!r}")
        w = np.ones(len(ordered))
        if aug:
            w[index[EMPTY]] = float(empty_weight)
    else:
        lookup: dict[Simplex, float] = {}
        for key, val in weights.items():
            s = parse_simplex_key(key) if isinstance(key, str) else make_simplex(
                [key] if isinstance(key, (int, np.integer)) else key)
            lookup[s] = float(val)
        if aug and EMPTY not in lookup:
            lookup[EMPTY] = float(empty_weight)
        w = np.empty(len(ordered))
        for i, s in enumerate(ordered):
            if s not in lookup:
                raise ComplexError(f"missing weight for simplex {list(s)}",
                                   location=f"weights[{simplex_key(s)!r}]")
            w[i] = lookup[s]
    bad = np.flatnonzero(~(w > 0) | ~np.isfinite(w))
    if bad.size:
        s = ordered[bad[0]]
        raise ComplexError(f"non-positive weight {w[bad[0]]} for simplex {list(s)}",
                           location=f"weights[{simplex_key(s)!r}]")
    w.setflags(write=False)
    return WeightedComplex(simplices=ordered, weights=w, augmented=aug, index=index)


def orientation_sign(cx: WeightedComplex, tau: Simplex, sigma: Simplex) -> int:
    """theta(tau, sigma): (-1)^j if tau is sigma minus its j-th vertex, else 0."""
    tau, sigma = tuple(tau), tuple(sigma)
    cx.position(tau)
    cx.position(sigma)
    if len(sigma) != len(tau) + 1 or not set(tau) <= set(sigma):
        return 0
    missing = next(j for j, v in enumerate(sigma) if v not in tau)
    return -1 if missing % 2 else 1


@dataclass(frozen=True, eq=False)
class Cochain:
    """Complex-valued function on the simplices of ``complex``."""

    complex: WeightedComplex
    values: np.ndarray

    @property
    def support(self) -> list[Simplex]:
        return [self.complex.simplices[i] for i in np.flatnonzero(self.values)]

    @property
    def degree(self) -> int | str | None:
        degs = {len(s) - 1 for s in self.support}
        if not degs:
            return None
        return degs.pop() if len(degs) == 1 else "mixed"

    def __getitem__(self, simplex) -> complex:
        return self.values[self.complex.position(tuple(simplex))]

    def __add__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.complex, self.values + other.values)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.complex, self.values - other.values)

    def __mul__(self, scalar) -> "Cochain":
        return Cochain(self.complex, self.values * scalar)

    __rmul__ = __mul__


def coboundary_apply(omega: Cochain) -> Cochain:
    return Cochain(omega.complex, omega.complex.coboundary_matrix @ omega.values)


def boundary_apply(omega: Cochain) -> Cochain:
    return Cochain(omega.complex, omega.complex.boundary_matrix @ omega.values)


def lp_norm(omega: Cochain | np.ndarray, p: float, m: np.ndarray | None = None) -> float:
    """Weighted l^p norm; ``p = inf`` is the sup norm (weights play no role)."""
    if isinstance(omega, Cochain):
        vals, m = omega.values, omega.complex.weights
    else:
        vals = np.asarray(omega)
        if m is None:
            m = np.ones(vals.shape[0])
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(vals)
    if np.isinf(p):
        return float(a.max(initial=0.0))
    return float(np.sum(m * a ** p) ** (1.0 / p))


def inner_product(omega: Cochain, eta: Cochain) -> complex:
    return complex(np.sum(omega.complex.weights * omega.values * np.conj(eta.values)))
