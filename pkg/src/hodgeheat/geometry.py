"""Metrics on simplices, intrinsic-metric certification and volume growth."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .complex import WeightedComplex
from .operators import SchrodingerData
from .reports import BoundReport, timed

INTRINSIC_TOL = 1e-12

SIMPLEX_ADJACENCY_NOTE = ("simplex metric adjacency: sigma ~ sigma' iff they share a "
                          "codimension-1 face")


@dataclass(frozen=True, eq=False)
class MetricData:
    """Pseudo-distance table on one family of sites.

    ``adjacency`` is the graph the metric was built from; its largest
    realised distance is the structural jump size.
    """

    keys: tuple
    dist: np.ndarray
    adjacency: np.ndarray
    name: str = "metric"
    degree: int | None = 0
    notes: tuple = field(default=())

    @property
    def n(self) -> int:
        return len(self.keys)

    @property
    def jump_size(self) -> float:
        if not self.adjacency.any():
            return 0.0
        return float(self.dist[self.adjacency].max())

    def jump_size_for(self, sd: SchrodingerData) -> float:
        """sup d(x, y) over pairs with b(x, y) > 0, falling back to the structural jump."""
        mask = sd.b > 0
        if mask.any():
            return float(self.dist[mask].max())
        s = self.jump_size
        return s if s > 0 else 1.0

    def scaled(self, factor: float, note: str | None = None) -> "MetricData":
        notes = self.notes + ((note,) if note else ())
        return replace(self, dist=self.dist * factor, notes=notes)

    def diameter(self) -> float:
        finite = self.dist[np.isfinite(self.dist)]
        return float(finite.max(initial=0.0))

    def check_axioms(self, rng: np.random.Generator | None = None, samples: int = 10_000,
                     tol: float = 1e-12) -> bool:
        d = self.dist
        if np.any(np.abs(np.diag(d)) > 0) or np.any(d < 0):
            return False
        if not np.array_equal(np.isinf(d), np.isinf(d.T)):
            return False
        fin = np.isfinite(d)
        if np.max(np.abs(d[fin] - d.T[fin]), initial=0.0) > tol:
            return False
        if self.n == 0:
            return True
        rng = rng or np.random.default_rng(0)
        i, j, k = rng.integers(0, self.n, size=(3, samples))
        lhs, rhs = d[i, k], d[i, j] + d[j, k]
        return bool(np.all(lhs <= rhs + tol * np.maximum(1.0, np.where(np.isfinite(rhs), rhs, 1.0))))

    def to_rows(self) -> list[tuple]:
        return [(a, b, float(self.dist[i, j])) for i, a in enumerate(self.keys)
                for j, b in enumerate(self.keys)]


def _one_skeleton(cx: WeightedComplex) -> tuple[tuple, np.ndarray]:
    verts = cx.block(0)
    pos = {v: i for i, v in enumerate(verts)}
    adj = np.zeros((len(verts), len(verts)), dtype=bool)
    for e in cx.block(1):
        i, j = pos[(e[0],)], pos[(e[1],)]
        adj[i, j] = adj[j, i] = True
    return verts, adj


def combinatorial_metric(cx: WeightedComplex) -> MetricData:
    """Hop distance on the 1-skeleton; inf across components."""
    verts, adj = _one_skeleton(cx)
    dist = shortest_path(adj.astype(float), unweighted=True, directed=False)
    return MetricData(verts, dist, adj, "combinatorial", 0)


def scaled_intrinsic_metric(cx: WeightedComplex) -> MetricData:
    """Combinatorial metric divided by sqrt(max vertex degree)."""
    base = combinatorial_metric(cx)
    D = int(base.adjacency.sum(axis=1).max(initial=0))
    if D == 0:
        raise ValueError("complex has no edges; the scaled metric is undefined")
    return replace(base.scaled(1.0 / math.sqrt(D)), name="scaled")


def simplex_metric(cx: WeightedComplex, k: int) -> MetricData:
    """Chain metric on k-simplices built from vertex degrees.

    Steps between simplices sharing a codimension-1 face cost the largest
    deg(v)^{-1/2} over shared vertices; the path sum is scaled by
    (dim + 1)^{-1/2}.  For k = 0 this is the scaled combinatorial metric.
    """
    if k == 0:
        return replace(scaled_intrinsic_metric(cx), name="simplex-rho",
                       notes=(SIMPLEX_ADJACENCY_NOTE,))
    if k < 0 or k > cx.dim:
        raise ValueError(f"degree {k} out of range [0, {cx.dim}]")
    simp = cx.block(k)
    deg = cx.vertex_degrees()
    pos = {s: i for i, s in enumerate(simp)}
    n = len(simp)
    cost = np.zeros((n, n))
    adj = np.zeros((n, n), dtype=bool)
    for face in cx.block(k - 1):
        cof = [c for c in cx.coface_lists[face]]
        for a in range(len(cof)):
            for b in range(a + 1, len(cof)):
                i, j = pos[cof[a]], pos[cof[b]]
                step = max(deg[v] ** -0.5 for v in face)
                adj[i, j] = adj[j, i] = True
                cost[i, j] = cost[j, i] = step
    scale = (cx.dim + 1) ** -0.5
    dist = shortest_path(cost, directed=False) * scale if n else np.zeros((0, 0))
    return MetricData(simp, dist, adj, "simplex-rho", k, (SIMPLEX_ADJACENCY_NOTE,))


def metric_from_table(keys, table: dict, name: str = "file", degree: int | None = None) -> MetricData:
    """Metric from explicit (key_a, key_b) -> distance entries; missing pairs are inf."""
    pos = {k: i for i, k in enumerate(keys)}
    n = len(keys)
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for (a, b), v in table.items():
        dist[pos[a], pos[b]] = dist[pos[b], pos[a]] = float(v)
    adj = np.isfinite(dist) & (dist > 0)
    return MetricData(tuple(keys), dist, adj, name, degree)


# -- intrinsic certification ---------------------------------------------------

def intrinsic_profile(metric: MetricData, sd: SchrodingerData) -> np.ndarray:
    """(1/m(x)) sum_y b(x,y) d(x,y)^2 per site (inf if some b > 0 pair is at inf)."""
    d2 = np.where(sd.b > 0, metric.dist, 0.0) ** 2
    return (sd.b * d2).sum(axis=1) / sd.m


def verify_intrinsic(metric: MetricData, sd: SchrodingerData) -> BoundReport:
    with timed() as clock:
        prof = intrinsic_profile(metric, sd)
        worst = float(prof.max(initial=0.0))
    rescale = math.sqrt(worst) if worst > 1 else 1.0
    return BoundReport(
        check="intrinsic",
        params={"metric": metric.name, "degree": metric.degree, "notes": list(metric.notes)},
        samples=int(prof.size),
        max_violation=worst - 1.0,
        tolerance=INTRINSIC_TOL,
        extra={"max_lhs": worst, "rescale_factor": rescale,
               "jump_size": metric.jump_size_for(sd)},
        runtime=clock(),
    )


def certify_intrinsic(metric: MetricData, sd: SchrodingerData) -> tuple[MetricData, BoundReport]:
    """Return a metric that is intrinsic for ``sd``, dividing by sqrt(max) if needed."""
    report = verify_intrinsic(metric, sd)
    if report.passed:
        return metric, report
    factor = report.extra["rescale_factor"]
    if not np.isfinite(factor):
        raise ValueError("metric puts b-adjacent sites at infinite distance; cannot rescale")
    fixed = metric.scaled(1.0 / factor, note=f"auto-rescaled by 1/{factor:.12g}")
    again = verify_intrinsic(fixed, sd)
    again.extra["rescaled_from"] = factor
    return fixed, again


# -- balls and growth ----------------------------------------------------------

def ball(metric: MetricData, x: int, r: float) -> np.ndarray:
    return np.flatnonzero(metric.dist[x] <= r)


def ball_count(metric: MetricData, x: int, r: float) -> int:
    return int(np.count_nonzero(metric.dist[x] <= r))


def ball_volume(metric: MetricData, m: np.ndarray, x: int, r: float) -> float:
    return float(m[metric.dist[x] <= r].sum())


def site_weights(source, metric: MetricData) -> np.ndarray:
    """Measure on the metric's sites, from a complex or an explicit array."""
    if isinstance(source, WeightedComplex):
        return np.array([source.weight(k) for k in metric.keys])
    m = np.asarray(source, dtype=float)
    if m.shape != (metric.n,):
        raise ValueError(f"measure has shape {m.shape}, expected ({metric.n},)")
    return m


def _radii(metric: MetricData) -> np.ndarray:
    # m(B_r(x)) is a step function jumping only at realised distances
    d = metric.dist[np.isfinite(metric.dist)]
    return np.unique(d)


@dataclass
class GrowthFit:
    nu: float
    C: float
    table: list  # (nu, C(nu)) pairs
    eps_table: list  # (eps, C_eps)
    cap: float
    radii: int

    def to_dict(self) -> dict:
        return {"nu": self.nu, "C": self.C, "cap": self.cap, "radii": self.radii,
                "table": [list(r) for r in self.table], "eps_table": [list(r) for r in self.eps_table]}


def growth_constant(metric: MetricData, m: np.ndarray, nu: float) -> float:
    """max over sites x and radii r of m(B_r(x)) / (e^{nu r} m(x))."""
    radii = _radii(metric)
    best = 1.0
    for r in radii:
        inside = metric.dist <= r
        vol = inside.astype(float) @ m
        best = max(best, float(np.max(vol / m) * math.exp(-nu * r)))
    return best


def fit_growth(cx, metric: MetricData, cap: float = 10.0,
               nu_grid: np.ndarray | None = None,
               eps_grid=(0.05, 0.1, 0.25, 0.5, 1.0)) -> GrowthFit:
    """Smallest grid rate nu with growth constant C(nu) <= cap.

    All centres and all realised radii are used, so C(nu) is exact for the
    finite complex.
    """
    m = site_weights(cx, metric)
    if nu_grid is None:
        s = metric.jump_size or 1.0
        nu_grid = np.linspace(0.0, 4.0 / s, 401)
    table = [(float(nu), growth_constant(metric, m, float(nu))) for nu in nu_grid]
    chosen = next(((nu, C) for nu, C in table if C <= cap), table[-1])
    eps_table = [(float(e), growth_constant(metric, m, float(e))) for e in eps_grid]
    return GrowthFit(chosen[0], chosen[1], table, eps_table, cap, len(_radii(metric)))


def degree_growth_consistency(cx, metric: MetricData, fit: GrowthFit,
                              C: float | None = None) -> BoundReport:
    """#B_r(x) <= C^2 e^{2 nu r} for all x, r and max degree <= C^2 e^{2 nu s}."""
    C = fit.C if C is None else C
    nu = fit.nu
    with timed() as clock:
        worst, sample, count = -np.inf, None, 0
        for r in _radii(metric):
            counts = (metric.dist <= r).sum(axis=1)
            bound = C ** 2 * math.exp(2 * nu * r)
            v = counts - bound
            i = int(np.argmax(v))
            count += counts.size
            if v[i] > worst:
                worst, sample = float(v[i]), {"site": str(metric.keys[i]), "r": float(r),
                                              "count": int(counts[i]), "bound": bound}
        s = metric.jump_size
        degmax = int(metric.adjacency.sum(axis=1).max(initial=0))
        dbound = C ** 2 * math.exp(2 * nu * s)
        if degmax - dbound > worst:
            worst, sample = degmax - dbound, {"max_degree": degmax, "bound": dbound}
        count += 1
    return BoundReport("degree-growth", {"nu": nu, "C": C, "jump_size": s, "metric": metric.name},
                       count, worst, 0.0, worst_sample=sample,
                       extra={"max_degree": degmax, "degree_bound": dbound}, runtime=clock())


def summability_check(cx, metric: MetricData, beta: float) -> float:
    """sup_x sum_y sqrt(m(y)/m(x)) e^{-beta d(x,y)}."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    m = site_weights(cx, metric)
    with np.errstate(over="ignore"):
        terms = np.sqrt(m[None, :] / m[:, None]) * np.exp(-beta * metric.dist)
    return float(terms.sum(axis=1).max(initial=0.0))


def lipschitz_constant(values: np.ndarray, metric: MetricData) -> float:
    """Exact Lipschitz constant of a real function over all pairs."""
    diff = np.abs(values[:, None] - values[None, :])
    d = metric.dist
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.isfinite(d) & (d > 0), diff / np.where(d > 0, d, 1.0), 0.0)
    zero_pairs = (d == 0) & (diff > 0)
    if zero_pairs.any():
        return math.inf
    return float(ratio.max(initial=0.0))


def envelope(metric: MetricData, centre: int, cap: float, slope: float) -> np.ndarray:
    """v -> slope * min(d(v, centre), cap), a bounded function with Lipschitz constant <= slope."""
    return slope * np.minimum(metric.dist[centre], cap)


def nested_balls(metric: MetricData, centre: int) -> list[np.ndarray]:
    """Closed balls around ``centre`` at every realised radius, ending with all sites.

    Sites at infinite distance are appended as a final set so the sequence
    always exhausts the host.
    """
    row = metric.dist[centre]
    radii = np.unique(row[np.isfinite(row)])
    sets = [np.flatnonzero(row <= r) for r in radii]
    if sets[-1].size < metric.n:
        sets.append(np.arange(metric.n))
    return sets
