"""Per-degree setup shared by the CLI and the acceptance suite.

``prepare`` assembles one degree block of a Laplacian, reads off its
Schrödinger data, builds the requested metric on the same sites and
certifies it as intrinsic (auto-rescaling when needed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complex import WeightedComplex
from .geometry import (GrowthFit, MetricData, certify_intrinsic, combinatorial_metric,
                       fit_growth, scaled_intrinsic_metric, simplex_metric)
from .operators import (LaplacianMatrix, SchrodingerData, assemble_laplacian,
                        estimate_form_bound, extract_schrodinger)
from .reports import BoundReport

METRICS = ("combinatorial", "scaled", "simplex-rho")


@dataclass
class DegreeContext:
    complex: WeightedComplex
    degree: int
    variant: str
    lap: LaplacianMatrix
    sd: SchrodingerData
    metric: MetricData
    intrinsic: BoundReport
    _fit: GrowthFit | None = field(default=None, repr=False)

    @property
    def fit(self) -> GrowthFit:
        if self._fit is None:
            self._fit = fit_growth(self.sd.m, self.metric)
        return self._fit

    @property
    def jump_size(self) -> float:
        return self.metric.jump_size_for(self.sd)

    def form_bound(self, points: int = 21) -> tuple[float, float]:
        """(M, C) for the smallest C on a uniform grid up to sup c_-/m with finite M."""
        top = float(np.max(self.sd.c_minus / self.sd.m, initial=0.0))
        grid = np.linspace(0.0, top, points) if top > 0 else [0.0]
        return estimate_form_bound(self.sd, grid).first_finite()


def _trivial_metric(lap: LaplacianMatrix, name: str) -> MetricData:
    n = lap.n
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    return MetricData(lap.keys, dist, np.zeros((n, n), bool), name, lap.degree)


def build_metric(cx: WeightedComplex, k: int, name: str, lap: LaplacianMatrix) -> MetricData:
    if name not in METRICS:
        raise ValueError(f"unknown metric {name!r}; choose from {METRICS}")
    if k < 0 or (k == 0 and len(cx.block(1)) == 0):
        return _trivial_metric(lap, name)
    if name == "simplex-rho":
        return simplex_metric(cx, k)
    if k != 0:
        raise ValueError(f"metric {name!r} lives on vertices; use simplex-rho for degree {k}")
    return combinatorial_metric(cx) if name == "combinatorial" else scaled_intrinsic_metric(cx)


def prepare(cx: WeightedComplex, k: int, metric: str | MetricData = "simplex-rho",
            variant: str = "hodge") -> DegreeContext:
    """Laplacian block, Schrödinger data and a certified intrinsic metric for degree k.

    ``metric`` is a name from METRICS or a prebuilt table on the degree-k sites.
    """
    lap = assemble_laplacian(cx, variant, k)
    sd = extract_schrodinger(lap)
    if isinstance(metric, MetricData):
        if metric.keys != lap.keys:
            raise ValueError("metric sites do not match the degree block")
        met = metric
    else:
        met = build_metric(cx, k, metric, lap)
    met, rep = certify_intrinsic(met, sd)
    return DegreeContext(cx, k, variant, lap, sd, met, rep)


def degrees(cx: WeightedComplex) -> list[int]:
    return list(cx.degree_slices)


def validate_complex(cx: WeightedComplex, rng: np.random.Generator, samples: int = 20,
                     tol: float = 1e-10) -> list[BoundReport]:
    """δδ = 0 in integer arithmetic, closure under faces, and Stokes adjointness.

    Stokes: |<δω, η> - <ω, ∂η>| over ``samples`` random complex cochain pairs.
    """
    D = cx.coboundary_matrix.astype(np.int64)
    dd = int(np.abs(D @ D).max(initial=0))
    missing = [s for s in cx.simplices for f in cx.face_lists[s] if f not in cx]
    w = cx.weights
    B = cx.boundary_matrix
    n = len(cx)
    defects = []
    for _ in range(samples):
        om = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        eta = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        lhs = np.sum(w * (D @ om) * np.conj(eta))
        rhs = np.sum(w * om * np.conj(B @ eta))
        defects.append(abs(lhs - rhs))
    i = int(np.argmax(defects)) if defects else 0
    return [
        BoundReport("coboundary-squared", {"size": n}, n * n, float(dd), 0.0,
                    extra={"max_abs_entry": dd}),
        BoundReport("closure", {"size": n}, n, float(len(missing)), 0.0,
                    worst_sample={"missing_face_of": list(missing[0])} if missing else None),
        BoundReport("stokes", {"samples": samples}, samples, float(max(defects, default=0.0)), tol,
                    worst_sample={"sample": i}),
    ]
