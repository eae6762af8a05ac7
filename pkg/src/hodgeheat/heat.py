"""Heat semigroups on finite operators and numerical checks of heat-kernel bounds.

Every check returns a :class:`BoundReport` whose ``max_violation`` is the
largest observed ``lhs - rhs``; theorem bounds use an absolute tolerance
of 1e-12, identities 1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import (MetricData, GrowthFit, envelope, lipschitz_constant, summability_check,
                       verify_intrinsic)
from .norms import lp_operator_norm, norm_1
from .operators import LaplacianMatrix, SchrodingerData, c_p, extract_schrodinger, truncate
from .reports import BoundReport, ViolationTracker, series_row, timed

DEFAULT_T_GRID = np.geomspace(0.05, 20.0, 40)
BOUND_TOL = 1e-12
IDENTITY_TOL = 1e-10


class NonIntrinsicMetric(ValueError):
    """The metric fails the intrinsic inequality for the operator's edge weights."""


def _exp(x: float) -> float:
    """math.exp that saturates to inf instead of raising."""
    return math.exp(x) if x < 709.0 else math.inf


def _times(t_grid) -> np.ndarray:
    ts = DEFAULT_T_GRID if t_grid is None else np.atleast_1d(np.asarray(t_grid, dtype=float))
    if ts.size == 0:
        raise ValueError("time grid is empty")
    if np.any(ts < 0):
        raise ValueError("times must be non-negative")
    return ts


# -- semigroups and kernels ------------------------------------------------------

def heat_semigroup(lap: LaplacianMatrix, t: float) -> np.ndarray:
    """Matrix of e^{-tA}, through the eigenbasis of M^{1/2} A M^{-1/2}."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    w, V = lap.eig
    r = np.sqrt(lap.measure)
    S = (V * np.exp(-t * w)[None, :]) @ V.conj().T
    P = S / r[:, None] * r[None, :]
    return P.real if not np.iscomplexobj(lap.matrix) else P


def semigroup_apply(lap: LaplacianMatrix, f: np.ndarray, t: float) -> np.ndarray:
    """e^{-tA} f without forming the full matrix."""
    w, V = lap.eig
    r = np.sqrt(lap.measure)
    out = (V @ (np.exp(-t * w) * (V.conj().T @ (r * f)))) / r
    return out if (np.iscomplexobj(f) or np.iscomplexobj(lap.matrix)) else out.real


@dataclass(frozen=True, eq=False)
class HeatKernelMatrix:
    """p_t(x, y) = <e^{-tH} 1_x, 1_y> / (m(x) m(y)) = P[y, x] / m(x)."""

    t: float
    kernel: np.ndarray
    measure: np.ndarray
    keys: tuple

    def compose(self, other: "HeatKernelMatrix") -> np.ndarray:
        """sum_z m(z) p_t(x, z) p_s(z, y)."""
        return (self.kernel * self.measure[None, :]) @ other.kernel


def heat_kernel(lap: LaplacianMatrix, t: float) -> HeatKernelMatrix:
    P = heat_semigroup(lap, t)
    return HeatKernelMatrix(float(t), P.T / lap.measure[:, None], lap.measure, lap.keys)


# -- closed-form profiles --------------------------------------------------------

def zeta(r):
    """r asinh(r) - sqrt(1 + r^2) + 1 for r >= 0 (inf maps to inf)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("zeta is defined for r >= 0")
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(r), np.inf, r * np.arcsinh(r) - np.sqrt(1 + r * r) + 1)
    return float(out) if out.ndim == 0 else out


def c_beta(beta: float, s: float) -> float:
    """s^{-2} (cosh(beta s) - 1)."""
    if beta <= 0 or s <= 0:
        raise ValueError("beta and s must be positive")
    return math.expm1(beta * s) / (2 * s * s) + math.expm1(-beta * s) / (2 * s * s)


def dgg_profile(d: np.ndarray, t: float, s: float, lam2: float) -> np.ndarray:
    """exp(-lam2 t - (t/s^2) zeta(s d / t)); at t = 0 this is 1 on d = 0 and 0 elsewhere."""
    if t == 0:
        return np.where(d == 0, 1.0, 0.0)
    return np.exp(-lam2 * t - (t / s ** 2) * zeta(s * np.asarray(d) / t))


# -- heat equation -----------------------------------------------------------------

def verify_heat_equation(lap: LaplacianMatrix, f: np.ndarray, t_grid, h: float = 1e-4,
                         tol: float = 1e-7) -> BoundReport:
    """Central difference of t -> e^{-tA} f against -A e^{-tA} f.

    Residuals are taken at steps h and h/2; the observed order is
    log2 of their ratio for the worst time.
    """
    ts = _times(t_grid)
    if np.any(ts - h < 0):
        raise ValueError("every time must exceed the step h")
    with timed() as clock:
        def residual(step):
            out = []
            for t in ts:
                fd = (semigroup_apply(lap, f, t + step) - semigroup_apply(lap, f, t - step)) / (2 * step)
                out.append(float(np.max(np.abs(fd + lap.apply(semigroup_apply(lap, f, t))))))
            return np.asarray(out)

        r_h, r_h2 = residual(h), residual(h / 2)
        worst = float(r_h.max())
        order = None
        if worst > 1e-12 and r_h2.max() > 0:
            order = math.log2(worst / float(r_h2.max()))
    series = [(float(t), float(a), tol, tol - float(a)) for t, a in zip(ts, r_h)]
    return BoundReport("heat-equation", {"h": h, "t_grid": ts}, int(ts.size), worst - tol, 0.0,
                       worst_sample={"t": float(ts[int(np.argmax(r_h))]), "residual": worst},
                       series=series,
                       extra={"residual_h": worst, "residual_h_half": float(r_h2.max()),
                              "observed_order": order},
                       runtime=clock())


# -- Davies-Gaffney-Grigoryan --------------------------------------------------------

def _certified(metric: MetricData, sd: SchrodingerData) -> float:
    rep = verify_intrinsic(metric, sd)
    if not rep.passed:
        raise NonIntrinsicMetric(
            f"metric {metric.name!r} is not intrinsic (max {rep.extra['max_lhs']:.6g}); "
            f"rescale by 1/{rep.extra['rescale_factor']:.6g} first")
    return metric.jump_size_for(sd)


def dgg_check(lap: LaplacianMatrix, metric: MetricData, t_grid=None,
              betas: Sequence[float] = (0.5, 1.0, 2.0), nu: float | None = None,
              rng: np.random.Generator | None = None, set_samples: int = 20,
              tol: float = BOUND_TOL) -> BoundReport:
    """Pointwise and set-form heat-kernel bounds, plus the exponential-in-distance corollary.

    Pointwise: |p_t(x,y)| <= exp(-lam2 t - (t/s^2) zeta(s d/t)) / sqrt(m(x) m(y)).
    Corollary: |p_t(x,y)| <= exp(-beta d + (C_beta - lam2) t) / sqrt(m(x) m(y)).
    Set form: |<e^{-tH} f, g>| <= exp(...d(A, B)...) ||f|| ||g|| for random
    f, g with disjoint supports A, B.
    """
    sd = extract_schrodinger(lap)
    s = _certified(metric, sd)
    lam2 = lap.bottom
    ts = _times(t_grid)
    betas = [float(b) for b in betas]
    if nu is not None:
        betas.append(1.5 * nu + 0.1)
    rng = rng if rng is not None else np.random.default_rng(0)
    m = lap.measure
    d = metric.dist
    sqm = np.sqrt(m[:, None] * m[None, :])
    n = lap.n
    sets = []
    for _ in range(set_samples if n >= 2 else 0):
        perm = rng.permutation(n)
        cut = int(rng.integers(1, n))
        a = np.sort(perm[:cut][: max(1, int(rng.integers(1, cut + 1)))])
        b = np.sort(perm[cut:][: max(1, int(rng.integers(1, n - cut + 1)))])
        f = np.zeros(n, complex)
        g = np.zeros(n, complex)
        f[a] = rng.standard_normal(a.size) + 1j * rng.standard_normal(a.size)
        g[b] = rng.standard_normal(b.size) + 1j * rng.standard_normal(b.size)
        sets.append((a, b, f, g, float(d[np.ix_(a, b)].min())))

    tracker = ViolationTracker()
    series = []
    with timed() as clock:
        for t in ts:
            P = heat_semigroup(lap, t)
            lhs = np.abs(P.T) / m[:, None]
            rhs = dgg_profile(d, t, s, lam2) / sqm
            tracker.update(lhs, rhs, lambda i, t=t: {
                "form": "pointwise", "t": float(t), "x": str(metric.keys[i // n]),
                "y": str(metric.keys[i % n])})
            series.append(series_row(t, lhs, rhs))
            for beta in betas:
                cb = c_beta(beta, s)
                with np.errstate(over="ignore", invalid="ignore"):
                    expo = np.where(np.isinf(d), -np.inf, -beta * np.where(np.isinf(d), 0, d))
                    rhs_b = np.exp(expo + (cb - lam2) * t) / sqm
                tracker.update(lhs, rhs_b, lambda i, t=t, beta=beta: {
                    "form": "corollary", "beta": beta, "t": float(t),
                    "x": str(metric.keys[i // n]), "y": str(metric.keys[i % n])})
            for j, (a, b, f, g, dab) in enumerate(sets):
                val = abs(np.sum(m * (P @ f) * np.conj(g)))
                bound = float(dgg_profile(np.array(dab), t, s, lam2))
                bound *= math.sqrt(np.sum(m * abs(f) ** 2)) * math.sqrt(np.sum(m * abs(g) ** 2))
                tracker.update(np.array([val]), np.array([bound]), lambda i, t=t, j=j: {
                    "form": "sets", "t": float(t), "sample": j})
    return BoundReport(
        "dgg", {"metric": metric.name, "degree": lap.degree, "jump_size": s, "lambda2": lam2,
                "betas": betas, "t_grid": ts, "set_samples": len(sets)},
        tracker.count, tracker.worst, tol, worst_sample=tracker.sample, series=series,
        notes=list(metric.notes), runtime=clock())


# -- energy monotonicity -------------------------------------------------------------

def energy_monotonicity(sd: SchrodingerData, sites: Sequence[int], u0: np.ndarray,
                        omega: np.ndarray, metric: MetricData, t_grid=None,
                        kappa: float | None = None, tol: float = IDENTITY_TOL) -> BoundReport:
    """t -> exp(2 lam2(K) t - (2t/s^2)(cosh(kappa s/2) - 1)) E(t) is nonincreasing.

    E(t) = sum_K m |u_t|^2 e^omega with u_t = e^{-t H_K} u0.  ``omega`` lives
    on all sites; its Lipschitz constant is computed over all pairs.
    """
    s = _certified(metric, sd)
    exact = lipschitz_constant(np.asarray(omega, dtype=float), metric)
    if kappa is None:
        kappa = exact
    elif kappa < exact * (1 - 1e-12):
        raise ValueError(f"kappa {kappa} is below the Lipschitz constant {exact} of omega")
    idx = np.asarray(sorted(set(int(i) for i in sites)))
    HK = truncate(sd, idx)
    lam2 = HK.bottom
    ts = np.concatenate([[0.0], _times(t_grid)])
    ts = np.unique(ts)
    weight = HK.measure * np.exp(omega[idx])
    u = np.asarray(u0)[idx].astype(complex)
    e0 = float(np.sum(weight * np.abs(u) ** 2))
    if e0 == 0:
        raise ValueError("initial condition vanishes on the truncation set")
    u = u / math.sqrt(e0)
    rate = 2 * lam2 - (2 / s ** 2) * (math.cosh(kappa * s / 2) - 1)
    with timed() as clock:
        comp = np.array([math.exp(rate * t) * float(np.sum(weight * np.abs(semigroup_apply(HK, u, t)) ** 2))
                         for t in ts])
        diffs = np.diff(comp)
    i = int(np.argmax(diffs)) if diffs.size else 0
    series = [(float(t), float(c), float(comp[0]), float(comp[0] - c)) for t, c in zip(ts, comp)]
    return BoundReport(
        "energy", {"kappa": kappa, "kappa_exact": exact, "jump_size": s, "lambda2_K": lam2,
                   "sites": int(idx.size), "t_grid": ts},
        int(diffs.size), float(diffs.max(initial=-np.inf)), tol,
        worst_sample={"t0": float(ts[i]), "t1": float(ts[i + 1])} if diffs.size else None,
        series=series, runtime=clock())


def energy_sweep(sd: SchrodingerData, metric: MetricData, rng: np.random.Generator,
                 triples: int = 20, t_grid=None, tol: float = IDENTITY_TOL) -> BoundReport:
    """:func:`energy_monotonicity` over random (u0, omega, kappa) triples.

    Each triple draws a truncation set K, a complex u0, a centre, a cap and
    a slope kappa in [0.1, 2]; omega is the capped distance envelope with
    that slope, and kappa is its exact Lipschitz constant.
    """
    n = sd.n
    diam = metric.diameter()
    tracker = ViolationTracker()
    rows = []
    with timed() as clock:
        for j in range(triples):
            K = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
            slope = float(rng.uniform(0.1, 2.0))
            centre = int(rng.integers(n))
            cap = float(rng.uniform(0.0, diam if np.isfinite(diam) and diam > 0 else 1.0))
            omega = envelope(metric, centre, cap, slope)
            omega = np.where(np.isfinite(omega), omega, slope * cap)
            u0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            rep = energy_monotonicity(sd, K, u0, omega, metric, t_grid, tol=tol)
            tracker.update(np.array([rep.max_violation]), np.array([0.0]),
                           lambda i, j=j, rep=rep: {"triple": j, "kappa": rep.params["kappa"],
                                                    "sites": rep.params["sites"]} | (rep.worst_sample or {}))
            rows.append([j, rep.params["kappa"], rep.params["sites"], rep.max_violation])
    return BoundReport("energy", {"triples": triples, "jump_size": metric.jump_size_for(sd)},
                       tracker.count, tracker.worst, tol, worst_sample=tracker.sample,
                       extra={"triples": rows}, runtime=clock())


# -- exhaustion --------------------------------------------------------------------

def exhaustion_convergence(sd: SchrodingerData, nested_sites: Sequence[Sequence[int]],
                           f: np.ndarray, t: float, tol: float = 1e-9) -> BoundReport:
    """Errors ||iota e^{-t H_K} iota^* f - e^{-tH} f||_2 and lam2(K) along nested sets.

    Both sequences must be nonincreasing; the last set must be all sites.
    """
    sets = [np.asarray(sorted(set(int(i) for i in K))) for K in nested_sites]
    for a, b in zip(sets, sets[1:]):
        if not set(a.tolist()) <= set(b.tolist()):
            raise ValueError("truncation sets are not nested")
    if sets[-1].size != sd.n:
        raise ValueError("the last truncation set must be the whole host")
    H = sd.to_laplacian()
    with timed() as clock:
        target = semigroup_apply(H, np.asarray(f), t)
        errors, lams = [], []
        for K in sets:
            HK = truncate(sd, K)
            u = np.zeros_like(target)
            u[K] = semigroup_apply(HK, np.asarray(f)[K], t)
            diff = u - target
            errors.append(float(np.sqrt(np.sum(sd.m * np.abs(diff) ** 2))))
            lams.append(HK.bottom)
    err_inc = np.diff(errors)
    lam_inc = np.diff(lams)
    worst = float(max(err_inc.max(initial=-np.inf), lam_inc.max(initial=-np.inf)))
    series = [(float(len(K)), e, lam, 0.0) for K, e, lam in zip(sets, errors, lams)]
    return BoundReport("exhaustion", {"t": t, "sizes": [int(K.size) for K in sets]},
                       int(err_inc.size + lam_inc.size), worst, tol,
                       series=series, extra={"errors": errors, "lambda2": lams},
                       notes=["series columns: |K|, error, lambda2(K), 0"], runtime=clock())


# -- l^p contraction under form-bounded potentials ----------------------------------

def contraction_interval(M: float) -> tuple[float, float]:
    """[2(M+1)/M - 2 sqrt(M+1)/M, 2(M+1)/M + 2 sqrt(M+1)/M]; (1, inf) when M = 0."""
    if M < 0:
        raise ValueError("M must be non-negative")
    if M == 0:
        return 1.0, math.inf
    r = math.sqrt(M + 1)
    # (M+1 -+ sqrt(M+1)) / M rewritten without cancellation
    return 2 * r / (r + 1), 2 * r * (r + 1) / M


def d_p(p: float, M: float, C: float, lam2: float) -> float:
    """(C_p - M(1 - C_p)) lam2 - C (1 - C_p)."""
    cp = c_p(p)
    return (cp - M * (1 - cp)) * lam2 - C * (1 - cp)


def default_p_grid(M: float, points: int = 7) -> list[float]:
    lo, hi = contraction_interval(M)
    if M == 0:
        grid = [1.0, 1.25, 1.5, 2.0, 3.0, 5.0, math.inf][:max(points, 3)]
    else:
        grid = list(np.geomspace(lo, hi, points))
        grid[0], grid[-1] = lo, hi
    return sorted(set(float(p) for p in grid) | {2.0})


def contraction_check(lap: LaplacianMatrix, M: float, C: float, p_grid=None, t_grid=None,
                      rng: np.random.Generator | None = None,
                      tol: float = IDENTITY_TOL) -> BoundReport:
    """Lower bracket of ||e^{-tA}||_{p,p} against e^{-D_p t} for p in the admissible interval."""
    lo, hi = contraction_interval(M)
    ps = default_p_grid(M) if p_grid is None else [float(p) for p in p_grid]
    ts = _times(t_grid)
    rng = rng if rng is not None else np.random.default_rng(0)
    lam2 = lap.bottom
    notes, used = [], []
    for p in ps:
        inside = (lo <= p <= hi) if M > 0 else p >= 1
        if inside or math.isclose(p, lo, rel_tol=1e-12) or math.isclose(p, hi, rel_tol=1e-12):
            used.append(p)
        else:
            notes.append(f"p = {p:g} outside [{lo:g}, {hi:g}]; skipped")
    tracker = ViolationTracker()
    series, brackets = [], []
    with timed() as clock:
        for t in ts:
            P = heat_semigroup(lap, t)
            for p in used:
                nv = lp_operator_norm(P, p, lap.measure, rng, starts=200)
                bound = _exp(-d_p(p, M, C, lam2) * t)
                tracker.update(np.array([nv.lower]), np.array([bound]),
                               lambda i, t=t, p=p: {"t": float(t), "p": p})
                brackets.append((float(t), p, nv.lower, nv.upper, bound))
                if p == 2.0:
                    series.append((float(t), nv.lower, bound, bound - nv.lower))
    two = [abs(lw - b) for (_, p, lw, _, b) in brackets if p == 2.0]
    return BoundReport(
        "contraction", {"M": M, "C": C, "interval": [lo, hi], "p_grid": used, "t_grid": ts,
                        "lambda2": lam2, "degree": lap.degree},
        tracker.count, tracker.worst, tol, worst_sample=tracker.sample, series=series,
        extra={"brackets": [list(b) for b in brackets],
               "p2_max_deviation": max(two) if two else None,
               "D_p": {str(p): d_p(p, M, C, lam2) for p in used}},
        notes=notes, runtime=clock())


# -- bounded potentials: domination by the free kernel --------------------------------

def domination_check(sd: SchrodingerData, K: float | None = None, t_grid=None,
                     tol: float = BOUND_TOL) -> BoundReport:
    """|p_t| <= e^{Kt} p~_t, sum_y m(y) p~_t(x, y) <= 1 and ||e^{-tH}||_{1,1} <= e^{Kt}.

    p~ is the kernel of the free graph (b, 1, 0).  K defaults to the
    realised sup of -c/m, clipped at 0.
    """
    realised = float(np.max(-sd.c / sd.m, initial=0.0))
    if K is None:
        K = max(realised, 0.0)
    elif K < realised - 1e-12:
        raise ValueError(f"K = {K} is below sup(-c/m) = {realised}")
    ts = _times(t_grid)
    H = sd.to_laplacian()
    F = sd.free().to_laplacian()
    m = sd.m
    n = sd.n
    tracker = ViolationTracker()
    series = []
    with timed() as clock:
        for t in ts:
            P = heat_semigroup(H, t)
            Pf = heat_semigroup(F, t)
            # compare e^{-Kt}|p_t| with p~_t so rounding in p~ is not amplified by e^{Kt}
            p = math.exp(-K * t) * np.abs(P.T) / m[:, None]
            pf = Pf.T / m[:, None]
            rhs = pf
            tracker.update(p, rhs, lambda i, t=t: {"bound": "domination", "t": float(t),
                                                   "x": str(sd.keys[i // n]), "y": str(sd.keys[i % n])})
            series.append(series_row(t, p, rhs))
            mass = (pf * m[None, :]).sum(axis=1)
            tracker.update(mass, np.ones(n), lambda i, t=t: {"bound": "markov", "t": float(t),
                                                             "x": str(sd.keys[i])})
            tracker.update(np.array([math.exp(-K * t) * norm_1(P, m)]), np.array([1.0]),
                           lambda i, t=t: {"bound": "l1-norm", "t": float(t)})
    return BoundReport("domination", {"K": K, "realised_sup_minus_c_over_m": realised, "t_grid": ts},
                       tracker.count, tracker.worst, tol, worst_sample=tracker.sample,
                       series=series, runtime=clock())


def markov_mass(sd: SchrodingerData, t: float) -> np.ndarray:
    """Row masses sum_y m(y) p~_t(x, y) of the free kernel."""
    Pf = heat_semigroup(sd.free().to_laplacian(), t)
    return (Pf.T / sd.m[:, None] * sd.m[None, :]).sum(axis=1)


# -- l^1 extension under exponential volume growth ------------------------------------

def l1_extension_check(sd: SchrodingerData, metric: MetricData, fit: GrowthFit, t_grid=None,
                       margin: float = 0.1, interp_ps: Sequence[float] = (1.5, 3.0, 4.0),
                       rng: np.random.Generator | None = None,
                       tol: float = BOUND_TOL) -> BoundReport:
    """||e^{-tH}||_{1,1} <= S(beta) e^{(C_beta - lam2) t} with beta = 3 nu / 2 + margin.

    S(beta) is the summability constant.  The interpolated bound
    S^{(2-r)/r} e^{((2-r)/r C_beta - lam2) t}, r = min(p, p'), is checked
    against the lower bracket of ||e^{-tH}||_{p,p}.
    """
    s = _certified(metric, sd)
    beta = 1.5 * fit.nu + margin
    cb = c_beta(beta, s)
    S = summability_check(sd.m, metric, beta)
    H = sd.to_laplacian()
    lam2 = H.bottom
    ts = _times(t_grid)
    rng = rng if rng is not None else np.random.default_rng(0)
    tracker = ViolationTracker()
    series, interp_rows = [], []
    with timed() as clock:
        for t in ts:
            P = heat_semigroup(H, t)
            lhs = norm_1(P, sd.m)
            rhs = S * _exp((cb - lam2) * t)
            tracker.update(np.array([lhs]), np.array([rhs]),
                           lambda i, t=t: {"bound": "l1", "t": float(t)})
            series.append((float(t), lhs, rhs, rhs - lhs))
            for p in interp_ps:
                r = min(p, p / (p - 1))
                e = (2 - r) / r
                bound = S ** e * _exp((e * cb - lam2) * t)
                nv = lp_operator_norm(P, p, sd.m, rng, starts=50)
                tracker.update(np.array([nv.lower]), np.array([bound]),
                               lambda i, t=t, p=p: {"bound": "interpolated", "p": p, "t": float(t)})
                interp_rows.append([float(t), p, nv.lower, nv.upper, bound])
    gap_terms = {}
    for p in interp_ps:
        r = min(p, p / (p - 1))
        gap_terms[str(p)] = {"inf_sigma_H2": lam2, "inf_re_sigma_Hp": lam2,
                             "slack": (2 - r) / (r * s * s) * (math.cosh(1.5 * fit.nu * s) - 1)}
    return BoundReport(
        "l1-extension", {"nu": fit.nu, "growth_C": fit.C, "beta": beta, "C_beta": cb,
                         "summability": S, "jump_size": s, "lambda2": lam2, "t_grid": ts},
        tracker.count, tracker.worst, tol, worst_sample=tracker.sample, series=series,
        extra={"interpolation": interp_rows, "spectral_gap": gap_terms}, runtime=clock())
