"""Resolvents, exponentially weighted resolvent norms and squared-resolvent kernel decay.

Kernels here are action kernels: ``(G f)(x) = sum_y m(y) g(x, y) f(y)``,
so ``g = G / m[None, :]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import MetricData, lipschitz_constant, summability_check
from .heat import BOUND_TOL, _certified, c_beta
from .norms import mixed_norm, norm_1, norm_2, norm_inf
from .operators import LaplacianMatrix, extract_schrodinger
from .reports import BoundReport, ViolationTracker, timed

RESOLVENT_TOL = 1e-9
COND_LIMIT = 1e12


class OnSpectrum(ValueError):
    """The spectral parameter is (numerically) in the spectrum."""


@dataclass(frozen=True, eq=False)
class ResolventKernel:
    z: complex
    matrix: np.ndarray
    measure: np.ndarray
    keys: tuple
    squared: np.ndarray | None = field(default=None, repr=False)

    @property
    def kernel(self) -> np.ndarray:
        return self.matrix / self.measure[None, :]

    @property
    def squared_kernel(self) -> np.ndarray:
        sq = self.squared if self.squared is not None else self.matrix @ self.matrix
        return sq / self.measure[None, :]


def resolvent(lap: LaplacianMatrix, z: complex, squared: bool = False) -> ResolventKernel:
    """(A - z)^{-1} through the symmetrized eigenbasis, refusing ill-conditioned z."""
    w, V = lap.eig
    gap = np.abs(w - z)
    if gap.min(initial=np.inf) == 0 or gap.max() / gap.min() > COND_LIMIT:
        raise OnSpectrum(f"z = {z} is within numerical distance of the spectrum")
    r = np.sqrt(lap.measure)
    S = (V / (w - z)[None, :]) @ V.conj().T
    G = S / r[:, None] * r[None, :]
    sq = None
    if squared:
        S2 = (V / ((w - z) ** 2)[None, :]) @ V.conj().T
        sq = S2 / r[:, None] * r[None, :]
    return ResolventKernel(complex(z), G, lap.measure, lap.keys, sq)


def resolvent_identity_defect(lap: LaplacianMatrix, rk: ResolventKernel) -> float:
    """max |(A - z) G - I|."""
    eye = np.eye(lap.n)
    return float(np.max(np.abs((lap.matrix - rk.z * eye) @ rk.matrix - eye), initial=0.0))


def rectangle_grid(re=(-2.0, -0.5), im=(-1.0, 1.0), shape=(5, 5)) -> np.ndarray:
    xs = np.linspace(re[0], re[1], shape[0])
    ys = np.linspace(im[0], im[1], shape[1])
    return (xs[:, None] + 1j * ys[None, :]).ravel()


def psi_family(metric: MetricData, eps: float, rng: np.random.Generator,
               count: int = 10) -> list[np.ndarray]:
    """Bounded functions with Lipschitz constant exactly ``eps``.

    Alternates capped distance envelopes eps * min(d(., y), d(x, y)) with
    McShane extensions min_j(a_j + eps d(., c_j)) of random data; each is
    rescaled by its computed Lipschitz constant.
    """
    n = metric.n
    d = metric.dist
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        if len(out) % 2 == 0:
            x, y = rng.integers(0, n, size=2)
            cap = d[x, y] if np.isfinite(d[x, y]) and d[x, y] > 0 else metric.diameter()
            psi = np.minimum(d[:, y], cap)
        else:
            k = int(rng.integers(1, min(n, 4) + 1))
            centres = rng.choice(n, size=k, replace=False)
            offsets = rng.uniform(0, metric.diameter() or 1.0, size=k)
            psi = np.min(offsets[None, :] + d[:, centres], axis=1)
            psi = np.minimum(psi, (metric.diameter() or 1.0) * 2)
        psi = np.where(np.isfinite(psi), psi, 0.0)
        lip = lipschitz_constant(psi, metric)
        if lip <= 0 or not np.isfinite(lip):
            continue
        psi = psi * (eps / lip)
        out.append(psi - psi.min())
    return out


def _conj(psi: np.ndarray, T: np.ndarray) -> np.ndarray:
    """e^psi T e^{-psi} as a matrix."""
    return np.exp(psi)[:, None] * T * np.exp(-psi)[None, :]


def _alpha_for(lam2: float, ce: float, alpha: float | None) -> float:
    floor = min(lam2, 0.0) - ce
    if alpha is None:
        return floor - 1.0
    if alpha >= floor:
        raise ValueError(f"alpha must be below {floor:.6g} (= min(lambda2, 0) - C_eps)")
    return float(alpha)


def resolvent_decay_check(lap: LaplacianMatrix, metric: MetricData, eps: float = 0.5,
                          alpha: float | None = None, tol: float = BOUND_TOL) -> BoundReport:
    """|g_alpha(x, y)| <= (m(x) m(y))^{-1/2} e^{-eps d(x,y)} / (min(lam2, 0) - alpha - C_eps).

    For non-negative operators the constant is 1 / (-alpha - C_eps).
    """
    sd = extract_schrodinger(lap)
    s = _certified(metric, sd)
    lam2 = lap.bottom
    ce = c_beta(eps, s)
    alpha = _alpha_for(lam2, ce, alpha)
    const = 1.0 / (min(lam2, 0.0) - alpha - ce)
    n = lap.n
    with timed() as clock:
        rk = resolvent(lap, alpha)
        g = np.abs(rk.kernel)
        m = lap.measure
        with np.errstate(over="ignore"):
            rhs = const * np.exp(-eps * metric.dist) / np.sqrt(m[:, None] * m[None, :])
        tr = ViolationTracker()
        tr.update(g, rhs, lambda i: {"x": str(metric.keys[i // n]), "y": str(metric.keys[i % n])})
        defect = resolvent_identity_defect(lap, rk)
    return BoundReport("resolvent-decay", {"eps": eps, "alpha": alpha, "C_eps": ce, "constant": const,
                                           "jump_size": s, "lambda2": lam2},
                       tr.count, tr.worst, tol, worst_sample=tr.sample,
                       extra={"identity_defect": defect}, runtime=clock())


def weighted_resolvent_check(lap: LaplacianMatrix, metric: MetricData, z_grid=None,
                             eps: float = 0.1, psis: list | None = None,
                             rng: np.random.Generator | None = None,
                             ratio_cap: float = 2.0) -> BoundReport:
    """sup over z and psi of ||e^psi (A - z)^{-1} e^{-psi}||_{2,2} against the unweighted sup.

    The check passes when the weighted sup is finite and at most
    ``ratio_cap`` times the unweighted sup.
    """
    zs = rectangle_grid() if z_grid is None else np.asarray(z_grid, dtype=complex)
    rng = rng if rng is not None else np.random.default_rng(0)
    if psis is None:
        psis = psi_family(metric, eps, rng)
    lips = [lipschitz_constant(p, metric) for p in psis]
    m = lap.measure
    w = lap.eig[0]
    rows = []
    with timed() as clock:
        plain_sup, weighted_sup, worst = 0.0, 0.0, None
        max_zero_defect = 0.0
        for z in zs:
            rk = resolvent(lap, z)
            plain = norm_2(rk.matrix, m)
            max_zero_defect = max(max_zero_defect, abs(plain - 1.0 / np.abs(w - z).min()))
            plain_sup = max(plain_sup, plain)
            for j, psi in enumerate(psis):
                val = norm_2(_conj(psi, rk.matrix), m)
                rows.append([z.real, z.imag, j, plain, val])
                if val > weighted_sup:
                    weighted_sup, worst = val, {"z": complex(z), "psi": j}
    viol = weighted_sup - ratio_cap * plain_sup
    if not np.isfinite(weighted_sup):
        viol = math.inf
    return BoundReport("weighted-resolvent", {"eps": eps, "z_count": int(zs.size), "psi_count": len(psis),
                                              "ratio_cap": ratio_cap},
                       int(zs.size * len(psis)), float(viol), 0.0, worst_sample=worst,
                       extra={"weighted_sup": weighted_sup, "unweighted_sup": plain_sup,
                              "ratio": weighted_sup / plain_sup if plain_sup else None,
                              "psi_lipschitz": lips, "zero_psi_defect": max_zero_defect,
                              "rows": rows},
                       notes=["ratio cap is a reporting threshold, not a theorem constant"],
                       runtime=clock())


def squared_resolvent_check(lap: LaplacianMatrix, metric: MetricData, z_grid=None,
                            eps: float = 0.1, alpha: float | None = None,
                            tol: float = RESOLVENT_TOL) -> BoundReport:
    """Kernel decay of (A - z)^{-2} through the factorization with a resolvent at alpha.

    With D = e^psi, G_z^2 = G_alpha (I + (z - alpha) G_z)^2 G_alpha gives
    ||m^{1/2} D G_z^2 D^{-1} m^{1/2}||_{1,inf}
        <= ||m^{1/2} D G_alpha D^{-1}||_{2,inf} ||(I + (z - alpha) D G_z D^{-1})^2||_{2,2}
           ||D G_alpha D^{-1} m^{1/2}||_{1,2} =: C(psi).
    For each pair (x, y), psi = eps min(d(., y), d(x, y)) turns this into
    |g_z^(2)(x, y)| <= C(psi) (m(x) m(y))^{-1/2} e^{-eps d(x, y)}.  The l^1
    consequence ||G_z^2||_{1,1} <= sup C(psi) * S(eps) is checked as well.
    """
    sd = extract_schrodinger(lap)
    s = _certified(metric, sd)
    lam2 = lap.bottom
    ce = c_beta(eps, s)
    alpha = _alpha_for(lam2, ce, alpha)
    zs = rectangle_grid() if z_grid is None else np.asarray(z_grid, dtype=complex)
    m = lap.measure
    n = lap.n
    rm = np.sqrt(m)
    d = metric.dist
    S = summability_check(m, metric, eps)
    ga = resolvent(lap, alpha).matrix
    tracker = ViolationTracker()
    factor_defect = 0.0
    c_sup = 0.0
    norms_rows = []
    eye = np.eye(n)
    with timed() as clock:
        for z in zs:
            rk = resolvent(lap, z, squared=True)
            gz, gz2 = rk.matrix, rk.squared
            middle = eye + (z - alpha) * gz
            factor = ga @ middle @ middle @ ga
            scale = max(1.0, float(np.abs(gz2).max()))
            factor_defect = max(factor_defect, float(np.abs(factor - gz2).max()) / scale)
            g2 = np.abs(gz2) / m[None, :]
            lhs_pairs, rhs_pairs = [], []
            c_z = 0.0
            for y in range(n):
                col = d[:, y]
                for r in np.unique(col):
                    xs = np.flatnonzero(col == r)
                    if not np.isfinite(r):
                        lhs_pairs.append(g2[xs, y])
                        rhs_pairs.append(np.zeros(xs.size))
                        continue
                    psi = eps * np.minimum(np.where(np.isfinite(col), col, r), r)
                    A = _conj(psi, ga)
                    B = eye + (z - alpha) * _conj(psi, gz)
                    C = (mixed_norm(rm[:, None] * A, 2, math.inf, m) * norm_2(B @ B, m)
                         * mixed_norm(A * rm[None, :], 1, 2, m))
                    c_z = max(c_z, C)
                    lhs_pairs.append(g2[xs, y])
                    rhs_pairs.append(C * np.exp(-eps * r) / (rm[xs] * rm[y]))
            c_sup = max(c_sup, c_z)
            lhs = np.concatenate(lhs_pairs)
            rhs = np.concatenate(rhs_pairs)
            tracker.update(lhs, rhs, lambda i, z=z: {"bound": "kernel-decay", "z": complex(z), "index": i})
            l1 = norm_1(gz2, m)
            tracker.update(np.array([l1]), np.array([c_z * S]),
                           lambda i, z=z: {"bound": "l1-norm", "z": complex(z)})
            norms_rows.append([z.real, z.imag, l1, norm_2(gz2, m), norm_inf(gz2), c_z])
        tracker.update(np.array([factor_defect]), np.array([0.0]),
                       lambda i: {"bound": "factorization-identity"})
    return BoundReport("squared-resolvent", {"eps": eps, "alpha": alpha, "C_eps": ce, "jump_size": s,
                                             "summability": S, "z_count": int(zs.size)},
                       tracker.count, tracker.worst, tol, worst_sample=tracker.sample,
                       extra={"C_sup": c_sup, "factorization_defect": factor_defect,
                              "norm_rows": norms_rows,
                              "norm_columns": ["re_z", "im_z", "l1", "l2", "linf", "C"]},
                       runtime=clock())
