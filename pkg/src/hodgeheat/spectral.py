"""Spectra, Betti numbers and the operator-norm bounds for δ, ∂ and the Laplacians."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complex import WeightedComplex
from .norms import norm_2
from .operators import LaplacianMatrix, assemble_laplacian, global_laplacian
from .reports import BoundReport, timed

RANK_TOL = 1e-8


@dataclass
class SpectralReport:
    variant: str
    degree: int | None
    eigenvalues: np.ndarray
    rank_tol: float
    betti: int | None = None
    reduced: bool = False

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def kernel_dim(self) -> int:
        return int(np.count_nonzero(self.eigenvalues < self.rank_tol))

    @property
    def gap(self) -> float | None:
        """Smallest eigenvalue above the rank tolerance."""
        above = self.eigenvalues[self.eigenvalues >= self.rank_tol]
        return float(above[0]) if above.size else None

    def to_dict(self) -> dict:
        return {"variant": self.variant, "degree": self.degree,
                "eigenvalues": self.eigenvalues.tolist(), "lambda2": self.lambda2,
                "kernel_dim": self.kernel_dim, "rank_tol": self.rank_tol,
                "gap": self.gap, "betti": self.betti, "reduced": self.reduced}


def spectrum(lap: LaplacianMatrix, rank_tol: float = RANK_TOL) -> SpectralReport:
    """Full eigensolve; the kernel threshold is relative to the largest |eigenvalue|."""
    w = lap.eig[0]
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    return SpectralReport(lap.variant, lap.degree, w.copy(), rank_tol * scale)


def _hodge_kernel_dim(cx: WeightedComplex, k: int) -> int:
    return spectrum(assemble_laplacian(cx, "hodge", k)).kernel_dim


def exact_rank(mat: np.ndarray) -> int:
    """Rank of an integer matrix by fraction-exact Gaussian elimination."""
    rows = [[Fraction(int(v)) for v in row] for row in np.asarray(mat)]
    if not rows or not rows[0]:
        return 0
    rank, ncols = 0, len(rows[0])
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / p[col]
                rows[r] = [a - f * b for a, b in zip(rows[r], p)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def betti_rank_nullity(cx: WeightedComplex, k: int) -> int:
    """dim C_k - rank(δ_k) - rank(δ_{k-1}) from the integer coboundary blocks."""
    n_k = len(cx.block(k))
    up = exact_rank(cx.coboundary_blocks[k]) if k in cx.coboundary_blocks else 0
    down = exact_rank(cx.coboundary_blocks[k - 1]) if (k - 1) in cx.coboundary_blocks else 0
    return n_k - up - down


def betti(cx: WeightedComplex, k: int, cross_check: bool = True) -> int:
    """Betti number as the Hodge kernel dimension, cross-checked by exact rank-nullity.

    Augmented complexes give reduced Betti numbers; a warning says so.
    """
    if k not in cx.degree_slices:
        raise ValueError(f"degree {k} out of range")
    if cx.augmented:
        warnings.warn("augmented complex: reporting reduced Betti numbers", stacklevel=2)
    hodge = _hodge_kernel_dim(cx, k)
    if cross_check:
        oracle = betti_rank_nullity(cx, k)
        if oracle != hodge:
            raise ArithmeticError(f"Hodge kernel dimension {hodge} differs from rank-nullity {oracle} "
                                  f"in degree {k}")
    return hodge


def betti_numbers(cx: WeightedComplex) -> list[int]:
    return [betti(cx, k) for k in range(0, cx.dim + 1)]


def rayleigh_check(lap: LaplacianMatrix, rng: np.random.Generator, samples: int = 1000,
                   tol: float = 1e-8) -> BoundReport:
    """Random Rayleigh quotients never undercut lambda2, and the bottom eigenvector attains it."""
    lam2 = lap.bottom
    F = lap.form_matrix()
    m = lap.measure
    with timed() as clock:
        X = rng.standard_normal((lap.n, samples)) + 1j * rng.standard_normal((lap.n, samples))
        quot = np.real(np.einsum("ij,ik,kj->j", X.conj(), F, X)) / np.sum(m[:, None] * np.abs(X) ** 2, axis=0)
        v = lap.eig[1][:, 0] / np.sqrt(m)
        at_min = float(np.real(v.conj() @ F @ v) / np.sum(m * np.abs(v) ** 2))
    below = float(lam2 - quot.min())
    attain = abs(at_min - lam2)
    return BoundReport("rayleigh", {"samples": samples}, samples + 1, max(below, attain), tol,
                       extra={"lambda2": lam2, "min_random_quotient": float(quot.min()),
                              "eigenvector_quotient": at_min}, runtime=clock())


# -- operator-norm bounds -----------------------------------------------------------

def _fractions(values) -> list[Fraction]:
    return [Fraction(float(v)) for v in values]


def _exact_norm_1(entries: dict, m_out: list, m_in: list) -> Fraction:
    """max_y (1/m_in(y)) sum_x m_out(x) |T[x, y]| for sparse rational entries {(x, y): value}."""
    col = [Fraction(0)] * len(m_in)
    for (x, y), v in entries.items():
        col[y] += m_out[x] * abs(v)
    return max((c / m_in[y] for y, c in enumerate(col)), default=Fraction(0))


def _exact_norm_inf(entries: dict, rows: int) -> Fraction:
    acc = [Fraction(0)] * rows
    for (x, _), v in entries.items():
        acc[x] += abs(v)
    return max(acc, default=Fraction(0))


def _exact_laplacians(cx: WeightedComplex, m: list) -> dict:
    """Sparse rational Δ^+ = ∂δ and Δ^- = δ∂ on the whole complex."""
    pos = {s: i for i, s in enumerate(cx.simplices)}
    sign = {}
    for sigma in cx.simplices:
        for tau in cx.face_lists[sigma]:
            j = next(i for i, v in enumerate(sigma) if v not in tau) if tau else 0
            sign[pos[sigma], pos[tau]] = -1 if j % 2 else 1
    faces = {i: [] for i in range(len(m))}
    cofaces = {i: [] for i in range(len(m))}
    for (s, t), th in sign.items():
        faces[s].append((t, th))
        cofaces[t].append((s, th))
    up, down = {}, {}
    for s, fs in faces.items():
        # Δ^+[x, y] = (1/m(x)) sum_sigma m(sigma) θ(x, sigma) θ(y, sigma)
        for x, tx in fs:
            for y, ty in fs:
                up[x, y] = up.get((x, y), 0) + m[s] * tx * ty / m[x]
    for r, cs in cofaces.items():
        # Δ^-[x, y] = sum_rho θ(rho, x) θ(rho, y) m(y) / m(rho)
        for x, tx in cs:
            for y, ty in cs:
                down[x, y] = down.get((x, y), 0) + tx * ty * m[y] / m[r]
    hodge = dict(up)
    for key, v in down.items():
        hodge[key] = hodge.get(key, 0) + v
    return {"up": up, "down": down, "hodge": hodge}


def _report(check, lhs, rhs, params, tol=0.0, extra=None, gaps=None) -> BoundReport:
    """``gaps`` overrides lhs - rhs when the differences were computed exactly."""
    lhs, rhs = np.asarray(lhs, float), np.asarray(rhs, float)
    gap = lhs - rhs if gaps is None else np.asarray([float(g) for g in gaps])
    i = int(np.argmax(gap)) if gap.size else 0
    return BoundReport(check, params, int(gap.size), float(gap.max(initial=-np.inf)), tol,
                       worst_sample={"index": i, "lhs": float(lhs.flat[i]), "rhs": float(rhs.flat[i])}
                       if gap.size else None, extra=extra or {})


def norm_bound_suite(cx: WeightedComplex, float_tol: float = 1e-12) -> list[BoundReport]:
    """Six norm inequalities for the coboundary, boundary and Laplacians.

    1. ||δ_k||_{inf,inf} <= k + 2 and ||∂_k||_{1,1} <= k + 1
    2. ||δ||_{1,1} <= C and ||∂||_{inf,inf} <= C with C = sup γ/m
    3. ||Δ^±||_{p,p} <= D, ||Δ^H||_{p,p} <= 2D for p in {1, 2, inf},
       D = sup (dim + 2) γ/m
    plus the identity ||δ 1_τ||_p^p = γ(τ).  Norms at p = 1 and inf, and
    the constants C and D, are computed in exact rational arithmetic from
    the (binary) weights.  Norms at p = 2 come from a floating-point SVD,
    so those comparisons allow ``float_tol`` relative slack.
    """
    w = cx.weights
    m = _fractions(w)
    gamma_q = [Fraction(0)] * len(m)
    pos = {s: i for i, s in enumerate(cx.simplices)}
    for s in cx.simplices:
        for t in cx.face_lists[s]:
            gamma_q[pos[t]] += m[pos[s]]
    dims = [len(s) - 1 for s in cx.simplices]
    C = max(g / mi for g, mi in zip(gamma_q, m))
    D = max((d + 2) * g / mi for d, g, mi in zip(dims, gamma_q, m))
    reports = []

    # per-degree blocks: δ_k has entries ±1; ∂_{k+1}[tau, sigma] = m(sigma) θ / m(tau)
    lhs_d, rhs_d, lhs_b, rhs_b, gaps_b = [], [], [], [], []
    for k, blk in cx.coboundary_blocks.items():
        lhs_d.append(float(np.abs(blk).sum(axis=1).max(initial=0)))
        rhs_d.append(k + 2)
        lo, hi = cx.block(k), cx.block(k + 1)
        m_lo, m_hi = [m[pos[t]] for t in lo], [m[pos[s]] for s in hi]
        entries = {(i, j): m_hi[j] / m_lo[i] for j, i in zip(*np.nonzero(blk))}
        nb = _exact_norm_1(entries, m_lo, m_hi)
        lhs_b.append(float(nb))
        rhs_b.append(k + 2)
        gaps_b.append(nb - (k + 2))
    reports.append(_report("coboundary-inf-per-degree", lhs_d, rhs_d, {"degrees": list(cx.coboundary_blocks)}))
    reports.append(_report("boundary-1-per-degree", lhs_b, rhs_b,
                           {"degrees": [k + 1 for k in cx.coboundary_blocks]}, gaps=gaps_b))

    Dm = cx.coboundary_matrix
    d_entries = {(i, j): Fraction(int(Dm[i, j])) for i, j in zip(*np.nonzero(Dm))}
    b_entries = {(j, i): m[i] * v / m[j] for (i, j), v in d_entries.items()}
    n1 = _exact_norm_1(d_entries, m, m)
    ninf = _exact_norm_inf(b_entries, len(m))
    reports.append(_report("coboundary-1", [float(n1)], [float(C)], {"C": float(C)}, gaps=[n1 - C]))
    reports.append(_report("boundary-inf", [float(ninf)], [float(C)], {"C": float(C)}, gaps=[ninf - C]))

    exact = _exact_laplacians(cx, m)
    lhs_pm, rhs_pm, gaps_pm, lhs_h, rhs_h, gaps_h, labels = [], [], [], [], [], [], []
    for variant in ("up", "down", "hodge"):
        A = global_laplacian(cx, variant).matrix
        bound = 2 * D if variant == "hodge" else D
        q1 = _exact_norm_1(exact[variant], m, m)
        qinf = _exact_norm_inf(exact[variant], len(m))
        n2 = norm_2(A, w)
        vals = [(float(q1), q1 - bound), (n2, n2 - float(bound) * (1 + float_tol)),
                (float(qinf), qinf - bound)]
        for p, (v, g) in zip(("1", "2", "inf"), vals):
            if variant == "hodge":
                lhs_h.append(v)
                rhs_h.append(float(bound))
                gaps_h.append(g)
            else:
                lhs_pm.append(v)
                rhs_pm.append(float(bound))
                gaps_pm.append(g)
                labels.append(f"{variant}-p{p}")
    reports.append(_report("laplacian-up-down", lhs_pm, rhs_pm, {"D": float(D), "order": labels}, gaps=gaps_pm))
    reports.append(_report("laplacian-hodge", lhs_h, rhs_h, {"D": float(2 * D), "order": ["p1", "p2", "pinf"]},
                           gaps=gaps_h))

    # ||δ 1_τ||_p^p = γ(τ): the column of δ at τ has entries ±1 on the cofaces
    gamma = cx.gamma
    Df = Dm.astype(float)
    dev = 0.0
    for p in (1.0, 2.0, 3.0):
        colp = (w[:, None] * np.abs(Df) ** p).sum(axis=0)
        dev = max(dev, float(np.abs(colp - gamma).max()))
    reports.append(BoundReport("coface-identity", {"p": [1, 2, 3]}, len(cx) * 3, dev, 1e-10))
    return reports
