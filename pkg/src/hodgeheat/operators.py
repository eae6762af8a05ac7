"""Laplacians of weighted complexes as magnetic Schrödinger operators.

A :class:`LaplacianMatrix` stores ``A`` with ``(A f)(x) = sum_y A[x, y] f(y)``
together with the measure ``m``; it is self-adjoint in l^2(m), i.e.
``m[x] A[x, y] == conj(m[y] A[y, x])``.  The Schrödinger triple (b, o, c)
is read off the matrix entries, which makes the decomposition unique once
b >= 0 and |o| = 1 are fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import optimize

from .complex import Cochain, Simplex, WeightedComplex
from .reports import BoundReport, ViolationTracker, timed

VARIANTS = ("up", "down", "hodge")

SYMMETRY_TOL = 1e-12


class ModelError(ValueError):
    """The operator violates a standing assumption (positivity, symmetry)."""


@dataclass(frozen=True, eq=False)
class LaplacianMatrix:
    matrix: np.ndarray
    measure: np.ndarray
    keys: tuple = ()
    variant: str = "schrodinger"
    degree: int | None = None

    def __post_init__(self):
        if not self.keys:
            object.__setattr__(self, "keys", tuple(range(self.matrix.shape[0])))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def symmetrized(self) -> np.ndarray:
        """M^{1/2} A M^{-1/2}, Hermitian for an m-self-adjoint A."""
        r = np.sqrt(self.measure)
        s = self.matrix * r[:, None] / r[None, :]
        return 0.5 * (s + s.conj().T)

    @cached_property
    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and orthonormal eigenvectors of the symmetrized matrix."""
        return np.linalg.eigh(self.symmetrized())

    @property
    def bottom(self) -> float:
        """Smallest eigenvalue (lambda_2 of the finite operator)."""
        return float(self.eig[0][0])

    def asymmetry(self) -> float:
        mA = self.measure[:, None] * self.matrix
        return float(np.max(np.abs(mA - mA.conj().T), initial=0.0))

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ f

    def form_matrix(self) -> np.ndarray:
        """Hermitian matrix of the quadratic form: Q(f, f) = f^* (M A) f."""
        mA = self.measure[:, None] * self.matrix
        return 0.5 * (mA + mA.conj().T)


@dataclass(frozen=True, eq=False)
class SchrodingerData:
    """Magnetic Schrödinger graph (b, o, c) over (X, m)."""

    b: np.ndarray
    o: np.ndarray
    c: np.ndarray
    m: np.ndarray
    keys: tuple = field(default=())

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        if np.any(b < 0) or np.any(np.diag(b) != 0):
            raise ModelError("edge weights must be non-negative with zero diagonal")
        if np.max(np.abs(b - b.T), initial=0.0) > SYMMETRY_TOL * max(1.0, np.abs(b).max(initial=0)):
            raise ModelError("edge weights must be symmetric")
        o = np.asarray(self.o)
        mask = b > 0
        if np.any(np.abs(np.abs(o[mask]) - 1) > 1e-12):
            raise ModelError("magnetic potential must be unimodular on edges")
        if np.any(np.abs(o[mask] - np.conj(o.T[mask])) > 1e-12):
            raise ModelError("magnetic potential must satisfy o(x,y) = conj(o(y,x))")
        if not self.keys:
            object.__setattr__(self, "keys", tuple(range(b.shape[0])))

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def to_laplacian(self, variant: str = "schrodinger", degree: int | None = None) -> LaplacianMatrix:
        """Reassemble A with A[x, y] = -b o / m(x) off the diagonal."""
        o = self.o
        off = -(self.b * o) / self.m[:, None]
        diag = (self.b.sum(axis=1) + self.c) / self.m
        a = off.astype(complex if np.iscomplexobj(o) else float)
        np.fill_diagonal(a, diag)
        return LaplacianMatrix(a, self.m, self.keys, variant, degree)

    def free(self) -> "SchrodingerData":
        """The graph (b, 1, 0): no magnetic field, no potential."""
        return SchrodingerData(self.b, np.ones_like(self.b, dtype=float),
                               np.zeros_like(self.c), self.m, self.keys)

    def with_potential(self, c: np.ndarray) -> "SchrodingerData":
        return replace(self, c=np.asarray(c, dtype=float))

    @property
    def c_minus(self) -> np.ndarray:
        return np.maximum(-self.c, 0.0)

    def neighbours(self, x: int) -> np.ndarray:
        return np.flatnonzero(self.b[x] > 0)


# -- assembly -----------------------------------------------------------------

def assemble_laplacian(cx: WeightedComplex, variant: str, k: int) -> LaplacianMatrix:
    """Degree-k block of the up (∂δ), down (δ∂) or Hodge Laplacian."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if k not in cx.degree_slices:
        raise ValueError(f"degree {k} out of range [{cx.min_degree}, {cx.dim}]")
    m_k = cx.block_weights(k)
    n = m_k.size
    a = np.zeros((n, n))
    if variant in ("up", "hodge") and k in cx.coboundary_blocks:
        d = cx.coboundary_blocks[k].astype(float)
        m_up = cx.block_weights(k + 1)
        a += (d.T * m_up[None, :]) @ d / m_k[:, None]
    if variant in ("down", "hodge") and (k - 1) in cx.coboundary_blocks:
        d = cx.coboundary_blocks[k - 1].astype(float)
        m_lo = cx.block_weights(k - 1)
        a += (d / m_lo[None, :]) @ d.T * m_k[None, :]
    return LaplacianMatrix(a, m_k, cx.block(k), variant, k)


def global_laplacian(cx: WeightedComplex, variant: str) -> LaplacianMatrix:
    """Block-diagonal Laplacian on all simplices (all blocks are degree-preserving)."""
    n = len(cx)
    a = np.zeros((n, n))
    for k, sl in cx.degree_slices.items():
        a[sl, sl] = assemble_laplacian(cx, variant, k).matrix
    return LaplacianMatrix(a, np.asarray(cx.weights), cx.simplices, variant, None)


def extract_schrodinger(lap: LaplacianMatrix, tol: float = 1e-10) -> SchrodingerData:
    """Read (b, o, c) off an m-self-adjoint matrix."""
    asym = lap.asymmetry()
    scale = max(1.0, float(np.max(np.abs(lap.measure[:, None] * lap.matrix), initial=0.0)))
    if asym > tol * scale:
        raise ModelError(f"matrix is not m-self-adjoint (defect {asym:.3e})")
    a = lap.matrix
    m = lap.measure
    absa = np.abs(a)
    b = m[:, None] * absa
    np.fill_diagonal(b, 0.0)
    b = 0.5 * (b + b.T)
    with np.errstate(invalid="ignore", divide="ignore"):
        o = np.where(absa > 0, -a / np.where(absa > 0, absa, 1.0), 1.0)
    if not np.iscomplexobj(a):
        o = np.where(absa > 0, o, 1.0).real
    np.fill_diagonal(o, 1.0)
    c = (m * np.real(np.diag(a))) - b.sum(axis=1)
    return SchrodingerData(b, o, c, m.copy(), lap.keys)


# -- curvature ----------------------------------------------------------------

def forman_curvature(cx: WeightedComplex, tau: Simplex) -> float:
    """Forman curvature c^H(tau)/m(tau) from the weighted closed formula.

    For m = 1 this is 2(k+1) + (k+2)#cofaces - sum over faces of their
    coface counts, provided tau has k+1 faces.  Vertices of a non-augmented
    complex have no faces, and there the formula does not agree with the
    potential extracted from the Hodge block (see ``forman_discrepancy``).
    """
    tau = tuple(tau)
    if len(tau) == 0:
        raise ValueError("curvature is defined for simplices of dimension >= 0")
    w = cx.weight
    m_tau = w(tau)
    tau_faces = cx.face_lists[tau]
    tau_cofaces = set(cx.coface_lists[tau])
    total = sum(m_tau / w(rho) for rho in tau_faces)
    total += sum(w(sigma) for sigma in tau_cofaces) / m_tau
    for rho in tau_faces:
        for other in cx.coface_lists[rho]:
            if other == tau:
                continue
            shared = sum(w(s) for s in cx.coface_lists[other] if s in tau_cofaces)
            total -= abs(w(other) / w(rho) - shared / m_tau)
    return float(total)


def combinatorial_forman(cx: WeightedComplex, tau: Simplex) -> int:
    """2(k+1) + (k+2)#{sigma > tau} - sum_{rho < tau} #{tau' > rho}."""
    tau = tuple(tau)
    k = len(tau) - 1
    return (2 * (k + 1) + (k + 2) * len(cx.coface_lists[tau])
            - sum(len(cx.coface_lists[rho]) for rho in cx.face_lists[tau]))


def forman_discrepancy(cx: WeightedComplex, k: int) -> list[dict]:
    """Simplices of degree k where the closed formula differs from the extracted c/m.

    Each row holds the simplex, both values and their difference.
    """
    sd = extract_schrodinger(assemble_laplacian(cx, "hodge", k))
    rows = []
    for i, tau in enumerate(cx.block(k)):
        formula = forman_curvature(cx, tau)
        extracted = sd.c[i] / sd.m[i]
        if abs(formula - extracted) > 1e-10 * max(1.0, abs(extracted)):
            rows.append({"simplex": list(tau), "formula": formula,
                         "extracted": float(extracted), "difference": float(formula - extracted)})
    return rows


# -- forms --------------------------------------------------------------------

def _vec(f) -> np.ndarray:
    return f.values if isinstance(f, Cochain) else np.asarray(f)


def quadratic_form(sd: SchrodingerData, f, g=None) -> complex:
    """Q(f, g) = 1/2 sum b grad_o f conj(grad_o g) + sum c f conj(g)."""
    f = _vec(f)
    g = f if g is None else _vec(g)
    grad_f = f[:, None] - sd.o * f[None, :]
    grad_g = g[:, None] - sd.o * g[None, :]
    return complex(0.5 * np.sum(sd.b * grad_f * np.conj(grad_g)) + np.sum(sd.c * f * np.conj(g)))


def positive_part_form(sd: SchrodingerData, f, g=None) -> complex:
    """q = Q + <(c_-/m) ., .>, the form with the negative potential removed."""
    f = _vec(f)
    g = f if g is None else _vec(g)
    return quadratic_form(sd, f, g) + complex(np.sum(sd.c_minus * f * np.conj(g)))


def truncate(sd: SchrodingerData, sites: Sequence[int]) -> LaplacianMatrix:
    """H_K: restriction of the form to functions supported in ``sites``.

    The couplings to the complement are moved into the potential,
    c_K(x) = c(x) + sum_{y not in K} b(x, y).
    """
    idx = np.asarray(sorted(set(int(i) for i in sites)), dtype=int)
    if idx.size == 0:
        raise ValueError("truncation set must be nonempty")
    outside = np.ones(sd.n, dtype=bool)
    outside[idx] = False
    c_k = sd.c[idx] + sd.b[np.ix_(idx, np.flatnonzero(outside))].sum(axis=1)
    sub = SchrodingerData(sd.b[np.ix_(idx, idx)], sd.o[np.ix_(idx, idx)], c_k,
                          sd.m[idx], tuple(sd.keys[i] for i in idx))
    return sub.to_laplacian(variant="truncated")


# -- form bounds --------------------------------------------------------------

@dataclass
class FormBoundEstimate:
    """Smallest M with ||sqrt(c_-/m) phi||^2 <= M Q(phi) + C ||phi||^2, per C."""

    C: np.ndarray
    M: np.ndarray
    witnesses: list

    def first_finite(self) -> tuple[float, float]:
        """(M, C) for the smallest C in the grid with finite M."""
        for C, M in zip(self.C, self.M):
            if np.isfinite(M):
                return float(M), float(C)
        raise ModelError("potential is not form bounded on the supplied C grid")

    def as_rows(self) -> list[dict]:
        return [{"C": float(c), "M": float(m)} for c, m in zip(self.C, self.M)]


def _min_form_constant(lhs: np.ndarray, q: np.ndarray, rank_tol: float):
    """sup of (phi* lhs phi)/(phi* q phi) over phi with the convention 0/0 -> 0."""
    mu, U = np.linalg.eigh(q)
    zero = mu <= rank_tol
    R, Z = U[:, ~zero], U[:, zero]
    if Z.shape[1]:
        lzz = Z.conj().T @ lhs @ Z
        nu, W = np.linalg.eigh(0.5 * (lzz + lzz.conj().T))
        lscale = max(1.0, np.abs(lhs).max())
        if nu.size and nu[-1] > 1e-10 * lscale:
            return np.inf, Z @ W[:, -1]
        # degenerate kernel directions must not couple to the range
        neg = nu < -1e-10 * lscale
        coupling = (Z @ W[:, ~neg]).conj().T @ lhs @ R if R.shape[1] else np.zeros((0, 0))
        if coupling.size and np.abs(coupling).max() > 1e-9 * lscale:
            return np.inf, Z @ W[:, ~neg][:, 0]
        Zn = Z @ W[:, neg]
        if R.shape[1] == 0:
            return 0.0, None
        lrr = R.conj().T @ lhs @ R
        if Zn.shape[1]:
            lzr = Zn.conj().T @ lhs @ R
            nn = nu[neg]
            lrr = lrr - lzr.conj().T @ (lzr / nn[:, None])
    else:
        lrr = R.conj().T @ lhs @ R
    if R.shape[1] == 0:
        return 0.0, None
    scale = 1.0 / np.sqrt(mu[~zero])
    red = scale[:, None] * lrr * scale[None, :]
    ev, EV = np.linalg.eigh(0.5 * (red + red.conj().T))
    top = float(ev[-1])
    # eigenvalues at rounding level count as zero
    if top <= 1e-12 * max(1.0, float(np.abs(red).max())):
        return 0.0, None
    return top, R @ (scale * EV[:, -1])


def estimate_form_bound(sd: SchrodingerData, C_grid: Sequence[float]) -> FormBoundEstimate:
    """Minimal form-bound constant M(C) for every C in ``C_grid``.

    Solves the generalized eigenproblem of diag(c_-) - C diag(m) against the
    form matrix of Q after deflating ker Q; directions in ker Q on which the
    left side is positive make M(C) infinite.
    """
    q = sd.to_laplacian().form_matrix()
    evals = np.linalg.eigvalsh(q)
    qnorm = max(1.0, float(np.abs(evals).max(initial=0.0)))
    rank_tol = 1e-9 * qnorm
    if evals.size and evals[0] < -rank_tol:
        raise ModelError(f"quadratic form is not positive (min eigenvalue {evals[0]:.3e})")
    Cs = np.asarray(sorted(float(c) for c in C_grid))
    if np.any(Cs < 0):
        raise ValueError("C grid must be non-negative")
    Ms, witnesses = [], []
    for C in Cs:
        lhs = np.diag(sd.c_minus - C * sd.m).astype(q.dtype)
        M, w = _min_form_constant(lhs, q, rank_tol)
        Ms.append(M)
        witnesses.append(w)
    return FormBoundEstimate(Cs, np.asarray(Ms), witnesses)


# -- semigroup characterisation of the potential ------------------------------

def phi_x(sd: SchrodingerData, x: int) -> np.ndarray:
    """1 at x, conj(o(x, y)) at b-neighbours y, 0 elsewhere."""
    phi = np.zeros(sd.n, dtype=complex if np.iscomplexobj(sd.o) else float)
    nb = sd.neighbours(x)
    phi[nb] = np.conj(sd.o[x, nb])
    phi[x] = 1.0
    return phi


def curvature_from_semigroup(sd: SchrodingerData, x: int, h: float = 1e-5) -> dict:
    """Recover -c(x)/m(x) as the time derivative at 0 of Re (e^{-tH} phi_x)(x).

    Returns the exact value H phi_x(x) and the central-difference estimate
    using e^{+-hH}.
    """
    lap = sd.to_laplacian()
    phi = phi_x(sd, x)
    exact = lap.apply(phi)[x]
    w, V = lap.eig
    r = np.sqrt(lap.measure)

    def propagate(s):
        # e^{-sA} phi through the symmetrized eigenbasis
        return (V @ (np.exp(-s * w) * (V.conj().T @ (r * phi)))) / r

    fd = (np.real(propagate(h)[x]) - np.real(propagate(-h)[x])) / (2 * h)
    return {"site": x, "H_phi_x": complex(exact), "c_over_m": float(sd.c[x] / sd.m[x]),
            "fd_derivative": float(fd), "target": float(-sd.c[x] / sd.m[x])}


# -- p-form inequalities --------------------------------------------------------

def _power(f: np.ndarray, e: float) -> np.ndarray:
    """f |f|^e with the convention 0 at zeros of f."""
    a = np.abs(f)
    out = np.zeros_like(f)
    nz = a > 0
    out[nz] = f[nz] * a[nz] ** e
    return out


def p_form_terms(sd: SchrodingerData, f: np.ndarray, p: float) -> tuple[float, float]:
    """(Re q(f, f|f|^{p-2}), q(f|f|^{(p-2)/2}))."""
    lhs = positive_part_form(sd, f, _power(f, p - 2)).real
    rhs = positive_part_form(sd, _power(f, (p - 2) / 2)).real
    return float(lhs), float(rhs)


def c_p(p: float) -> float:
    """4(p-1)/p^2, with the limit 0 at p = inf."""
    if np.isinf(p):
        return 0.0
    return 4.0 * (p - 1) / p ** 2


def kappa(p: float) -> float:
    """sup over t in (0,1) of (1+t)(1+t^{p-1})/(1+t^{p/2})^2."""
    if p < 1:
        raise ValueError("kappa is defined for p >= 1")

    def g(t):
        return (1 + t) * (1 + t ** (p - 1)) / (1 + t ** (p / 2)) ** 2

    # boundary limits: t -> 1 gives 1; t -> 0 gives 1 + [p == 1]
    best = max(1.0, 2.0 if p == 1 else 1.0)
    grid = np.concatenate([np.logspace(-12, -1, 200), np.linspace(0.1, 1 - 1e-12, 400)])
    vals = g(grid)
    i = int(np.argmax(vals))
    best = max(best, float(vals[i]))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(lambda t: -g(t), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-14})
        best = max(best, float(-res.fun))
    return best


def p_form_check(sd: SchrodingerData, p_grid: Sequence[float], rng: np.random.Generator,
                 samples: int = 1000, tol: float = 1e-10) -> BoundReport:
    """C_p q(f|f|^{(p-2)/2}) <= Re q(f, f|f|^{p-2}) <= kappa(p) q(f|f|^{(p-2)/2}).

    Tested on ``samples`` random complex vectors per p.
    """
    tracker = ViolationTracker()
    with timed() as clock:
        for p in p_grid:
            cp, kp = c_p(p), kappa(p)
            lo, hi = [], []
            for _ in range(samples):
                f = rng.standard_normal(sd.n) + 1j * rng.standard_normal(sd.n)
                lhs, rhs = p_form_terms(sd, f, p)
                lo.append((cp * rhs, lhs))
                hi.append((lhs, kp * rhs))
            lo, hi = np.array(lo), np.array(hi)
            tracker.update(lo[:, 0], lo[:, 1], lambda i, p=p: {"p": p, "side": "lower", "sample": i})
            tracker.update(hi[:, 0], hi[:, 1], lambda i, p=p: {"p": p, "side": "upper", "sample": i})
    return BoundReport("p-form", {"p_grid": [float(p) for p in p_grid], "samples": samples},
                       tracker.count, tracker.worst, tol, worst_sample=tracker.sample,
                       extra={"C_p": {str(p): c_p(p) for p in p_grid},
                              "kappa": {str(p): kappa(p) for p in p_grid}},
                       runtime=clock())
