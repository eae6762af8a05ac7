"""Compute reference values independently of hodgeheat and freeze them to JSON.

Uses mpmath (50 digits) and sympy exact arithmetic only.  Run from the
repository root:  python3 scripts/freeze_oracles.py
"""

from __future__ import annotations

import json
from itertools import combinations
from pathlib import Path

import mpmath as mp
import sympy as sp

mp.mp.dps = 50
OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "oracles.json"


def zeta(r):
    r = mp.mpf(r)
    return r * mp.asinh(r) - mp.sqrt(1 + r * r) + 1


def c_beta(beta, s):
    beta, s = mp.mpf(beta), mp.mpf(s)
    return (mp.cosh(beta * s) - 1) / s ** 2


def kappa(p):
    p = mp.mpf(p)

    def g(t):
        return (1 + t) * (1 + t ** (p - 1)) / (1 + t ** (p / 2)) ** 2

    # dense scan then golden-section refinement on the bracket
    ts = [mp.mpf(i) / 4000 for i in range(1, 4000)]
    vals = [g(t) for t in ts]
    i = max(range(len(vals)), key=lambda j: vals[j])
    a, b = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
    phi = (mp.sqrt(5) - 1) / 2
    for _ in range(200):
        c, d = b - phi * (b - a), a + phi * (b - a)
        if g(c) > g(d):
            b = d
        else:
            a = c
    return max(g((a + b) / 2), mp.mpf(1))


def closure(tops):
    out = set()
    for t in tops:
        for k in range(1, len(t) + 1):
            out |= {tuple(c) for c in combinations(sorted(t), k)}
    return out


def coboundary(simplices, k):
    rows = sorted(s for s in simplices if len(s) == k + 2)
    cols = sorted(s for s in simplices if len(s) == k + 1)
    D = sp.zeros(len(rows), len(cols))
    for i, sigma in enumerate(rows):
        for j, v in enumerate(sigma):
            tau = sigma[:j] + sigma[j + 1:]
            D[i, cols.index(tau)] = (-1) ** j
    return D


def betti(tops):
    cx = closure(tops)
    top = max(len(s) for s in cx) - 1
    out = []
    for k in range(top + 1):
        n = sum(1 for s in cx if len(s) == k + 1)
        up = coboundary(cx, k).rank() if k < top else 0
        down = coboundary(cx, k - 1).rank() if k > 0 else 0
        out.append(n - up - down)
    return out


def hodge_block(tops, weights, k):
    """Exact Δ_k = M^{-1} D_k^T M D_k + D_{k-1} M^{-1} D_{k-1}^T M on sorted degree-k simplices."""
    cx = closure(tops)
    block = lambda j: sorted(s for s in cx if len(s) == j + 1)
    W = lambda j: sp.diag(*[weights.get(s, 1) for s in block(j)]) if block(j) else sp.zeros(0, 0)
    n = len(block(k))
    A = sp.zeros(n, n)
    if block(k + 1):
        D = coboundary(cx, k)
        A += W(k).inv() * D.T * W(k + 1) * D
    if k > 0:
        D = coboundary(cx, k - 1)
        A += D * W(k - 1).inv() * D.T * W(k)
    return A


def torus_tops():
    tops = []
    for i in range(7):
        tops.append(sorted({i, (i + 1) % 7, (i + 3) % 7}))
        tops.append(sorted({i, (i + 2) % 7, (i + 3) % 7}))
    return tops


def f(x):
    return float(mp.nstr(x, 20))


def main():
    F5w = {(0,): 1, (1,): 2, (0, 1): 3}
    A5 = hodge_block([[0, 1]], F5w, 0)
    A2 = hodge_block([[0, 1], [1, 2], [0, 2]], {}, 1)
    A3 = hodge_block([[0, 1, 2]], {}, 1)
    R = (sp.Matrix([[1, -1], [-1, 1]]) + sp.eye(2)).inv()
    data = {
        "zeta": {str(r): f(zeta(r)) for r in (0.5, 1, 2, 5)},
        "c_beta": {"1,1": f(c_beta(1, 1)), "2,0.5": f(c_beta(2, 0.5)), "0.5,2": f(c_beta(0.5, 2))},
        "F1_p1_01": f((1 - mp.e ** -2) / 2),
        "F1_dgg_bound_t1": f(mp.e ** -zeta(1)),
        "kappa": {str(p): f(kappa(p)) for p in (1.2, 1.5, 3, 6)},
        # at p = 1 the supremum is the t -> 0 limit
        "kappa_1": float(sp.limit(2 * (1 + sp.Symbol("t")) / (1 + sp.sqrt(sp.Symbol("t"))) ** 2,
                                  sp.Symbol("t"), 0, "+")),
        "summability_F1_beta1": f(1 + mp.e ** -1),
        "betti": {"F2": betti([[0, 1], [1, 2], [0, 2]]), "F3": betti([[0, 1, 2]]),
                  "torus": betti(torus_tops())},
        "F5_hodge0": [[float(v) for v in A5.row(i)] for i in range(2)],
        "F5_hodge0_eigs": sorted(float(v) for v in A5.eigenvals(multiple=True)),
        "F2_hodge1": [[float(v) for v in A2.row(i)] for i in range(3)],
        "F2_hodge1_eigs": sorted(float(v) for v in A2.eigenvals(multiple=True)),
        "F3_hodge1": [[float(v) for v in A3.row(i)] for i in range(3)],
        "F1_resolvent_minus1": [[float(v) for v in R.row(i)] for i in range(2)],
        "rho_F3": f(1 / mp.sqrt(6)),
        "contraction_interval_M3": [f(mp.mpf(4) / 3), 4.0],
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
