"""Exact polyhedral membership tests for the d=1 cones.

These are the ground-truth oracles at d=1: the n+1 hypercube facets of the
nonnegativity cone, the dual facets of the moment cone, the interval form of
the sum-of-squares cone, and the 2x2 PSD limit cone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ConeVerdict,
    Configuration,
    MomentVector,
    ProblemDims,
    Status,
    SymmetricQuadratic,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class FacetReport:
    k: int
    residual: float


def _require_d1(dims: ProblemDims):
    if dims.d != 1:
        raise ValueError(f"d=1 required, got d={dims.d}")


def hypercube_point(n: int, k: int) -> Configuration:
    """The hypercube configuration with k entries -1 and n-k entries +1."""
    pts = np.ones((n, 1))
    pts[:k, 0] = -1.0
    return Configuration(ProblemDims(n, 1), pts)


def facet_residuals(a0, a1, a11, n: int) -> np.ndarray:
    """Residuals A0 + A1(n-2k) + A11((n-2k)^2 - n) for k = 0..n.

    Accepts scalars or batch arrays for the coefficients; with arrays of shape
    (B,) the result has shape (n+1, B).
    """
    u = (n - 2 * np.arange(n + 1, dtype=float))
    a0, a1, a11 = np.asarray(a0, dtype=float), np.asarray(a1, dtype=float), np.asarray(a11, dtype=float)
    if a0.ndim == 0:
        return a0 + a1 * u + a11 * (u * u - n)
    return a0[None, :] + np.outer(u, a1) + np.outer(u * u - n, a11)


def p_n1_membership(q: SymmetricQuadratic, tol: float = DEFAULT_TOL
                    ) -> tuple[ConeVerdict, list[FacetReport]]:
    """Facet test for the d=1 nonnegativity cone."""
    _require_d1(q.dims)
    n = q.dims.n
    r = facet_residuals(q.a0, float(q.a[0]), float(q.aa[0]), n)
    reports = [FacetReport(k, float(r[k])) for k in range(n + 1)]
    t = tol * max(1.0, q.coeff_scale() * n * n)
    kmin = int(np.argmin(r))
    rmin = float(r[kmin])
    if rmin >= -t:
        verdict = ConeVerdict(Status.MEMBER,
                              witness={"min_k": kmin, "min_residual": rmin},
                              boundary=rmin < t)
    else:
        verdict = ConeVerdict(Status.NON_MEMBER,
                              witness={"k": kmin, "residual": rmin,
                                       "point": hypercube_point(n, kmin)})
    return verdict, reports


def c_n1_residuals(m0, m1, m11, n: int) -> np.ndarray:
    """Facet residuals of the d=1 moment cone, k = 0..n.

    Facet k < n pairs m with the extreme quadratic of the nonnegativity cone
    vanishing at the adjacent hypercube values n-2k and n-2k-2:
    m0(n-1+(n-1-2k)^2) - 2 m1 (n-1-2k) + m11.  Facet k = n pairs with the
    concave extreme quadratic vanishing at both endpoints: (n^2-n) m0 - m11.
    """
    v = (n - 1 - 2 * np.arange(n, dtype=float))
    m0, m1, m11 = np.asarray(m0, dtype=float), np.asarray(m1, dtype=float), np.asarray(m11, dtype=float)
    if m0.ndim == 0:
        quad = m0 * (n - 1 + v * v) - 2.0 * m1 * v + m11
        return np.concatenate([quad, [(n * n - n) * m0 - m11]])
    quad = np.outer(n - 1 + v * v, m0) - 2.0 * np.outer(v, m1) + m11[None, :]
    return np.concatenate([quad, ((n * n - n) * m0 - m11)[None, :]])


def facet_polynomial(n: int, k: int) -> SymmetricQuadratic:
    """The separating quadratic behind the k-th moment-cone facet."""
    if k == n:
        return SymmetricQuadratic(ProblemDims(n, 1), float(n * n - n), [0.0], [-1.0])
    v = float(n - 1 - 2 * k)
    return SymmetricQuadratic(ProblemDims(n, 1), n - 1 + v * v, [-2.0 * v], [1.0])


def c_n1_membership(m: MomentVector, tol: float = DEFAULT_TOL) -> ConeVerdict:
    """Facet test for the d=1 moment cone."""
    _require_d1(m.dims)
    n = m.dims.n
    r = c_n1_residuals(m.z0, float(m.z[0]), float(m.zz[0]), n)
    t = tol * max(1.0, m.moment_scale() * n * n)
    kmin = int(np.argmin(r))
    rmin = float(r[kmin])
    if rmin >= -t:
        return ConeVerdict(Status.MEMBER,
                           witness={"min_k": kmin, "min_residual": rmin},
                           boundary=rmin < t)
    return ConeVerdict(Status.NON_MEMBER,
                       witness={"k": kmin, "residual": rmin,
                                "separating_polynomial": facet_polynomial(n, kmin)})


def interval_quadratic_min(c0: float, c1: float, c2: float, lo: float, hi: float
                           ) -> tuple[float, float]:
    """Minimum of c0 + c1 x + c2 x^2 on [lo, hi]; returns (value, argmin).

    Linear (c2 == 0) and concave (c2 < 0) cases use endpoints only.
    """
    best_x = lo
    best = c0 + c1 * lo + c2 * lo * lo
    v_hi = c0 + c1 * hi + c2 * hi * hi
    if v_hi < best:
        best, best_x = v_hi, hi
    if c2 > 0.0:
        xv = -c1 / (2.0 * c2)
        if lo < xv < hi:
            v = c0 + c1 * xv + c2 * xv * xv
            if v < best:
                best, best_x = v, xv
    return best, best_x


def sigma_n1_min(a0, a1, a11, n: int, expanded: bool = False):
    """Minimum of P_Q over [-√n, √n]; batch-friendly (arrays in, arrays out)."""
    a0 = np.asarray(a0, dtype=float) * (n / (n - 1) if expanded else 1.0)
    a1 = np.asarray(a1, dtype=float)
    a11 = np.asarray(a11, dtype=float)
    rt = math.sqrt(n)
    c0 = a0 - n * a11
    c1 = rt * a1
    c2 = n * a11
    lo_val = c0 - c1 * rt + c2 * n
    hi_val = c0 + c1 * rt + c2 * n
    best = np.minimum(lo_val, hi_val)
    with np.errstate(divide="ignore", invalid="ignore"):
        xv = np.where(c2 > 0.0, -c1 / (2.0 * c2), 0.0)
    inside = (c2 > 0.0) & (np.abs(xv) < rt)
    vert = c0 + c1 * xv + c2 * xv * xv
    return np.where(inside, np.minimum(best, vert), best)


def sigma_n1_membership(q: SymmetricQuadratic, expanded: bool = False,
                        tol: float = DEFAULT_TOL) -> ConeVerdict:
    """Closed-form d=1 test for the SOS cone (expanded=True gives its outer
    companion with A0 scaled by n/(n-1))."""
    _require_d1(q.dims)
    n = q.dims.n
    a0 = q.a0 * (n / (n - 1) if expanded else 1.0)
    rt = math.sqrt(n)
    val, x = interval_quadratic_min(a0 - n * float(q.aa[0]),
                                    rt * float(q.a[0]), n * float(q.aa[0]),
                                    -rt, rt)
    t = tol * max(1.0, q.coeff_scale() * n * n)
    if val >= -t:
        return ConeVerdict(Status.MEMBER,
                           witness={"min_value": val, "argmin_x": x},
                           boundary=val < t)
    return ConeVerdict(Status.NON_MEMBER,
                       witness={"min_value": val, "argmin_x": x})


def limit_cone_d1(b: tuple[float, float, float], tol: float = DEFAULT_TOL) -> ConeVerdict:
    """PSD test for [[B0-B11, B1/2], [B1/2, B11]], the large-n d=1 limit cone."""
    b0, b1, b11 = (float(x) for x in b)
    scale = max(1.0, abs(b0), abs(b1), abs(b11))
    t = tol * scale
    m00 = b0 - b11
    det = m00 * b11 - 0.25 * b1 * b1
    checks = {"top_left": m00, "bottom_right": b11, "det": det}
    if m00 >= -t and b11 >= -t and det >= -t * scale:
        margin = min(m00, b11, det / scale)
        return ConeVerdict(Status.MEMBER, witness=checks, boundary=margin < t)
    return ConeVerdict(Status.NON_MEMBER, witness=checks)
