"""Full-system Hopf analysis: the parametric Hopf U-curve, its singular
asymptotes, the first Lyapunov coefficient along the curve, and tracking of
the generalized-Hopf (Bautin) points in (p, s, eps).

The monic characteristic polynomial lambda^3 + c2*lambda^2 + c1*lambda + c0
of the fast-time Jacobian has a pure imaginary pair exactly when c0 = c1*c2
(and c1 > 0), which yields the parametric curve

    s(x1*)^2 = 50*eps*(eps - 1) / (1 + 10*eps - 22*x1* + 30*x1*^2)
    p(x1*)   = x1*^3 - 1.1*x1*^2 + 1.1*x1*

The p(x1*) used here is the equilibrium condition p = x1 - c0(x1),
written out as the cubic above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import model
from .curves import CurveBranch
from .model import DomainError

#: Hopf residual |c0 - c1*c2| accepted for emitted curve points.
RESIDUAL_TOL = 1e-10

#: |omega| below this is a fold-Hopf degeneracy; l1 is meaningless there.
OMEGA_DEGENERATE = 1e-6


@dataclass
class HopfPoint:
    p: float
    s: float
    eps: float
    x1_star: float
    omega: float
    l1: float
    criticality: str  # "super", "sub" or "degenerate"
    residual: float


def char_poly_coeffs(x1_star: float, s: float, eps: float) -> tuple[float, float, float]:
    """Monic characteristic-polynomial coefficients (c0, c1, c2) at the
    equilibrium abscissa x1_star (fast-time Jacobian)."""
    state = np.array([x1_star, 0.0, x1_star])
    params = model.ModelParams(model.equilibrium_p(x1_star), s, eps)
    coeffs = np.poly(model.full_jacobian(state, params))
    return float(coeffs[3]), float(coeffs[2]), float(coeffs[1])


def hopf_interval(eps: float) -> tuple[float, float]:
    """x1* interval where 1 + 10*eps - 22*x1* + 30*x1*^2 < 0."""
    disc = 364.0 - 1200.0 * eps
    if disc <= 0.0:
        raise DomainError(f"no Hopf interval at eps={eps}")
    r = math.sqrt(disc) / 60.0
    return 11.0 / 30.0 - r, 11.0 / 30.0 + r


def hopf_point(x1_star: float, eps: float, with_l1: bool = True) -> HopfPoint:
    """Hopf point of the parametric curve at the given equilibrium abscissa."""
    denom = 1.0 + 10.0 * eps - 22.0 * x1_star + 30.0 * x1_star**2
    if denom >= 0.0:
        raise DomainError(f"x1*={x1_star} outside the Hopf interval")
    s = math.sqrt(50.0 * eps * (eps - 1.0) / denom)
    p = model.equilibrium_p(x1_star)
    c0, c1, c2 = char_poly_coeffs(x1_star, s, eps)
    residual = abs(c0 - c1 * c2)
    omega = math.sqrt(c1) if c1 > 0.0 else float("nan")
    point = HopfPoint(p=p, s=s, eps=eps, x1_star=x1_star, omega=omega,
                      l1=float("nan"), criticality="degenerate",
                      residual=residual)
    if with_l1:
        try:
            point.l1 = lyapunov_l1(point)
        except DomainError:
            point.l1 = float("nan")
        if not math.isnan(point.l1):
            point.criticality = "super" if point.l1 < 0.0 else "sub"
    return point


def hopf_curve(eps: float, n: int = 200, with_l1: bool = True,
               margin: float = 1e-4) -> CurveBranch:
    """The Hopf U-curve at fixed eps as n points swept in x1*.

    ``margin`` is the relative inset from the interval endpoints, where
    s diverges (the vertical asymptotes of the singular limit).
    """
    lo, hi = hopf_interval(eps)
    inset = margin * (hi - lo)
    branch = CurveBranch(
        columns=("p", "s", "eps", "x1_star", "omega", "l1", "criticality"),
        meta={"eps": eps, "kind": "hopf"},
    )
    branch.meta["points_obj"] = points = []
    for x1 in np.linspace(lo + inset, hi - inset, n):
        pt = hopf_point(float(x1), eps, with_l1=with_l1)
        points.append(pt)
        branch.points.append((pt.p, pt.s, pt.eps, pt.x1_star, pt.omega,
                              pt.l1, pt.criticality))
    return branch


def hopf_asymptotes() -> dict:
    """Singular-limit skeleton of the U-curve.

    Two vertical lines {p_-} x [0, inf) and {p_+} x [0, inf) plus the
    horizontal segment [p_-, p_+] x {0}.
    """
    p_minus, p_plus = model.slow_fold_params()
    return {
        "p_minus": p_minus,
        "p_plus": p_plus,
        "horizontal_segment": ((p_minus, 0.0), (p_plus, 0.0)),
    }


def _hopf_eigendata(A: np.ndarray):
    """Right/left eigenvectors for the near-imaginary pair of A."""
    w, v = np.linalg.eig(A)
    idx = int(np.argmin(np.abs(w.real) + np.where(w.imag > 0, 0.0, np.inf)))
    omega = w[idx].imag
    q = v[:, idx]
    wl, vl = np.linalg.eig(A.T)
    jdx = int(np.argmin(np.abs(wl - np.conj(w[idx]))))
    pvec = vl[:, jdx]
    pvec = pvec / np.conj(np.vdot(pvec, q))  # <p, q> = 1
    return omega, q, pvec


def lyapunov_l1(point: HopfPoint) -> float:
    """First Lyapunov coefficient at a Hopf point of the full system.

    Uses the standard 3-D projection formula onto the center eigenspace
    with the multilinear forms of the quadratic and cubic Taylor terms;
    only the cubic nullcline contributes nonlinearity, so B and C act on
    the x1-components alone.  The magnitude follows the usual genericity
    normalization; only the sign and its zero crossings are used here.
    """
    c0, c1, c2 = char_poly_coeffs(point.x1_star, point.s, point.eps)
    scale = max(1.0, abs(c0), abs(c1 * c2))  # coefficients grow ~s^2 near the asymptotes
    if abs(c0 - c1 * c2) > RESIDUAL_TOL * scale:
        raise DomainError(f"not on the Hopf set: residual {point.residual:.3g}")
    state = np.array([point.x1_star, 0.0, point.x1_star])
    params = model.ModelParams(point.p, point.s, point.eps)
    A = model.full_jacobian(state, params)
    omega, q, pvec = _hopf_eigendata(A)
    if abs(omega) < OMEGA_DEGENERATE:
        return float("nan")

    b2 = -0.2 * model.cubic_second(point.x1_star)  # d2(x2')/dx1^2
    c3 = -0.2 * model.cubic_third()                # d3(x2')/dx1^3

    def B(u, v):
        return np.array([0.0, b2 * u[0] * v[0], 0.0])

    def C(u, v, w):
        return np.array([0.0, c3 * u[0] * v[0] * w[0], 0.0])

    qb = np.conj(q)
    eye = np.eye(3)
    term1 = np.vdot(pvec, C(q, q, qb))
    term2 = -2.0 * np.vdot(pvec, B(q, np.linalg.solve(A, B(q, qb))))
    term3 = np.vdot(pvec, B(qb, np.linalg.solve(2j * omega * eye - A, B(q, q))))
    return float((term1 + term2 + term3).real / (2.0 * omega))


def gh_locate(eps: float, n_scan: int = 160, left_half_only: bool = True) -> list[HopfPoint]:
    """Generalized Hopf points: zeros of l1 along the Hopf curve.

    Scans l1 over the x1* sweep, then refines each sign change by a
    bracketed solve.  ``left_half_only`` restricts to x1* < 11/30; the
    curve is symmetric about that abscissa, so the right-half points are
    the mirror images of the left-half ones.
    """
    lo, hi = hopf_interval(eps)
    if left_half_only:
        hi = min(hi, 11.0 / 30.0)
    # geometric spacing from the left edge: the high-s GH point sits at an
    # x1*-offset that shrinks with eps (the curve steepens into the
    # asymptote), so a uniform grid loses it for eps below ~1e-3
    xs = lo + (hi - lo) * np.geomspace(1e-8, 1.0, n_scan)
    xs[-1] = hi - 1e-4 * (hi - lo)
    l1s = np.array([hopf_point(float(x), eps).l1 for x in xs])

    found = []
    l1_of = lambda x: hopf_point(float(x), eps).l1
    for i in range(n_scan - 1):
        a, b = l1s[i], l1s[i + 1]
        if np.isnan(a) or np.isnan(b) or a * b > 0.0:
            continue
        x_root = brentq(l1_of, xs[i], xs[i + 1], xtol=1e-13, rtol=1e-14)
        found.append(hopf_point(float(x_root), eps))
    return found


def gh_track(eps_grid) -> tuple[CurveBranch, CurveBranch]:
    """Track the two left-half GH points over an eps grid.

    Points are branch-matched by their ordering in x1* along the curve
    (the branch closer to the left asymptote keeps the larger s).  Raises
    if some eps does not yield exactly two points.
    """
    cols = ("p", "s", "eps", "x1_star", "omega", "l1", "criticality")
    b1 = CurveBranch(columns=cols, meta={"gh": 1})
    b2 = CurveBranch(columns=cols, meta={"gh": 2})
    for eps in eps_grid:
        pts = gh_locate(float(eps))
        if len(pts) != 2:
            raise DomainError(
                f"expected 2 GH points at eps={eps}, found {len(pts)}")
        pts.sort(key=lambda pt: pt.x1_star)
        # smaller x1* sits near the asymptote: large-s branch (GH2)
        for pt, branch in ((pts[1], b1), (pts[0], b2)):
            branch.points.append((pt.p, pt.s, pt.eps, pt.x1_star, pt.omega,
                                  pt.l1, pt.criticality))
    return b1, b2


def extrapolate_to_zero(values) -> float:
    """Aitken delta-squared extrapolation of a sequence computed along a
    decreasing eps grid; no convergence rate is assumed."""
    v = [float(x) for x in values]
    if len(v) < 3:
        return v[-1]
    v0, v1, v2 = v[-3], v[-2], v[-1]
    denom = (v2 - v1) - (v1 - v0)
    if denom == 0.0:
        return v2
    return v2 - (v2 - v1) ** 2 / denom
