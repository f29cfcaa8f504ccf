"""Homoclinic wave speeds: singular construction and finite-eps location.

The singular (eps = 0) homoclinic skeleton in the (p, s) parameter plane
consists of a segment of slow waves on the axis s = 0 and a curve of fast
waves built from layer heteroclinics taken at the equilibrium height
y = x1*(p) (upward jump) and at a return height y = x1*(p) + v (downward
jump).  For eps > 0 the actual homoclinic speeds are located without
computing the orbits: the one-dimensional unstable manifold of the
saddle-focus q eventually escapes left or right, and the speeds at which
the classification flips are the homoclinic bifurcation values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import model
from .curves import CurveBranch
from .fast_layer import HetConnection, double_het_pbar, find_het
from .integrate import IntegratorOptions, Trajectory, integrate
from .model import DomainError, ModelParams

#: Fold parameter values p_- < p_+ where the full equilibrium crosses the
#: folds of the critical manifold; no singular homoclinics exist between.
P_MINUS = model.equilibrium_p(model.X_MINUS)
P_PLUS = model.equilibrium_p(model.X_PLUS)

#: Escape abscissa for the unstable-manifold classification.
ESCAPE_X1 = 2.0

#: Separatrix abscissa used by the time-out fallback classifier.
_MIDDLE_X1 = 11.0 / 30.0

#: Flip brackets narrower than this are one (exponentially thin) bundle.
BUNDLE_WIDTH = 1e-10


@dataclass
class SingularHomoclinic:
    """A singular (eps = 0) homoclinic orbit assembled from heteroclinics.

    ``up_connection`` is the left-to-right layer connection at the
    equilibrium height y = x1*(p); fast waves carry a second, right-to-left
    ``down_connection`` at the return height y = x1*(p) + v.
    """

    p: float
    s: float
    up_connection: HetConnection
    down_connection: HetConnection | None
    v: float
    kind: str  # "slow-wave", "fast-wave" or "double-het"


@dataclass
class CCurvePoint:
    """Bracketed pair of homoclinic speeds at one (p, eps)."""

    p: float
    s1: float
    s2: float
    eps: float
    bracket_width: float


@dataclass
class SingularDiagram:
    """Machine-readable singular (eps = 0) bifurcation diagram.

    A = (p*, 0) is the double heteroclinic, B = (p_-, 0) the fold-crossing
    on the axis, C = (p_-, s*) the upper end of the fast-wave curve.  AB is
    the slow-wave segment, AC the fast-wave curve.
    """

    A: tuple[float, float]
    B: tuple[float, float]
    C: tuple[float, float]
    segment_ab: list[tuple[float, float]]
    curve_ac: list[tuple[float, float]]
    hopf_asymptotes: dict
    canard_p: float
    fold_p: tuple[float, float] = (P_MINUS, P_PLUS)

    def to_dict(self) -> dict:
        return {
            "A": list(self.A), "B": list(self.B), "C": list(self.C),
            "segment_ab": [list(q) for q in self.segment_ab],
            "curve_ac": [list(q) for q in self.curve_ac],
            "hopf_asymptotes": self.hopf_asymptotes,
            "canard_p": self.canard_p,
            "fold_p": list(self.fold_p),
        }


def equilibrium_pbar(p: float, v: float = 0.0) -> float:
    """Layer parameter p - y at the height y = x1*(p) + v."""
    return p - model.equilibrium_x1(p) - v


def double_het_point() -> tuple[float, float]:
    """(p*, 0): the p at which the equilibrium height meets the s = 0
    double heteroclinic, solving p - x1*(p) = pbar*."""
    target = double_het_pbar()
    p_star = brentq(lambda p: equilibrium_pbar(p) - target, -1.0, P_MINUS,
                    xtol=1e-14, rtol=1e-15)
    return float(p_star), 0.0


def s_star(scan: tuple[float, float] = (1.2, 1.8)) -> float:
    """Terminal speed of the fast-wave curve at p = p_-.

    There the left saddle and the middle equilibrium of the layer problem
    collide at the fold, and the connection leaves along the strong
    unstable direction of the saddle-node.
    """
    conn = find_het(direction="left-to-right", pbar=model.PBAR_R,
                    scan=scan, gap_tol=1e-8, degenerate_left=True)
    return conn.s


def upper_connection(p: float, s_scan: tuple[float, float] = (0.0, 1.6),
                     gap_tol: float = 1e-8) -> HetConnection:
    """Left-to-right layer connection at the equilibrium height y = x1*(p)."""
    if model.equilibrium_x1(p) >= model.X_MINUS:
        raise DomainError(
            f"equilibrium at p={p:.6g} is not on the left branch: no "
            "singular homoclinic departs from it")
    pbar = equilibrium_pbar(p)
    if not model.PBAR_L < pbar < model.PBAR_R:
        raise DomainError(
            f"height pbar={pbar:.6g} outside the three-equilibria band")
    return find_het(direction="left-to-right", pbar=pbar, scan=s_scan,
                    gap_tol=gap_tol)


def singular_upper_curve(p_range: tuple[float, float] | None = None,
                         n: int = 30, gap_tol: float = 1e-8) -> CurveBranch:
    """Fast-wave speed curve s(p) at the equilibrium height (A to C).

    Defaults to the full admissible band between p* and p_- (shrunk by a
    small margin at both ends, where the speed tends to 0 and to the
    saddle-node limit s*).
    """
    if p_range is None:
        p_star, _ = double_het_point()
        p_range = (p_star + 1e-4, P_MINUS - 1e-4)
    ps = np.linspace(p_range[0], p_range[1], n)
    branch = CurveBranch(columns=("p", "s", "pbar"),
                         meta={"height": "equilibrium"})
    window = (0.0, 1.7)
    for p in ps:
        try:
            conn = upper_connection(float(p), s_scan=window, gap_tol=gap_tol)
        except DomainError:
            conn = upper_connection(float(p), gap_tol=gap_tol)
        branch.points.append((float(p), conn.s, conn.pbar))
        window = (max(0.0, conn.s - 0.2), min(1.7, conn.s + 0.4))
    return branch


def return_connection(p: float, v: float,
                      s_scan: tuple[float, float] = (0.0, 1.6),
                      gap_tol: float = 1e-8) -> HetConnection:
    """Right-to-left layer connection at the return height y = x1*(p) + v."""
    pbar = equilibrium_pbar(p, v)
    if not model.PBAR_L < pbar < model.PBAR_R:
        raise DomainError(
            f"height pbar={pbar:.6g} outside the three-equilibria band")
    return find_het(direction="right-to-left", pbar=pbar, scan=s_scan,
                    gap_tol=gap_tol)


def singular_return_curve(v: float, p_range: tuple[float, float] | None = None,
                          n: int = 25, gap_tol: float = 1e-8) -> CurveBranch:
    """Speed curve of right-to-left connections at height x1*(p) + v."""
    if v <= 0.0:
        raise DomainError("return height offset v must be positive")
    if p_range is None:
        # right-to-left connections live at pbar in (pbar_l, pbar*); clip
        # the default window (p*, p_-) to where the height stays inside
        lo, hi = double_het_point()[0] + 1e-4, P_MINUS - 1e-4

        def clip(target: float, default: float) -> float:
            f = lambda p: equilibrium_pbar(p, v) - target
            if f(lo) * f(hi) < 0:
                return float(brentq(f, lo, hi, xtol=1e-12))
            return default

        p_range = (clip(model.PBAR_L + 1e-4, lo),
                   clip(double_het_pbar() - 1e-4, hi))
    ps = np.linspace(p_range[0], p_range[1], n)
    branch = CurveBranch(columns=("p", "s", "pbar"), meta={"v": v})
    window = (0.0, 1.7)
    for p in ps:
        try:
            conn = return_connection(float(p), v, s_scan=window,
                                     gap_tol=gap_tol)
        except DomainError:
            conn = return_connection(float(p), v, gap_tol=gap_tol)
        branch.points.append((float(p), conn.s, conn.pbar))
        window = (max(0.0, conn.s - 0.2), min(1.7, conn.s + 0.4))
    return branch


def return_height_at(p: float, s: float,
                     gap_tol: float = 1e-8) -> float:
    """Return offset v whose right-to-left connection runs at speed s.

    The right-to-left connection at speed s fixes a unique layer parameter
    pbar; the height offset follows from p - x1*(p) - v = pbar.
    """
    conn = find_het(direction="right-to-left", s=s,
                    scan=(model.PBAR_L + 1e-6, double_het_pbar() - 1e-9),
                    gap_tol=gap_tol)
    return equilibrium_pbar(p) - conn.pbar


def singular_fast_wave(v: float, gap_tol: float = 1e-8) -> SingularHomoclinic:
    """Singular fast wave with return offset v: the intersection of the
    equilibrium-height curve with the return curve for that v."""
    if v <= 0.0:
        raise DomainError("return height offset v must be positive")

    def mismatch(p: float) -> float:
        return (upper_connection(p, gap_tol=gap_tol).s
                - return_connection(p, v, gap_tol=gap_tol).s)

    p_star, _ = double_het_point()
    lo, hi = p_star + 1e-4, P_MINUS - 1e-4

    def clip(target: float, default: float) -> float:
        """p in (p*, p_-) where the return height hits the band edge."""
        f = lambda p: equilibrium_pbar(p, v) - target
        if f(lo) * f(hi) < 0:
            return float(brentq(f, lo, hi, xtol=1e-12))
        return default

    # the return height must keep pbar inside (pbar_l, pbar*)
    p_lo = clip(model.PBAR_L + 1e-4, lo)
    p_hi = clip(double_het_pbar() - 1e-5, hi)
    p_sol = brentq(mismatch, p_lo, p_hi, xtol=1e-11)
    up = upper_connection(p_sol, gap_tol=gap_tol)
    down = return_connection(p_sol, v, gap_tol=gap_tol)
    return SingularHomoclinic(p=float(p_sol), s=0.5 * (up.s + down.s),
                              up_connection=up, down_connection=down,
                              v=v, kind="fast-wave")


def _unstable_direction(p: float, s: float, eps: float):
    """Saddle-focus q and its real unstable direction, oriented x1-up."""
    info = model.full_equilibrium(p, s, eps)
    params = ModelParams(eps=eps, s=s, p=p)
    A = model.full_jacobian(info.state, params)
    w, v = np.linalg.eig(A)
    real_pos = [i for i in range(3)
                if abs(w[i].imag) < 1e-9 * max(1.0, abs(w[i].real))
                and w[i].real > 0.0]
    if len(real_pos) != 1:
        raise DomainError(
            f"expected one real unstable eigenvalue at p={p}, s={s}: {w}")
    direction = v[:, real_pos[0]].real
    direction = direction / np.linalg.norm(direction)
    if direction[0] < 0:
        direction = -direction
    return info.state, direction


def escape_side(p: float, s: float, eps: float, offset: float = 1e-8,
                max_time: float | None = None) -> int:
    """-1 or +1: side on which the unstable manifold of q escapes.

    The manifold is launched toward increasing x1 and integrated in fast
    time until |x1| reaches the escape abscissa; on time-out the side of
    the final x1 relative to the middle branch decides.
    """
    state, direction = _unstable_direction(p, s, eps)
    params = ModelParams(eps=eps, s=s, p=p)
    if max_time is None:
        max_time = min(1e4, 100.0 / eps)
    opts = IntegratorOptions(rel_tol=1e-10, abs_tol=1e-12,
                             max_time=max_time, escape_radius=50.0)
    events = [lambda t, y: y[0] - ESCAPE_X1,
              lambda t, y: y[0] + ESCAPE_X1]
    field = lambda t, y: model.full_field(y, params, timescale="fast")
    traj = integrate(field, state + offset * direction, (0.0, max_time),
                     opts, events=events)
    if traj.reason == "event":
        return 1 if traj.events[0].index == 0 else -1
    return 1 if float(traj.final_state[0]) > _MIDDLE_X1 else -1


def _refine_flip(p, eps, s_lo, s_hi, side_lo, bracket_tol, offset):
    """Bisect one left/right flip of the escape side to the bracket width."""
    while s_hi - s_lo > bracket_tol:
        mid = 0.5 * (s_lo + s_hi)
        if mid in (s_lo, s_hi):  # float-limited bracket
            break
        if escape_side(p, mid, eps, offset=offset) == side_lo:
            s_lo = mid
        else:
            s_hi = mid
    return s_lo, s_hi


def locate_c_curve(p: float, eps: float,
                   s_scan: tuple[float, float] = (0.05, 1.55),
                   n_scan: int = 24, bracket_tol: float = 1e-12,
                   offset: float = 1e-8) -> CCurvePoint:
    """Both homoclinic speeds at (p, eps) by unstable-manifold splitting.

    Scans s over ``s_scan``, brackets each flip of the left/right escape
    classification and bisects it to ``bracket_tol``.  Flips closer than
    the bundle width count as a single C-curve point; anything other than
    exactly two distinct speeds raises with the count found.
    """
    grid = np.linspace(s_scan[0], s_scan[1], n_scan)
    sides = [escape_side(p, float(s), eps, offset=offset) for s in grid]
    flips = [(float(grid[i]), float(grid[i + 1]), sides[i])
             for i in range(n_scan - 1) if sides[i] != sides[i + 1]]
    roots: list[tuple[float, float]] = []
    for s_lo, s_hi, side_lo in flips:
        lo, hi = _refine_flip(p, eps, s_lo, s_hi, side_lo, bracket_tol,
                              offset)
        mid = 0.5 * (lo + hi)
        if roots and mid - 0.5 * sum(roots[-1]) < BUNDLE_WIDTH:
            continue  # same exponentially thin bundle
        roots.append((lo, hi))
    if len(roots) != 2:
        raise DomainError(
            f"expected 2 splitting speeds at p={p}, eps={eps}; "
            f"found {len(roots)} in {s_scan}")
    (lo1, hi1), (lo2, hi2) = roots
    return CCurvePoint(p=p, s1=0.5 * (lo1 + hi1), s2=0.5 * (lo2 + hi2),
                       eps=eps,
                       bracket_width=max(hi1 - lo1, hi2 - lo2))


def trace_c_curve(eps: float, p_grid,
                  s_scan: tuple[float, float] = (0.05, 1.55),
                  bracket_tol: float = 1e-12) -> CurveBranch:
    """Map locate_c_curve over a p-grid, warm-starting the scan window.

    Per-point failures are recorded in meta["failures"] and the trace
    continues.
    """
    branch = CurveBranch(columns=("p", "s1", "s2", "eps", "bracket_width"),
                         meta={"eps": eps, "failures": []})
    window = s_scan
    for p in p_grid:
        try:
            pt = locate_c_curve(float(p), eps, s_scan=window,
                                bracket_tol=bracket_tol)
        except DomainError as exc:
            branch.meta["failures"].append((float(p), str(exc)))
            window = s_scan
            continue
        branch.points.append((pt.p, pt.s1, pt.s2, pt.eps, pt.bracket_width))
        window = (max(0.01, pt.s1 - 0.15), min(1.7, pt.s2 + 0.15))
    return branch


def assemble_singular_diagram(n_curve: int = 25) -> SingularDiagram:
    """Compose the singular skeleton: A, B, C, segment AB, curve AC,
    the Hopf asymptotes and the eps = 0 canard abscissa."""
    from . import bifurcation, slow_reduced

    p_star, _ = double_het_point()
    s_term = s_star()
    ab = [(float(p), 0.0) for p in np.linspace(p_star, P_MINUS, n_curve)]
    curve = singular_upper_curve(n=n_curve)
    ac = ([(p_star, 0.0)]
          + [(q[0], q[1]) for q in curve.points]
          + [(P_MINUS, s_term)])
    canard_p = slow_reduced.reduced_hopf_values(0.0)[0]
    return SingularDiagram(
        A=(p_star, 0.0), B=(P_MINUS, 0.0), C=(P_MINUS, s_term),
        segment_ab=ab, curve_ac=ac,
        hopf_asymptotes=bifurcation.hopf_asymptotes(),
        canard_p=canard_p,
    )
