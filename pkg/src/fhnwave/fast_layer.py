"""Layer-problem analysis: Hamiltonian structure at s = 0, heteroclinic
shooting across the mid-section, and continuation of the connection curves
in (pbar, s) parameter space.

For s = 0 the layer problem is Hamiltonian with H = x2^2/2 + V(x1); the two
saddles are connected exactly when they sit on the same potential level,
which pins the double connection at pbar = -209/3375.  For s > 0 the field
is area expanding (divergence s/5) and single connections are located as
zeros of the section gap h(pbar, s).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import model
from .curves import CurveBranch
from .integrate import IntegratorOptions, Trajectory, integrate
from .model import DomainError, EquilibriumInfo, EquilibriumKind

#: Sentinel magnitude standing in for "no section crossing" gap values;
#: signed by escape side so bracketing root solvers keep working.
GAP_SENTINEL = 1e6

_SHOT_OPTS = IntegratorOptions(rel_tol=1e-11, abs_tol=1e-13, max_time=5000.0)


def potential(x1, pbar):
    """Potential V(x1) of the s = 0 layer problem, V' = (c0(x1) + pbar)/5."""
    x1 = np.asarray(x1, dtype=float)
    return pbar * x1 / 5.0 - x1**2 / 100.0 + 11.0 * x1**3 / 150.0 - x1**4 / 20.0


def hamiltonian(state, pbar):
    """H(x1, x2) = x2^2/2 + V(x1); conserved along s = 0 trajectories."""
    x1, x2 = state[0], state[1]
    return 0.5 * x2 * x2 + potential(x1, pbar)


@dataclass
class HamiltonianData:
    """Hamiltonian evaluators of the s = 0 layer problem at fixed pbar."""

    pbar: float

    def V(self, x1):
        return potential(x1, self.pbar)

    def H(self, state):
        return hamiltonian(state, self.pbar)

    def level(self, state) -> float:
        return float(self.H(state))


@dataclass
class HetConnection:
    """A located heteroclinic connection of the layer problem."""

    pbar: float
    s: float
    direction: str  # "left-to-right" or "right-to-left"
    section_gap: float
    endpoints: tuple[EquilibriumInfo, EquilibriumInfo]


def layer_equilibria(pbar: float, s: float = 0.0) -> list[EquilibriumInfo]:
    """Equilibria of the layer problem, sorted by x1."""
    return [model.fast_equilibrium_info(x, s) for x in model.fast_equilibria_x1(pbar)]


def saddle_eigendirections(eq: EquilibriumInfo, s: float,
                           toward: float | None = None):
    """Unit (unstable, stable) eigenvectors of A(x1) at a layer saddle.

    With ``toward`` given, both vectors are oriented so their x1-component
    points toward that abscissa (into the strip between the saddles).
    """
    if eq.kind not in (EquilibriumKind.SADDLE, EquilibriumKind.FOLD_DEGENERATE):
        raise DomainError(f"not a saddle: {eq.kind}")
    A = model.fast_jacobian(eq.x1, s)
    w, v = np.linalg.eig(A)
    w = w.real
    v = v.real
    iu, ist = int(np.argmax(w)), int(np.argmin(w))
    vu, vs = v[:, iu].copy(), v[:, ist].copy()
    if toward is not None:
        sign = 1.0 if toward >= eq.x1 else -1.0
        if vu[0] * sign < 0:
            vu = -vu
        if vs[0] * sign < 0:
            vs = -vs
    return vu / np.linalg.norm(vu), vs / np.linalg.norm(vs)


def _shoot_to_section(x0, direction_vec, pbar, s, sigma, backward,
                      offset, opts, x_lo, x_hi):
    """Integrate from a saddle offset until the section x1 = sigma.

    Returns (x2_at_crossing, trajectory) or (None, trajectory) when the
    orbit leaves [x_lo, x_hi] or times out before crossing.
    """
    y0 = np.array([x0, 0.0]) + offset * np.asarray(direction_vec)
    field = lambda t, y: model.fast_field(y, pbar, s)
    events = [
        lambda t, y: y[0] - sigma,
        lambda t, y: y[0] - x_lo,
        lambda t, y: y[0] - x_hi,
    ]
    span = (0.0, -opts.max_time) if backward else (0.0, opts.max_time)
    traj = integrate(field, y0, span, opts, events=events)
    if traj.reason == "event" and traj.events[0].index == 0:
        return float(traj.events[0].state[1]), traj
    return None, traj


def _failure_gap(traj: Trajectory, x_lo, x_hi) -> float:
    """Signed sentinel for a shot that never reached the section."""
    x1 = float(traj.final_state[0])
    mid = 0.5 * (x_lo + x_hi)
    return -GAP_SENTINEL if x1 < mid else GAP_SENTINEL


def shoot_heteroclinic(pbar: float, s: float, offset: float = 1e-8,
                       direction: str = "left-to-right",
                       opts: IntegratorOptions | None = None,
                       degenerate_left: bool = False) -> float:
    """Section gap h(pbar, s) between the two saddle separatrices.

    Integrates forward along the unstable direction of the departure saddle
    and backward along the stable direction of the arrival saddle; returns
    the difference of the x2-coordinates of the first crossings of the
    section x1 = (x_l + x_r)/2.  Escapes before crossing are mapped to
    signed sentinels (+-GAP_SENTINEL) so callers can still bracket.

    ``degenerate_left`` replaces the left saddle with the fold point
    x_{1,-} (saddle-node at pbar = pbar_r); the shot then leaves along the
    strong unstable direction (1, s/5).
    """
    if opts is None:
        opts = _SHOT_OPTS
    roots = model.fast_equilibria_x1(pbar)
    if degenerate_left:
        x_l = model.X_MINUS
        x_r = max(roots)
        if x_r <= x_l + 0.1:
            raise DomainError("no right saddle for degenerate-left shot")
        vu_l = np.array([1.0, s / 5.0])
        vu_l = vu_l / np.linalg.norm(vu_l)
        eq_r = model.fast_equilibrium_info(x_r, s)
        _, vs_r = saddle_eigendirections(eq_r, s, toward=x_l)
    else:
        if len(roots) < 3:
            raise DomainError(
                f"need 3 layer equilibria, found {len(roots)} at pbar={pbar}")
        x_l, x_m, x_r = roots
        eq_l = model.fast_equilibrium_info(x_l, s)
        eq_r = model.fast_equilibrium_info(x_r, s)
        vu_l, vs_l = saddle_eigendirections(eq_l, s, toward=x_r)
        vu_r, vs_r = saddle_eigendirections(eq_r, s, toward=x_l)

    sigma = 0.5 * (x_l + x_r)
    x_lo, x_hi = x_l - 0.7, x_r + 0.7

    if direction == "left-to-right":
        fwd_x2, fwd = _shoot_to_section(x_l, vu_l, pbar, s, sigma, False,
                                        offset, opts, x_lo, x_hi)
        bwd_x2, bwd = _shoot_to_section(x_r, vs_r, pbar, s, sigma, True,
                                        offset, opts, x_lo, x_hi)
    elif direction == "right-to-left":
        if degenerate_left:
            raise DomainError("degenerate-left shot is left-to-right only")
        fwd_x2, fwd = _shoot_to_section(x_r, vu_r, pbar, s, sigma, False,
                                        offset, opts, x_lo, x_hi)
        bwd_x2, bwd = _shoot_to_section(x_l, vs_l, pbar, s, sigma, True,
                                        offset, opts, x_lo, x_hi)
    else:
        raise ValueError(f"unknown direction {direction!r}")

    if fwd_x2 is None:
        return _failure_gap(fwd, x_lo, x_hi)
    if bwd_x2 is None:
        return -_failure_gap(bwd, x_lo, x_hi)
    return fwd_x2 - bwd_x2


def find_het(direction: str = "left-to-right", pbar: float | None = None,
             s: float | None = None, scan: tuple[float, float] = (0.0, 2.0),
             gap_tol: float = 1e-10, offset: float = 1e-8,
             degenerate_left: bool = False) -> HetConnection:
    """Solve the section gap to zero in the free parameter.

    Exactly one of ``pbar``/``s`` must be given; the other is solved for by
    a bracketed hybrid (brentq) on ``scan``, which must straddle a sign
    change of the gap.
    """
    if (pbar is None) == (s is None):
        raise ValueError("fix exactly one of pbar, s")

    if s is None:
        gap = lambda sv: shoot_heteroclinic(pbar, sv, offset, direction,
                                            degenerate_left=degenerate_left)
    else:
        gap = lambda pv: shoot_heteroclinic(pv, s, offset, direction,
                                            degenerate_left=degenerate_left)

    lo, hi = scan
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0.0:
        root = lo
    elif g_hi == 0.0:
        root = hi
    elif g_lo * g_hi > 0.0:
        raise DomainError(
            f"no sign change of gap on {scan}: {g_lo:.3g}, {g_hi:.3g}")
    else:
        root = brentq(gap, lo, hi, xtol=1e-14, rtol=1e-15)
    residual = gap(root)
    if abs(residual) > gap_tol:
        raise DomainError(f"gap {residual:.3g} above tolerance at root")

    pb, sv = (pbar, root) if s is None else (root, s)
    roots = model.fast_equilibria_x1(pb)
    if degenerate_left:
        endpoints = (model.fast_equilibrium_info(model.X_MINUS, sv),
                     model.fast_equilibrium_info(max(roots), sv))
    else:
        endpoints = (model.fast_equilibrium_info(roots[0], sv),
                     model.fast_equilibrium_info(roots[-1], sv))
    return HetConnection(pbar=pb, s=sv, direction=direction,
                         section_gap=residual, endpoints=endpoints)


def double_het_pbar() -> float:
    """pbar of the s = 0 double heteroclinic: root of V(x_l) - V(x_r).

    Equals -209/3375 exactly (the saddles share a level when the cubic is
    balanced about its inflection point 11/30).
    """
    def level_mismatch(pbar):
        roots = model.fast_equilibria_x1(pbar)
        if len(roots) < 3:
            raise DomainError(f"lost saddles at pbar={pbar}")
        return float(potential(roots[0], pbar) - potential(roots[-1], pbar))

    return brentq(level_mismatch, model.PBAR_L + 1e-4, model.PBAR_R - 1e-4,
                  xtol=1e-14, rtol=1e-15)


def continue_het_curve(seed: HetConnection, step: float = 0.03,
                       extent: float = 1.5, offset: float = 1e-8) -> CurveBranch:
    """Natural-parameter continuation of a connection curve in s.

    Steps s upward from the seed, re-solving pbar in a window around the
    previous solution; the window and the step are halved when the solve
    fails (near the vertical asymptotes the curve steepens).  Returns
    ordered (pbar, s, gap) points; truncation is recorded in ``meta``.
    """
    branch = CurveBranch(columns=("pbar", "s", "gap"),
                         meta={"direction": seed.direction})
    branch.points.append((seed.pbar, seed.s, seed.section_gap))

    pb, sv = seed.pbar, seed.s
    ds = step
    window = 0.01
    reason = "extent-reached"
    while sv < extent - 1e-12:
        s_next = min(sv + ds, extent)
        solved = None
        w = window
        for _ in range(8):
            # keep the scan inside the three-equilibria band
            lo = max(pb - w, model.PBAR_L + 1e-13)
            hi = min(pb + w, model.PBAR_R - 1e-13)
            try:
                conn = find_het(seed.direction, s=s_next, scan=(lo, hi),
                                offset=offset)
                solved = conn
                break
            except DomainError:
                w *= 2.0
                if w > 0.2:
                    break
        if solved is None:
            ds *= 0.5
            if ds < 1e-4:
                reason = "continuation-stall"
                break
            continue
        pb, sv = solved.pbar, s_next
        branch.points.append((pb, sv, solved.section_gap))
        window = max(4.0 * abs(branch.points[-1][0] - branch.points[-2][0]),
                     1e-6)
        ds = min(step, ds * 1.5)
    branch.meta["termination"] = reason
    return branch


def het_v_curve(s_max: float = 1.45, step: float = 0.03,
                offset: float = 1e-8) -> tuple[CurveBranch, CurveBranch]:
    """Both branches of the V-shaped connection curve from its s = 0 vertex.

    Left-to-right connections run from the vertex toward pbar_r; the
    right-to-left branch mirrors toward pbar_l.
    """
    pbar_star = double_het_pbar()
    branches = []
    for direction in ("left-to-right", "right-to-left"):
        gap0 = shoot_heteroclinic(pbar_star, 0.0, offset, direction)
        seed = HetConnection(
            pbar=pbar_star, s=0.0, direction=direction, section_gap=gap0,
            endpoints=tuple(
                model.fast_equilibrium_info(x, 0.0)
                for x in (model.fast_equilibria_x1(pbar_star)[0],
                          model.fast_equilibria_x1(pbar_star)[-1])),
        )
        branches.append(continue_het_curve(seed, step=step, extent=s_max,
                                           offset=offset))
    return branches[0], branches[1]
