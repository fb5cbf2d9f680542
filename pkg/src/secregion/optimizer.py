"""Weighted secrecy-rate maximization, grid oracle, and boundary tracing.

The central problem: given an aligned channel and weights (lambda1,
lambda2) with a common-rate floor r0_target, maximize

    lambda1 * f1(B1) + lambda2 * f2(B0, B1)

over B0 >= 0, B1 >= 0, B0 + B1 <= S, subject to f0(B0) >= r0_target.

The objective is a difference of log-dets and generally nonconcave, so
:func:`maximize_weighted` runs projected gradient ascent from several
seeded random starts plus a few structured boundary starts, handles the
common-rate floor with an escalating quadratic penalty, and repairs any
residual floor violation exactly by moving B0 toward S along a line.

:func:`grid_oracle` is the independent ground truth at t <= 2: an
exhaustive scan over parameterized PSD grids using closed-form 2x2
determinants only (it shares no numerics with the solver path), plus one
local refinement pass at 5x resolution around the incumbent.

:func:`trace_surface` and :func:`slice_at_r0` sweep the (r0_target,
weight-angle) grid to trace the region boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import TOL_FEAS, AlignedChannel, CovSplit, RateTriple
from .errors import InfeasibleTarget, SecregionError, UnsupportedDim
from .matcore import SymMatrix, _jacobi_eig, _psd_clip

# Eigenvalue threshold below which a constraint direction counts as active.
ACTIVE_TOL = 1e-7
# Accepted shortfall on the common-rate floor in reported results.
R0_SLACK = 1e-6
# How many leading restart candidates get the high-accuracy polish.
_POLISH_TOP = 3


@dataclass(frozen=True)
class Weights:
    """Objective weights and the common-rate floor (nats)."""

    lambda1: float
    lambda2: float
    r0_target: float = 0.0

    def __post_init__(self):
        for name, v in (("lambda1", self.lambda1), ("lambda2", self.lambda2)):
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.lambda1 + self.lambda2 <= 0.0:
            raise ValueError("lambda1 + lambda2 must be positive")
        if not math.isfinite(self.r0_target) or self.r0_target < 0.0:
            raise ValueError(f"r0_target must be finite and >= 0, got {self.r0_target}")


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for maximize_weighted; the seed is explicit, never ambient.

    arbiter_level controls how one start is seeded from the grid scan at
    t <= 2, where the scan is the arbiter of optimality: 0 skips it,
    1 seeds from the coarse pass, 2 (default) from the fully refined scan.
    """

    seed: int
    restarts: int = 16
    max_iters: int = 2000
    step_init: float = 0.1
    step_shrink: float = 0.5
    penalty_weight: float = 100.0
    penalty_rounds: int = 6
    proj_iters: int = 50
    tol_obj: float = 1e-9
    arbiter_level: int = 2
    extra_starts: tuple = ()

    def __post_init__(self):
        if self.seed < 0 or self.seed > 2**64 - 1:
            raise ValueError("seed must fit in 64 unsigned bits")
        for name in ("restarts", "max_iters", "step_init", "step_shrink",
                     "penalty_weight", "penalty_rounds", "proj_iters", "tol_obj"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.arbiter_level not in (0, 1, 2):
            raise ValueError("arbiter_level must be 0, 1, or 2")


@dataclass(frozen=True)
class GridStats:
    """Bookkeeping from a grid_oracle run."""

    points_scanned: int
    feasible_count: int
    refinement_window: tuple


@dataclass(frozen=True)
class SolverResult:
    split: CovSplit
    value: float
    rates: RateTriple
    converged: bool
    iterations: int
    active_constraints: frozenset
    grid: GridStats | None = None


@dataclass(frozen=True)
class RegionSample:
    """One traced boundary point with the weights and split producing it."""

    rates: RateTriple
    weights: Weights
    split: CovSplit


def r0_max(ch: AlignedChannel) -> float:
    """Largest supportable common rate: all power to the common layer."""
    from . import matcore

    v1 = matcore.logdet(ch.s + ch.n1) - matcore.logdet(ch.n1)
    v2 = matcore.logdet(ch.s + ch.n2) - matcore.logdet(ch.n2)
    return 0.5 * min(v1, v2)


# ---------------------------------------------------------------------------
# Solver internals: array-level evaluation of the penalized objective.
# ---------------------------------------------------------------------------


def _logdet_arr(arr):
    w, _ = _jacobi_eig(arr)
    if w[0] <= 0.0:
        return None
    return float(np.sum(np.log(w)))


class _Eval:
    """Objective pieces at one point, with eigensystems cached for grads."""

    __slots__ = ("phi", "obj", "f0_raw", "f1", "f2", "_eigs",
                 "_lam1", "_lam2", "_mu", "_viol", "_branch")

    def grad(self):
        inv = [None] * 4
        for i in range(4):
            w, v = self._eigs[i]
            inv[i] = (v / w) @ v.T
        gb1 = (self._lam1 + self._lam2) * 0.5 * (inv[0] - inv[1])
        gb0 = self._lam2 * 0.5 * (inv[2] - inv[3])
        if self._viol > 0.0:
            # one-sided quadratic penalty on the active floor branch
            gb0 = gb0 + (2.0 * self._mu * self._viol * 0.5) * inv[2 + self._branch]
        gb0 = 0.5 * (gb0 + gb0.T)
        gb1 = 0.5 * (gb1 + gb1.T)
        return gb0, gb1


class _Instance:
    """Channel constants precomputed for the solver's inner loop."""

    def __init__(self, ch: AlignedChannel):
        self.t = ch.t
        self.n1 = np.array(ch.n1.array)
        self.n2 = np.array(ch.n2.array)
        self.s = np.array(ch.s.array)
        self.ld_n1 = _logdet_arr(self.n1)
        self.ld_n2 = _logdet_arr(self.n2)
        self.ld_sn1 = _logdet_arr(self.s + self.n1)
        self.ld_sn2 = _logdet_arr(self.s + self.n2)
        self.r0max = 0.5 * min(self.ld_sn1 - self.ld_n1, self.ld_sn2 - self.ld_n2)
        ws, vs = _jacobi_eig(self.s)
        self.s_isqrt = (vs / np.sqrt(ws)) @ vs.T

    def f0_raw(self, b0):
        rem = self.s - b0
        l1 = _logdet_arr(rem + self.n1)
        l2 = _logdet_arr(rem + self.n2)
        if l1 is None or l2 is None:
            return -math.inf
        return 0.5 * min(self.ld_sn1 - l1, self.ld_sn2 - l2)

    def evaluate(self, b0, b1, lam1, lam2, mu, r0t):
        """Penalized objective at (b0, b1); None if outside the log domain."""
        rem = self.s - b0
        mats = (b1 + self.n1, b1 + self.n2, rem + self.n1, rem + self.n2)
        eigs = []
        lds = []
        for m in mats:
            w, v = _jacobi_eig(m)
            if w[0] <= 0.0:
                return None
            eigs.append((w, v))
            lds.append(float(np.sum(np.log(w))))
        ev = _Eval()
        ev.f1 = 0.5 * (lds[0] - self.ld_n1 - lds[1] + self.ld_n2)
        ev.f2 = 0.5 * (lds[3] - lds[1] - lds[2] + lds[0])
        g1 = 0.5 * (self.ld_sn1 - lds[2])
        g2 = 0.5 * (self.ld_sn2 - lds[3])
        ev.f0_raw = min(g1, g2)
        ev.obj = lam1 * ev.f1 + lam2 * ev.f2
        viol = r0t - ev.f0_raw
        if viol > 0.0:
            ev.phi = ev.obj - mu * viol * viol
            ev._viol = viol
            ev._branch = 0 if g1 <= g2 else 1
        else:
            ev.phi = ev.obj
            ev._viol = 0.0
            ev._branch = 0
        ev._eigs = eigs
        ev._lam1 = lam1
        ev._lam2 = lam2
        ev._mu = mu
        return ev


def _project_1d(b0, b1, s, tol):
    x = max(float(b0[0, 0]), 0.0)
    y = max(float(b1[0, 0]), 0.0)
    cap = float(s[0, 0])
    exc = x + y - cap
    if exc > tol:
        if x - 0.5 * exc < 0.0:
            x, y = 0.0, min(y, cap)
        elif y - 0.5 * exc < 0.0:
            x, y = min(x, cap), 0.0
        else:
            x -= 0.5 * exc
            y -= 0.5 * exc
    return np.array([[x]]), np.array([[y]])


def _project(b0, b1, s, proj_iters, tol):
    """Alternating projection onto {B0 >= 0, B1 >= 0, B0 + B1 <= S}.

    Each pass clips both blocks to the PSD cone, then removes half of the
    PSD part of the excess B0 + B1 - S from each block.  Scalars get the
    exact closed form.
    """
    if s.shape[0] == 1:
        return _project_1d(b0, b1, s, tol)
    for _ in range(proj_iters):
        b0 = _psd_clip(b0)
        b1 = _psd_clip(b1)
        w, v = _jacobi_eig(b0 + b1 - s)
        if w[-1] <= tol:
            return b0, b1
        d = (v * np.maximum(w, 0.0)) @ v.T
        d = 0.25 * (d + d.T)
        b0 = b0 - d
        b1 = b1 - d
    return _psd_clip(b0), _psd_clip(b1)


def _random_split(rng, inst):
    t = inst.t
    g = rng.normal(size=(t, t))
    b0 = _psd_clip(0.5 * (g + g.T))
    g = rng.normal(size=(t, t))
    b1 = _psd_clip(0.5 * (g + g.T))
    # skew the power balance so starts cover lopsided allocations too
    mix = rng.uniform(0.0, 1.0)
    b0 = (2.0 * mix) * b0
    b1 = (2.0 * (1.0 - mix)) * b1
    tot = inst.s_isqrt @ (b0 + b1) @ inst.s_isqrt
    w, _ = _jacobi_eig(0.5 * (tot + tot.T))
    top = float(w[-1])
    u = rng.uniform(0.25, 1.0)
    if top <= 1e-12:
        return b0, b1
    c = 0.95 / top * u
    return c * b0, c * b1


def _min_floor_share(inst, r0t):
    """Smallest sigma in [0, 1] with f0(sigma * S) >= r0t (f0 is monotone)."""
    if r0t <= 0.0:
        return 0.0
    if inst.f0_raw(np.zeros_like(inst.s)) >= r0t:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if inst.f0_raw(mid * inst.s) >= r0t:
            hi = mid
        else:
            lo = mid
    return hi


def _structured_starts(inst, r0t):
    sigma = _min_floor_share(inst, r0t)
    b0 = sigma * inst.s
    rem = (1.0 - sigma) * inst.s
    zero = np.zeros_like(inst.s)
    return [(b0, rem), (b0, 0.5 * rem), (b0, zero)]


def _repair_floor(inst, b0, b1, r0t):
    """Pull (b0, b1) onto the feasible side of the common-rate floor.

    Moves B0 toward S along a straight line while shrinking B1 by the same
    factor, which preserves PSD-ness and the power cap; f0 is monotone
    along the line, so bisection finds the smallest move that suffices.
    """
    if inst.f0_raw(b0) >= r0t:
        return b0, b1
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if inst.f0_raw((1.0 - mid) * b0 + mid * inst.s) >= r0t:
            hi = mid
        else:
            lo = mid
    return (1.0 - hi) * b0 + hi * inst.s, (1.0 - hi) * b1


# During ascent, trial points are projected only this accurately; results
# get one tight projection at TOL_FEAS before they are reported.
_TRIAL_FEAS = 1e-6


def _ascend(inst, b0, b1, lam1, lam2, r0t, cfg, mu, budget, step0, tol):
    """Projected gradient ascent with backtracking; returns the new point."""
    ev = inst.evaluate(b0, b1, lam1, lam2, mu, r0t)
    if ev is None:
        b0, b1 = _project(b0, b1, inst.s, cfg.proj_iters, TOL_FEAS)
        ev = inst.evaluate(b0, b1, lam1, lam2, mu, r0t)
        if ev is None:
            return b0, b1, 0, False
    gb0, gb1 = ev.grad()
    step = step0
    used = 0
    converged = False
    while used < budget:
        used += 1
        tb0, tb1 = _project(b0 + step * gb0, b1 + step * gb1,
                            inst.s, cfg.proj_iters, _TRIAL_FEAS)
        tev = inst.evaluate(tb0, tb1, lam1, lam2, mu, r0t)
        if tev is not None and tev.phi > ev.phi:
            delta = tev.phi - ev.phi
            b0, b1, ev = tb0, tb1, tev
            gb0, gb1 = ev.grad()
            step = min(step * 2.0, 10.0)
            if delta <= tol:
                converged = True
                break
        else:
            step *= cfg.step_shrink
            if step < 1e-13:
                converged = True
                break
    return b0, b1, used, converged


def _ascend_feasible(inst, b0, b1, lam1, lam2, r0t, cfg, budget, step0, tol):
    """Hill-climb on the feasible set: every trial is projected and floor-
    repaired before comparison, so the incumbent value never decreases."""
    ev = inst.evaluate(b0, b1, lam1, lam2, 0.0, r0t)
    if ev is None:
        return b0, b1, 0, False
    gb0, gb1 = ev.grad()
    step = step0
    used = 0
    converged = False
    while used < budget:
        used += 1
        tb0, tb1 = _project(b0 + step * gb0, b1 + step * gb1,
                            inst.s, cfg.proj_iters, TOL_FEAS)
        tb0, tb1 = _repair_floor(inst, tb0, tb1, r0t)
        tev = inst.evaluate(tb0, tb1, lam1, lam2, 0.0, r0t)
        if tev is not None and tev.obj > ev.obj:
            delta = tev.obj - ev.obj
            b0, b1, ev = tb0, tb1, tev
            gb0, gb1 = ev.grad()
            step = min(step * 2.0, 10.0)
            if delta <= tol:
                converged = True
                break
        else:
            step *= cfg.step_shrink
            if step < 1e-13:
                converged = True
                break
    return b0, b1, used, converged


def _sym_basis(t):
    """Orthonormal basis of symmetric t x t matrices (trace inner product)."""
    mats = []
    for i in range(t):
        for j in range(i, t):
            e = np.zeros((t, t))
            if i == j:
                e[i, i] = 1.0
            else:
                e[i, j] = e[j, i] = 1.0 / math.sqrt(2.0)
            mats.append(e)
    return mats


def _active_rows(mat, basis, side, m):
    """Tangent rows of a PSD face: the perturbation's restriction to the
    active eigenspace must vanish (v_i^T X v_j = 0 for active pairs); the
    active directions themselves are free to rotate."""
    rows = []
    w, v = _jacobi_eig(mat)
    active = [v[:, k] for k in range(mat.shape[0]) if w[k] <= ACTIVE_TOL]
    for i in range(len(active)):
        for j in range(i, len(active)):
            row = np.zeros(2 * m)
            for idx, e in enumerate(basis):
                val = float(active[i] @ e @ active[j])
                if side in ("x", "both"):
                    row[idx] += val
                if side in ("y", "both"):
                    row[m + idx] += val
            rows.append(row)
    return rows


def _newton_polish(inst, b0, b1, lam1, lam2, r0t, cfg, rounds=8):
    """Second-order refinement on the manifold of active constraints.

    The log-det objective has closed-form first and second derivatives;
    eigendirections pinned at the PSD faces (and a tight floor) are frozen
    to linear equalities, and a regularized Newton step is taken on the
    remaining coordinates.  Only feasibility-repaired improving steps are
    accepted, so the incumbent value never decreases.
    """
    t = inst.t
    basis = _sym_basis(t)
    m = len(basis)
    lam = lam1 + lam2
    ev = inst.evaluate(b0, b1, lam1, lam2, 0.0, r0t)
    if ev is None:
        return b0, b1
    for _ in range(rounds):
        rem = inst.s - b0
        try:
            a1 = _inv_arr(rem + inst.n1)
            a2 = _inv_arr(rem + inst.n2)
            c1 = _inv_arr(b1 + inst.n1)
            c2 = _inv_arr(b1 + inst.n2)
        except ValueError:
            break
        gx = 0.5 * lam2 * (a1 - a2)
        gy = 0.5 * lam * (c1 - c2)
        grad = np.array([float(np.sum(gx * e)) for e in basis]
                        + [float(np.sum(gy * e)) for e in basis])

        rows = _active_rows(b0, basis, "x", m)
        rows += _active_rows(b1, basis, "y", m)
        rows += _active_rows(inst.s - b0 - b1, basis, "both", m)
        l1 = _logdet_arr(rem + inst.n1)
        l2 = _logdet_arr(rem + inst.n2)
        for branch, ak in ((0.5 * (inst.ld_sn1 - l1), a1),
                           (0.5 * (inst.ld_sn2 - l2), a2)):
            if branch - r0t <= R0_SLACK:
                row = np.zeros(2 * m)
                for idx, e in enumerate(basis):
                    row[idx] = 0.5 * float(np.sum(ak * e))
                rows.append(row)
        if rows:
            cmat = np.array(rows)
            _, sv, vt = np.linalg.svd(cmat)
            rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0])))
            z = vt[rank:].T
        else:
            z = np.eye(2 * m)
        if z.shape[1] == 0:
            break
        gr = z.T @ grad
        if float(np.max(np.abs(gr))) <= 1e-13:
            break

        hx = np.zeros((m, m))
        hy = np.zeros((m, m))
        t1 = [a1 @ e @ a1 for e in basis]
        t2 = [a2 @ e @ a2 for e in basis]
        u1 = [c1 @ e @ c1 for e in basis]
        u2 = [c2 @ e @ c2 for e in basis]
        for i in range(m):
            for j in range(i, m):
                hx[i, j] = hx[j, i] = 0.5 * lam2 * (
                    float(np.sum(t1[i] * basis[j]))
                    - float(np.sum(t2[i] * basis[j])))
                hy[i, j] = hy[j, i] = 0.5 * lam * (
                    float(np.sum(u2[i] * basis[j]))
                    - float(np.sum(u1[i] * basis[j])))
        h = np.zeros((2 * m, 2 * m))
        h[:m, :m] = hx
        h[m:, m:] = hy
        hr = z.T @ h @ z
        hw, _ = _jacobi_eig(0.5 * (hr + hr.T))
        shift = max(0.0, float(hw[-1])) + 1e-9 * (1.0 + float(np.max(np.abs(hw))))
        hreg = hr - shift * np.eye(hr.shape[0])
        delta = np.linalg.solve(hreg, -gr)
        norm = float(np.max(np.abs(delta)))
        scale = 1.0 + float(np.max(np.abs(inst.s)))
        if norm > scale:
            # flat reduced curvature can blow the step up; cap it and let
            # the backtracking find the productive length
            delta *= scale / norm

        accepted = False
        frac = 1.0
        for _ in range(40):
            full = z @ (frac * delta)
            x = sum(full[k] * basis[k] for k in range(m))
            y = sum(full[m + k] * basis[k] for k in range(m))
            nb0, nb1 = _project(b0 + x, b1 + y, inst.s, cfg.proj_iters,
                                TOL_FEAS)
            nb0, nb1 = _repair_floor(inst, nb0, nb1, r0t)
            nev = inst.evaluate(nb0, nb1, lam1, lam2, 0.0, r0t)
            if nev is not None and nev.obj > ev.obj:
                b0, b1, ev = nb0, nb1, nev
                accepted = True
                break
            frac *= 0.5
        if not accepted:
            break
    return b0, b1


def _inv_arr(arr):
    w, v = _jacobi_eig(arr)
    if w[0] <= 0.0:
        raise ValueError("not positive definite")
    m = (v / w) @ v.T
    return 0.5 * (m + m.T)


def _certificate_polish(ch, inst, b0, b1, w, cfg):
    """Pattern search on the multiplier-recovery residual.

    Value-flat neighborhoods around degenerate faces leave gradient and
    Newton steps without a usable ascent signal, yet the stationarity
    residual still pinpoints the exact optimum.  This walks the primal
    coordinates directly on that residual, accepting only feasible moves
    that keep the objective within 1e-9 of the incumbent.  Runs only when
    the candidate's residual is worth improving (caller gates it).
    """
    from . import certify as _ct

    lam1, lam2, r0t = w.lambda1, w.lambda2, min(w.r0_target, inst.r0max)

    def residual(pb0, pb1):
        split = CovSplit(b0=SymMatrix(pb0), b1=SymMatrix(pb1))
        best = math.inf
        for tol in (1e-7, 1e-6, 1e-5, 1e-4):
            try:
                cert = _ct._recover_at(ch, split, w, tol)
            except Exception:
                continue
            res = _ct.verify_kkt(ch, split, cert)
            best = min(best, max(res["stat_b0"], res["stat_b1"]))
        return best

    base_ev = inst.evaluate(b0, b1, lam1, lam2, 0.0, r0t)
    if base_ev is None:
        return b0, b1
    floor_obj = base_ev.obj - 1e-9
    best_res = residual(b0, b1)
    if not math.isfinite(best_res):
        return b0, b1
    basis = _sym_basis(inst.t)
    step = 1e-4 * (1.0 + float(np.max(np.abs(inst.s))))
    while step > 1e-10:
        improved = False
        for target in (0, 1):
            for e in basis:
                for sign in (1.0, -1.0):
                    tb0 = b0 + sign * step * e if target == 0 else b0
                    tb1 = b1 + sign * step * e if target == 1 else b1
                    tb0, tb1 = _project(tb0, tb1, inst.s, cfg.proj_iters,
                                        TOL_FEAS)
                    tb0, tb1 = _repair_floor(inst, tb0, tb1, r0t)
                    tev = inst.evaluate(tb0, tb1, lam1, lam2, 0.0, r0t)
                    if tev is None or tev.obj < floor_obj:
                        continue
                    tres = residual(tb0, tb1)
                    if tres < best_res:
                        b0, b1, best_res = tb0, tb1, tres
                        improved = True
        if best_res <= 1e-8:
            break
        if not improved:
            step *= 0.5
    return b0, b1


def _lex_key(b0, b1):
    return tuple(b0.ravel()) + tuple(b1.ravel())


def maximize_weighted(ch: AlignedChannel, w: Weights, cfg: SolverConfig) -> SolverResult:
    """Best feasible allocation for the weighted confidential-rate objective.

    Multi-start projected gradient ascent with an escalating quadratic
    penalty on the common-rate floor; the floor is then enforced exactly
    and the incumbent polished at the final penalty weight.  Deterministic
    for fixed (channel, weights, config including seed).
    """
    inst = _Instance(ch)
    if w.r0_target > inst.r0max + TOL_FEAS:
        raise InfeasibleTarget(
            f"r0_target {w.r0_target:.9g} exceeds r0_max {inst.r0max:.9g}"
        )
    r0t = min(w.r0_target, inst.r0max)
    lam1, lam2 = w.lambda1, w.lambda2

    starts = _structured_starts(inst, r0t)
    for extra in cfg.extra_starts:
        starts.append((np.array(extra.b0.array), np.array(extra.b1.array)))
    if ch.t <= 2 and cfg.arbiter_level > 0:
        # the grid scan is the arbiter at these sizes; seed one start from
        # it so multi-restart never loses to a grid point
        if cfg.arbiter_level == 1:
            starts.append(_arbiter_seed(ch, w, r0t))
        else:
            arb = grid_oracle(ch, w, 9)
            starts.append((np.array(arb.split.b0.array),
                           np.array(arb.split.b1.array)))
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.restarts):
        starts.append(_random_split(rng, inst))

    round_budget = max(1, cfg.max_iters // cfg.penalty_rounds)
    mu_final = cfg.penalty_weight * 2.0 ** (cfg.penalty_rounds - 1)

    candidates = []
    for b0, b1 in starts:
        b0, b1 = _project(b0, b1, inst.s, cfg.proj_iters, TOL_FEAS)
        rb0, rb1 = _repair_floor(inst, b0, b1, r0t)
        rev = inst.evaluate(rb0, rb1, lam1, lam2, mu_final, r0t)
        if rev is not None:
            # the repaired start itself competes, so a strong seed cannot
            # be washed out by the penalty rounds
            candidates.append((rev.obj, _lex_key(rb0, rb1), rb0, rb1, 0))
        iters = 0
        for rnd in range(cfg.penalty_rounds):
            mu = cfg.penalty_weight * 2.0 ** rnd
            # early rounds only rough in the basin; the final round and the
            # polish below run at full accuracy
            tol = cfg.tol_obj if rnd == cfg.penalty_rounds - 1 \
                else max(cfg.tol_obj, 1e-7)
            b0, b1, used, _ = _ascend(inst, b0, b1, lam1, lam2, r0t, cfg,
                                      mu, round_budget, cfg.step_init, tol)
            iters += used
        b0, b1 = _project(b0, b1, inst.s, cfg.proj_iters, TOL_FEAS)
        b0, b1 = _repair_floor(inst, b0, b1, r0t)
        ev = inst.evaluate(b0, b1, lam1, lam2, mu_final, r0t)
        if ev is None:
            continue
        candidates.append((ev.obj, _lex_key(b0, b1), b0, b1, iters))
    if not candidates:
        raise SecregionError("no start point produced a valid evaluation")
    candidates.sort(key=lambda c: (-c[0], c[1]))

    # Polish the leading candidates at the final penalty weight, then
    # re-enforce the floor exactly.
    best = None
    for obj, key, entry_b0, entry_b1, iters in candidates[:_POLISH_TOP]:
        b0, b1, used, converged = _ascend(inst, entry_b0, entry_b1, lam1, lam2,
                                          r0t, cfg, mu_final, cfg.max_iters,
                                          1e-3, min(cfg.tol_obj, 1e-12))
        iters += used
        b0, b1 = _project(b0, b1, inst.s, cfg.proj_iters, TOL_FEAS)
        b0, b1 = _repair_floor(inst, b0, b1, r0t)
        b0, b1, used, converged = _ascend_feasible(
            inst, b0, b1, lam1, lam2, r0t, cfg, cfg.max_iters, 1e-4,
            min(cfg.tol_obj, 1e-13))
        iters += used
        b0, b1 = _newton_polish(inst, b0, b1, lam1, lam2, r0t, cfg)
        ev = inst.evaluate(b0, b1, lam1, lam2, mu_final, r0t)
        if ev is not None and ev.obj < obj:
            # the penalty phase may trade objective for floor slack that
            # the repair cannot win back; never return less than the entry
            b0, b1 = entry_b0, entry_b1
            ev = inst.evaluate(b0, b1, lam1, lam2, mu_final, r0t)
        if ev is None:
            continue
        cand = (ev.obj, _lex_key(b0, b1), b0, b1, ev, iters, converged)
        if best is None or cand[0] > best[0] or (
            cand[0] == best[0] and cand[1] < best[1]
        ):
            best = cand
    if best is None:
        obj, key, b0, b1, iters = candidates[0]
        ev = inst.evaluate(b0, b1, lam1, lam2, mu_final, r0t)
        best = (obj, key, b0, b1, ev, iters, False)
    _, _, b0, b1, ev, iters, converged = best

    if ch.t <= 3:
        from . import certify as _ct

        split = CovSplit(b0=SymMatrix(b0), b1=SymMatrix(b1))
        try:
            cert = _ct._recover_at(ch, split, w, 1e-5)
            res = _ct.verify_kkt(ch, split, cert)
            stat = max(res["stat_b0"], res["stat_b1"])
        except Exception:
            stat = math.inf
        if stat > 1e-6:
            # flat or degenerate-face optima stall the ascent with a poor
            # stationarity residual; walk the residual down directly
            b0, b1 = _certificate_polish(ch, inst, b0, b1, w, cfg)
            ev = inst.evaluate(b0, b1, lam1, lam2, mu_final, r0t)

    f0v = max(0.0, ev.f0_raw)
    rates = RateTriple(r0=f0v, r1=max(0.0, ev.f1), r2=max(0.0, ev.f2))
    split = CovSplit(b0=SymMatrix(b0), b1=SymMatrix(b1))
    return SolverResult(
        split=split,
        value=ev.obj,
        rates=rates,
        converged=converged,
        iterations=iters,
        active_constraints=_active_set(inst.s, b0, b1, ev.f0_raw, r0t),
    )


def _active_set(s, b0, b1, f0_raw, r0t):
    names = []
    w, _ = _jacobi_eig(b0)
    if w[0] <= ACTIVE_TOL:
        names.append("B0_psd")
    w, _ = _jacobi_eig(b1)
    if w[0] <= ACTIVE_TOL:
        names.append("B1_psd")
    w, _ = _jacobi_eig(s - b0 - b1)
    if w[0] <= ACTIVE_TOL:
        names.append("sum_cap")
    if f0_raw - r0t <= R0_SLACK:
        names.append("r0_floor")
    return frozenset(names)


# ---------------------------------------------------------------------------
# Grid oracle: exhaustive scan with closed-form 2x2 determinants.  Shares no
# numerics with the solver path above.
# ---------------------------------------------------------------------------


def _det2(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def _arbiter_seed(ch, w, r0t):
    """Coarse grid argmax used as one solver start at t <= 2."""
    n1, n2, s, consts = _oracle_channel_consts(ch)
    if ch.t == 1:
        sc = float(s[0, 0])
        res = np.linspace(0.0, sc, 33)
        best, _, _ = _scan_t1(sc, float(n1[0, 0]), float(n2[0, 0]), consts,
                              w.lambda1, w.lambda2, r0t, res, res)
        return np.array([[best["b0"]]]), np.array([[best["b1"]]])
    unit = np.linspace(0.0, 1.0, 9)
    rho = np.linspace(-1.0, 1.0, 9)
    grid0 = _build_unit_grid(unit, unit, rho)
    grid1 = _build_unit_grid(unit, unit, rho)
    picks, _, _ = _scan_t2(s, n1, n2, consts, w.lambda1, w.lambda2, r0t,
                           grid0, grid1)
    return picks[0]["b0"], picks[0]["b1"]


def _oracle_channel_consts(ch):
    n1 = ch.n1.array
    n2 = ch.n2.array
    s = ch.s.array
    if ch.t == 1:
        ld = lambda x: math.log(float(x[0, 0]))  # noqa: E731
    else:
        ld = lambda x: math.log(float(_det2(x)))  # noqa: E731
    consts = {
        "ld_n1": ld(n1),
        "ld_n2": ld(n2),
        "ld_sn1": ld(s + n1),
        "ld_sn2": ld(s + n2),
    }
    consts["r0max"] = 0.5 * min(consts["ld_sn1"] - consts["ld_n1"],
                                consts["ld_sn2"] - consts["ld_n2"])
    return n1, n2, s, consts


def grid_oracle(ch: AlignedChannel, w: Weights, resolution: int) -> SolverResult:
    """Exhaustive grid scan of the weighted objective (ground truth, t <= 2).

    B0 and B1 are parameterized as [[a, c], [c, b]] with a, b on uniform
    grids over the feasible diagonal ranges and c spanning [-sqrt(ab),
    sqrt(ab)] (t = 2), or as scalars on [0, S] (t = 1).  Infeasible points
    (PSD, power cap, common-rate floor) are skipped.  The full-power corner
    (B0 = S, B1 = 0) is always among the candidates, so a feasible point
    exists for every admissible floor.  One refinement pass re-grids the
    +-1-cell neighborhood of the incumbent at 5x resolution.  Deterministic.
    """
    if ch.t > 2:
        raise UnsupportedDim(f"grid oracle supports t <= 2, got t = {ch.t}")
    if resolution < 5:
        raise ValueError(f"resolution must be >= 5, got {resolution}")
    n1, n2, s, consts = _oracle_channel_consts(ch)
    if w.r0_target > consts["r0max"] + TOL_FEAS:
        raise InfeasibleTarget(
            f"r0_target {w.r0_target:.9g} exceeds r0_max {consts['r0max']:.9g}"
        )
    r0t = min(w.r0_target, consts["r0max"])
    if ch.t == 1:
        found = _oracle_t1(float(s[0, 0]), float(n1[0, 0]), float(n2[0, 0]),
                           consts, w.lambda1, w.lambda2, r0t, resolution)
    else:
        found = _oracle_t2(s, n1, n2, consts, w.lambda1, w.lambda2, r0t, resolution)
    b0, b1, value, f0v, f1v, f2v, points, feasible, window = found
    rates = RateTriple(r0=max(0.0, f0v), r1=max(0.0, f1v), r2=max(0.0, f2v))
    split = CovSplit(b0=SymMatrix(b0), b1=SymMatrix(b1))
    return SolverResult(
        split=split,
        value=value,
        rates=rates,
        converged=True,
        iterations=points,
        active_constraints=_active_set(s, split.b0.array, split.b1.array,
                                       f0v, r0t),
        grid=GridStats(points_scanned=points, feasible_count=feasible,
                       refinement_window=window),
    )


def _scan_t1(s, n1, n2, consts, lam1, lam2, r0t, b0v, b1v):
    """Best feasible pair on explicit scalar grids; exact grid maximum."""
    with np.errstate(all="ignore"):
        rem = s - b0v
        g1 = 0.5 * (consts["ld_sn1"] - np.log(rem + n1))
        g2 = 0.5 * (consts["ld_sn2"] - np.log(rem + n2))
        f0v = np.minimum(g1, g2)
        ok0 = f0v >= r0t - 1e-12
        u = 0.5 * (np.log(rem + n2) - np.log(rem + n1))
        score0 = np.where(ok0, lam2 * u, -np.inf)
        f1v = 0.5 * ((np.log(b1v + n1) - consts["ld_n1"])
                     - (np.log(b1v + n2) - consts["ld_n2"]))
        vv = 0.5 * (np.log(b1v + n1) - np.log(b1v + n2))
        score1 = lam1 * f1v + lam2 * vv
    prefix = np.maximum.accumulate(score1)
    cut = np.searchsorted(b1v, s - b0v + TOL_FEAS, side="right") - 1
    cut = np.clip(cut, 0, len(b1v) - 1)
    total = score0 + prefix[cut]
    i = int(np.argmax(total))
    if not np.isfinite(total[i]):
        raise SecregionError("grid scan found no feasible point")
    row = np.where(b1v <= s - b0v[i] + TOL_FEAS, score1, -np.inf)
    j = int(np.argmax(row))
    feasible = int(np.sum(np.where(ok0, cut + 1, 0)))
    best = {
        "b0": float(b0v[i]), "b1": float(b1v[j]),
        "f0": float(f0v[i]), "f1": float(f1v[j]),
        "f2": float(u[i] + vv[j]),
    }
    best["value"] = lam1 * best["f1"] + lam2 * best["f2"]
    return best, len(b0v) * len(b1v), feasible


# The refinement re-grids the +-1-cell neighborhood of the incumbent with
# 5x finer spacing, re-centering and shrinking for a fixed number of
# passes so the certificate tightens geometrically.
_REFINE_PASSES = 6


def _oracle_t1(s, n1, n2, consts, lam1, lam2, r0t, res):
    b0v = np.linspace(0.0, s, res)
    b1v = np.linspace(0.0, s, res)
    best, points, feasible = _scan_t1(s, n1, n2, consts, lam1, lam2, r0t, b0v, b1v)
    d = s / (res - 1)
    window = (("b0", max(0.0, best["b0"] - d), min(s, best["b0"] + d)),
              ("b1", max(0.0, best["b1"] - d), min(s, best["b1"] + d)))
    for k in range(_REFINE_PASSES):
        w0 = (max(0.0, best["b0"] - d), min(s, best["b0"] + d))
        w1 = (max(0.0, best["b1"] - d), min(s, best["b1"] + d))
        if k == 0:
            window = (("b0",) + w0, ("b1",) + w1)
        fine, p2, f2c = _scan_t1(s, n1, n2, consts, lam1, lam2, r0t,
                                 np.linspace(w0[0], w0[1], 11),
                                 np.linspace(w1[0], w1[1], 11))
        points += p2
        feasible += f2c
        if fine["value"] > best["value"]:
            best = fine
        d /= 5.0
    return (np.array([[best["b0"]]]), np.array([[best["b1"]]]),
            best["value"], best["f0"], best["f1"], best["f2"],
            points, feasible, window)


def _sqrt2x2(m00, m01, m11):
    """Closed-form PSD square root of 2x2 matrices given by entry arrays."""
    det = np.maximum(m00 * m11 - m01 * m01, 0.0)
    root = np.sqrt(det)
    tr = m00 + m11
    denom = np.sqrt(np.maximum(tr + 2.0 * root, 0.0))
    safe = denom > 1e-150
    inv = np.where(safe, 1.0 / np.where(safe, denom, 1.0), 0.0)
    return (m00 + root) * inv, m01 * inv, (m11 + root) * inv


def _build_unit_grid(x_vals, y_vals, rho_vals):
    """Flat entry arrays of matrices D = [[x, e], [e, y]] with 0 <= D <= I.

    rho parameterizes the off-diagonal as a fraction of its admissible
    range |e| <= min(sqrt(xy), sqrt((1-x)(1-y))), so both the PSD edge of
    D and of I - D stay reachable at every refinement scale.
    """
    xx, yy = np.meshgrid(x_vals, y_vals, indexing="ij")
    xx = xx.ravel()
    yy = yy.ravel()
    lim = np.minimum(np.sqrt(xx * yy), np.sqrt((1.0 - xx) * (1.0 - yy)))
    n = len(rho_vals)
    d1 = np.repeat(xx, n)
    d2 = np.repeat(yy, n)
    ee = (lim[:, None] * np.asarray(rho_vals)[None, :]).ravel()
    coords = (d1, d2, np.tile(np.asarray(rho_vals, dtype=float), len(xx)))
    return d1, d2, ee, coords


def _congruence(h00, h01, h11, d1, e, d2):
    """Entry arrays of H D H for symmetric H and D = [[d1, e], [e, d2]]."""
    m00 = h00 * h00 * d1 + 2.0 * h00 * h01 * e + h01 * h01 * d2
    m01 = h00 * h01 * d1 + (h00 * h11 + h01 * h01) * e + h01 * h11 * d2
    m11 = h01 * h01 * d1 + 2.0 * h01 * h11 * e + h11 * h11 * d2
    return m00, m01, m11


# Memory cap for the pairwise scan: rows of B0 processed per block.
_SCAN_BLOCK = 256


def _scan_t2(s, n1, n2, consts, lam1, lam2, r0t, grid0, grid1, top=1):
    """Best feasible pair over congruence grids (exact grid maximum).

    grid0 parameterizes B0 = S^1/2 D0 S^1/2 and grid1 parameterizes
    B1 = (S - B0)^1/2 D1 (S - B0)^1/2, so every scanned pair satisfies
    the PSD and power-cap constraints by construction; only the
    common-rate floor filters B0 candidates.
    """
    sh00, sh01, sh11 = _sqrt2x2(np.array([s[0, 0]]), np.array([s[0, 1]]),
                                np.array([s[1, 1]]))
    d1, d2, e0, coords0 = grid0
    b000, b001, b011 = _congruence(sh00[0], sh01[0], sh11[0], d1, e0, d2)
    r00 = s[0, 0] - b000
    r01 = s[0, 1] - b001
    r11 = s[1, 1] - b011

    with np.errstate(all="ignore"):
        det1 = ((r00 + n1[0, 0]) * (r11 + n1[1, 1])
                - (r01 + n1[0, 1]) ** 2)
        det2 = ((r00 + n2[0, 0]) * (r11 + n2[1, 1])
                - (r01 + n2[0, 1]) ** 2)
        ln1 = np.log(np.maximum(det1, 1e-300))
        ln2 = np.log(np.maximum(det2, 1e-300))
        g1 = 0.5 * (consts["ld_sn1"] - ln1)
        g2 = 0.5 * (consts["ld_sn2"] - ln2)
        f0v = np.minimum(g1, g2)
        ok0 = f0v >= r0t - 1e-12
        u = 0.5 * (ln2 - ln1)
        score0 = np.where(ok0, lam2 * u, -np.inf)

    h00, h01, h11 = _sqrt2x2(r00, r01, r11)
    e1, e2, ee1, coords1 = grid1
    n0 = len(b000)
    nn1 = len(e1)
    feasible = int(np.count_nonzero(ok0)) * nn1

    best_val = -np.inf
    best_i = best_j = -1
    ld_n1 = consts["ld_n1"]
    ld_n2 = consts["ld_n2"]
    for lo in range(0, n0, _SCAN_BLOCK):
        hi = min(lo + _SCAN_BLOCK, n0)
        blk = slice(lo, hi)
        if not np.any(np.isfinite(score0[blk])):
            continue
        c00, c01, c11 = (h00[blk][:, None], h01[blk][:, None],
                         h11[blk][:, None])
        m00 = c00 * c00 * e1 + 2.0 * c00 * c01 * ee1 + c01 * c01 * e2
        m01 = c00 * c01 * e1 + (c00 * c11 + c01 * c01) * ee1 + c01 * c11 * e2
        m11 = c01 * c01 * e1 + 2.0 * c01 * c11 * ee1 + c11 * c11 * e2
        with np.errstate(all="ignore"):
            bd1 = ((m00 + n1[0, 0]) * (m11 + n1[1, 1])
                   - (m01 + n1[0, 1]) ** 2)
            bd2 = ((m00 + n2[0, 0]) * (m11 + n2[1, 1])
                   - (m01 + n2[0, 1]) ** 2)
            l1 = np.log(np.maximum(bd1, 1e-300))
            l2 = np.log(np.maximum(bd2, 1e-300))
            f1v = 0.5 * (l1 - ld_n1 - l2 + ld_n2)
            vv = 0.5 * (l1 - l2)
            total = score0[blk][:, None] + lam1 * f1v + lam2 * vv
        flat = int(np.argmax(total))
        bi, bj = divmod(flat, nn1)
        val = float(total[bi, bj])
        if np.isfinite(val) and val > best_val:
            best_val = val
            best_i = lo + bi
            best_j = bj
    if best_i < 0:
        raise SecregionError("grid scan found no feasible point")

    def _point(i, j):
        b0m = np.array([[b000[i], b001[i]], [b001[i], b011[i]]])
        hh = np.array([[h00[i], h01[i]], [h01[i], h11[i]]])
        dd = np.array([[e1[j], ee1[j]], [ee1[j], e2[j]]])
        b1m = hh @ dd @ hh
        b1m = 0.5 * (b1m + b1m.T)
        bd1 = ((b1m[0, 0] + n1[0, 0]) * (b1m[1, 1] + n1[1, 1])
               - (b1m[0, 1] + n1[0, 1]) ** 2)
        bd2 = ((b1m[0, 0] + n2[0, 0]) * (b1m[1, 1] + n2[1, 1])
               - (b1m[0, 1] + n2[0, 1]) ** 2)
        f1p = 0.5 * (math.log(bd1) - ld_n1 - math.log(bd2) + ld_n2)
        vp = 0.5 * (math.log(bd1) - math.log(bd2))
        pt = {
            "b0": b0m, "b1": b1m,
            "f0": float(f0v[i]), "f1": f1p, "f2": float(u[i]) + vp,
            "coords0": (d1[i], d2[i], coords0[2][i]),
            "coords1": (e1[j], e2[j], coords1[2][j]),
        }
        pt["value"] = lam1 * pt["f1"] + lam2 * pt["f2"]
        return pt

    picks = [_point(best_i, best_j)]
    if top > 1:
        # runners-up from distinct B0 basins guard the zoom against
        # committing to a single coarse cell
        seen = {(d1[best_i], d2[best_i], e0[best_i] >= 0.0)}
        scored = []
        for lo in range(0, n0, _SCAN_BLOCK):
            hi = min(lo + _SCAN_BLOCK, n0)
            blk = slice(lo, hi)
            if not np.any(np.isfinite(score0[blk])):
                continue
            c00, c01, c11 = (h00[blk][:, None], h01[blk][:, None],
                             h11[blk][:, None])
            m00 = c00 * c00 * e1 + 2.0 * c00 * c01 * ee1 + c01 * c01 * e2
            m01 = (c00 * c01 * e1 + (c00 * c11 + c01 * c01) * ee1
                   + c01 * c11 * e2)
            m11 = c01 * c01 * e1 + 2.0 * c01 * c11 * ee1 + c11 * c11 * e2
            with np.errstate(all="ignore"):
                bd1 = ((m00 + n1[0, 0]) * (m11 + n1[1, 1])
                       - (m01 + n1[0, 1]) ** 2)
                bd2 = ((m00 + n2[0, 0]) * (m11 + n2[1, 1])
                       - (m01 + n2[0, 1]) ** 2)
                l1 = np.log(np.maximum(bd1, 1e-300))
                l2 = np.log(np.maximum(bd2, 1e-300))
                total = (score0[blk][:, None]
                         + lam1 * 0.5 * (l1 - ld_n1 - l2 + ld_n2)
                         + lam2 * 0.5 * (l1 - l2))
            row_best = np.max(total, axis=1)
            row_arg = np.argmax(total, axis=1)
            for k in range(hi - lo):
                if np.isfinite(row_best[k]):
                    scored.append((float(row_best[k]), lo + k,
                                   int(row_arg[k])))
        scored.sort(key=lambda z: (-z[0], z[1]))
        for val, i2, j2 in scored:
            if len(picks) >= top:
                break
            key = (d1[i2], d2[i2], e0[i2] >= 0.0)
            if key in seen:
                continue
            seen.add(key)
            picks.append(_point(i2, j2))
    return picks, n0 * nn1, feasible


# How many distinct coarse basins each t = 2 oracle run zooms into.
_ZOOM_CANDIDATES = 3
# Extra zoom passes granted while the incumbent keeps hitting window edges.
_ZOOM_HOLDS = 4


def _zoom_axes(center, half, lo_bound, hi_bound, n=11):
    lo = max(lo_bound, center - half)
    hi = min(hi_bound, center + half)
    return np.linspace(lo, hi, n), (lo, hi)


def _zoom_t2(s, n1, n2, consts, lam1, lam2, r0t, res, start):
    """Iterated local re-gridding around one coarse incumbent.

    Windows live in the congruence coordinates (diagonal fractions in
    [0, 1], off-diagonal fraction in [-1, 1]).  Widths start at one coarse
    cell and shrink 5x per pass; a pass whose winner lands on a shrinkable
    window edge keeps the current widths so the zoom can walk out of a
    poorly centered cell (at most _ZOOM_HOLDS times).
    """
    best = start
    dx = 1.0 / (res - 1)
    drho = 2.0 / (res - 1)
    points = feasible = 0
    first_window = None
    passes = holds = 0
    while passes < _REFINE_PASSES and holds <= _ZOOM_HOLDS:
        axes = []
        bounds = []
        for (x1, x2, rho), dh in ((best["coords0"], dx), (best["coords1"], dx)):
            ax1, w1 = _zoom_axes(x1, dh, 0.0, 1.0)
            ax2, w2 = _zoom_axes(x2, dh, 0.0, 1.0)
            axr, wr = _zoom_axes(rho, drho, -1.0, 1.0)
            axes.append((ax1, ax2, axr))
            bounds.extend([w1, w2, wr])
        if first_window is None:
            names = ("b0_x1", "b0_x2", "b0_rho", "b1_x1", "b1_x2", "b1_rho")
            first_window = tuple((nm,) + w for nm, w in zip(names, bounds))
        grid0 = _build_unit_grid(axes[0][0], axes[0][1], axes[0][2])
        grid1 = _build_unit_grid(axes[1][0], axes[1][1], axes[1][2])
        picks, p2, f2c = _scan_t2(s, n1, n2, consts, lam1, lam2, r0t,
                                  grid0, grid1)
        points += p2
        feasible += f2c
        improved = picks[0]["value"] > best["value"]
        if improved:
            best = picks[0]
        on_edge = False
        for (val, (lo, hi)), gmin, gmax in zip(
            zip(best["coords0"] + best["coords1"], bounds),
            (0.0, 0.0, -1.0, 0.0, 0.0, -1.0),
            (1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
        ):
            tick = 0.1 * (hi - lo)
            if val - lo <= tick and lo > gmin + 1e-12:
                on_edge = True
            if hi - val <= tick and hi < gmax - 1e-12:
                on_edge = True
        if improved and on_edge:
            holds += 1
            continue
        passes += 1
        dx /= 5.0
        drho /= 5.0
    return best, points, feasible, first_window


def _oracle_t2(s, n1, n2, consts, lam1, lam2, r0t, res):
    unit = np.linspace(0.0, 1.0, res)
    rho = np.linspace(-1.0, 1.0, res)
    grid0 = _build_unit_grid(unit, unit, rho)
    grid1 = _build_unit_grid(unit, unit, rho)
    picks, points, feasible = _scan_t2(s, n1, n2, consts, lam1, lam2, r0t,
                                       grid0, grid1, top=_ZOOM_CANDIDATES)
    best = None
    window = None
    for start in picks:
        zoomed, p2, f2c, w = _zoom_t2(s, n1, n2, consts, lam1, lam2, r0t,
                                      res, start)
        points += p2
        feasible += f2c
        if best is None or zoomed["value"] > best["value"]:
            best = zoomed
            window = w
    return (best["b0"], best["b1"], best["value"], best["f0"], best["f1"],
            best["f2"], points, feasible, window)

# ---------------------------------------------------------------------------
# Boundary tracing.
# ---------------------------------------------------------------------------


def _sweep_weights(theta):
    lam1 = math.cos(theta)
    lam2 = math.sin(theta)
    if abs(lam1) < 1e-15:
        lam1 = 0.0
    if abs(lam2) < 1e-15:
        lam2 = 0.0
    return lam1, lam2


def trace_surface(ch: AlignedChannel, r0_steps: int, weight_steps: int,
                  cfg: SolverConfig) -> list[RegionSample]:
    """Sweep the boundary over a (common-rate floor, weight-angle) grid.

    Floors run over r0_steps uniform values in [0, r0_max]; angles theta
    over weight_steps values in [0, pi/2] with (lambda1, lambda2) =
    (cos theta, sin theta).  Output is sorted by (floor, theta) and fully
    determined by cfg.seed.
    """
    if r0_steps < 1 or weight_steps < 1:
        raise ValueError("r0_steps and weight_steps must be >= 1")
    rmax = r0_max(ch)
    floors = np.linspace(0.0, rmax, r0_steps)
    thetas = np.linspace(0.0, 0.5 * math.pi, weight_steps)
    samples = []
    for r0t in floors:
        for th in thetas:
            lam1, lam2 = _sweep_weights(float(th))
            w = Weights(lambda1=lam1, lambda2=lam2, r0_target=float(r0t))
            try:
                res = maximize_weighted(ch, w, cfg)
            except SecregionError as exc:
                raise type(exc)(
                    f"at r0_target={r0t:.9g}, theta={th:.9g}: {exc}"
                ) from exc
            samples.append(RegionSample(rates=res.rates, weights=w,
                                        split=res.split))
    return samples


def slice_at_r0(ch: AlignedChannel, r0: float, weight_steps: int,
                cfg: SolverConfig) -> list[RegionSample]:
    """The weight-angle sweep of trace_surface at one fixed floor."""
    rmax = r0_max(ch)
    if not math.isfinite(r0) or r0 < 0.0 or r0 > rmax + TOL_FEAS:
        raise InfeasibleTarget(
            f"r0 must lie in [0, {rmax:.9g}], got {r0}"
        )
    if weight_steps < 1:
        raise ValueError("weight_steps must be >= 1")
    samples = []
    for th in np.linspace(0.0, 0.5 * math.pi, weight_steps):
        lam1, lam2 = _sweep_weights(float(th))
        w = Weights(lambda1=lam1, lambda2=lam2, r0_target=float(r0))
        res = maximize_weighted(ch, w, cfg)
        samples.append(RegionSample(rates=res.rates, weights=w, split=res.split))
    return samples
