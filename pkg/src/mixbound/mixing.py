"""L2, L-infinity and total variation distance profiles and mixing times.

Profiles are evaluated spectrally; every mixing time is the first crossing
of a strictly decreasing profile, found by bracketing plus bisection run to
floating-point resolution (far inside the 1e-9 * t_rel contract).  The
total variation convention here is t_tv(eps) = first time the worst-case
L1 distance drops to 2*eps, so the plain t_tv corresponds to eps = 1/4.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .chains import TransitionKernel
from .errors import BadEps
from .hitting import HittingSummary
from .reports import BoundReport
from .spectral import (SpectralDecomposition, heat_diag_ratio,
                       heat_diag_ratio_all, heat_diag_ratio_at,
                       heat_kernel_row)

KINDS = ("linf", "l2x", "tv", "ave_l2")

# Above this stationary imbalance the spectral reconstruction of
# off-diagonal heat entries cancels catastrophically (eigenfunction values
# scale like 1/sqrt(pi_min)); rows then come from the matrix exponential,
# whose entries stay in [0, 1].  Diagonal ratios are all-positive sums and
# never need the fallback.
_BALANCE_LIMIT = 1e6


def d_tv(kernel: TransitionKernel, decomp: SpectralDecomposition,
         x: int, t: float) -> float:
    """L1 distance sum_y |H_t(x,y) - pi(y)|; twice the TV distance."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if float(kernel.pi.max() / kernel.pi.min()) <= _BALANCE_LIMIT:
        row = heat_kernel_row(decomp, x, t)
    else:
        L = np.eye(kernel.n) - kernel.P
        row = scipy.linalg.expm(-t * L)[x]
    return float(np.abs(row - decomp.pi).sum())


class MixingProfile:
    """Cached distance evaluators and mixing-time solver for one chain."""

    def __init__(self, kernel: TransitionKernel, decomp: SpectralDecomposition):
        self.kernel = kernel
        self.decomp = decomp
        self._times: dict = {}
        self._l2_vectors: dict = {}
        self._balanced = float(kernel.pi.max() / kernel.pi.min()) <= _BALANCE_LIMIT
        self._laplacian = None
        self._heat_cache: dict = {}

    # -- distance profiles -------------------------------------------------

    def linf_distance(self, t: float) -> float:
        """max_y H_t(y,y)/pi(y) - 1, the worst relative density deviation."""
        if self.kernel.transitive:
            return heat_diag_ratio(self.decomp, 0, t) - 1.0
        return float(heat_diag_ratio_all(self.decomp, t).max()) - 1.0

    def l2_distance_sq(self, x: int, t: float) -> float:
        return max(heat_diag_ratio(self.decomp, x, 2.0 * t) - 1.0, 0.0)

    def l2_distance(self, x: int, t: float) -> float:
        return self.l2_distance_sq(x, t) ** 0.5

    def tv_distance(self, x: int, t: float) -> float:
        if self._balanced:
            row = heat_kernel_row(self.decomp, x, t)
        else:
            row = self._heat_matrix(t)[x]
        return float(np.abs(row - self.decomp.pi).sum())

    def tv_worst(self, t: float) -> float:
        if self.kernel.transitive:
            return self.tv_distance(0, t)
        if self._balanced:
            return max(self.tv_distance(x, t) for x in range(self.kernel.n))
        H = self._heat_matrix(t)
        return float(np.abs(H - self.decomp.pi[None, :]).sum(axis=1).max())

    def _heat_matrix(self, t: float) -> np.ndarray:
        if t not in self._heat_cache:
            if self._laplacian is None:
                self._laplacian = np.eye(self.kernel.n) - self.kernel.P
            if len(self._heat_cache) > 256:
                self._heat_cache.clear()
            self._heat_cache[t] = scipy.linalg.expm(-t * self._laplacian)
        return self._heat_cache[t]

    def ave_l2_sq(self, t: float) -> float:
        """sum_x pi(x) d_{2,x}(t)^2 = sum_{i>=2} exp(-2 lambda_i t)."""
        return float(np.exp(-2.0 * self.decomp.lambdas[1:] * t).sum())

    # -- mixing times --------------------------------------------------------

    def mixing_time(self, kind: str, eps: float, x: int | None = None) -> float:
        """First t at which the requested profile meets its threshold.

        linf and l2x use threshold eps, ave_l2 uses eps^2 on the summed
        squares, tv uses 2*eps on the worst L1 distance.
        """
        if eps <= 0:
            raise BadEps(f"eps must be positive, got {eps}")
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
        if kind == "l2x":
            if x is None:
                raise ValueError("l2x mixing time needs a state x")
            key = (kind, int(x), float(eps))
        else:
            key = (kind, float(eps))
        if key not in self._times:
            self._times[key] = self._solve(kind, eps, x)
        return self._times[key]

    def l2_mixing_times(self, eps: float) -> np.ndarray:
        """Per-state L2 mixing times, solved in lockstep bisection."""
        if eps <= 0:
            raise BadEps(f"eps must be positive, got {eps}")
        key = float(eps)
        if key not in self._l2_vectors:
            self._l2_vectors[key] = self._solve_l2_vector(eps)
        return self._l2_vectors[key]

    def worst_l2_mixing_time(self, eps: float) -> float:
        if self.kernel.transitive:
            return self.mixing_time("l2x", eps, x=0)
        return float(self.l2_mixing_times(eps).max())

    # -- internals -----------------------------------------------------------

    def _solve(self, kind, eps, x):
        decomp = self.decomp
        t_rel = decomp.t_rel
        pi_min = float(decomp.pi.min())
        if kind == "linf":
            value, threshold = self.linf_distance, eps
            hi = t_rel * (np.log(max(1.0 / pi_min, 2.0) / eps) + 1.0)
        elif kind == "l2x":
            value = lambda t: self.l2_distance(x, t)
            threshold = eps
            hi = t_rel * (np.log(max(1.0 / float(decomp.pi[x]), 2.0)) / 2.0
                          + np.log(1.0 / eps) + 1.0)
        elif kind == "tv":
            value, threshold = self.tv_worst, 2.0 * eps
            hi = t_rel * (np.log(max(1.0 / pi_min, 2.0)) / 2.0
                          + abs(np.log(2.0 * eps)) + 1.0)
        else:
            value = self.ave_l2_sq
            threshold = eps * eps
            hi = 0.5 * t_rel * (np.log(max(self.kernel.n - 1.0, 1.0) / eps**2) + 2.0)
        return _first_crossing(value, threshold, max(hi, t_rel))

    def _solve_l2_vector(self, eps):
        decomp = self.decomp
        n = self.kernel.n
        thr = 1.0 + eps * eps
        if heat_diag_ratio_all(decomp, 0.0).max() <= thr:
            return np.zeros(n)
        hi_scalar = decomp.t_rel * (np.log(max(1.0 / decomp.pi.min(), 2.0)) / 2.0
                                    + np.log(1.0 / eps) + 1.0)
        done_at_zero = heat_diag_ratio_all(decomp, 0.0) <= thr
        hi = np.where(done_at_zero, 0.0, 2.0 * hi_scalar)
        for _ in range(200):
            if heat_diag_ratio_at(decomp, 2.0 * hi).max() <= thr:
                break
            hi *= 2.0
        lo = np.zeros(n)
        while True:
            mid = 0.5 * (lo + hi)
            stuck = (mid <= lo) | (mid >= hi)
            if stuck.all():
                break
            ok = heat_diag_ratio_at(decomp, 2.0 * mid) <= thr
            hi = np.where(ok & ~stuck, mid, hi)
            lo = np.where(~ok & ~stuck, mid, lo)
        return hi


def _first_crossing(value, threshold, hi_guess):
    """inf{t >= 0 : value(t) <= threshold} for a nonincreasing value."""
    if value(0.0) <= threshold:
        return 0.0
    hi = float(hi_guess)
    for _ in range(200):
        if value(hi) <= threshold:
            break
        hi *= 2.0
    else:
        raise RuntimeError("profile failed to cross its threshold")
    lo = 0.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return hi
        if value(mid) <= threshold:
            hi = mid
        else:
            lo = mid


def hierarchy_check(kernel: TransitionKernel, decomp: SpectralDecomposition,
                    eps: float, hitting: HittingSummary,
                    profile: MixingProfile | None = None) -> list[BoundReport]:
    """The classical chain of mixing-time comparisons, evaluated exactly.

    Five links for eps in (0,1): relaxation lower bound on TV, TV below the
    worst L2 time, the exact factor-two identity between L2 and uniform
    times, the log(1/pi_min) upper bound, and the 9 * t_hit bound on the
    plain uniform mixing time.
    """
    if not (0.0 < eps < 1.0):
        raise BadEps(f"hierarchy check needs eps in (0,1), got {eps}")
    prof = profile or MixingProfile(kernel, decomp)
    t_rel = decomp.t_rel
    pi_min = float(kernel.pi.min())
    ctx = {"kernel": kernel.label, "eps": eps}

    t_tv = prof.mixing_time("tv", eps / 2.0)
    t_l2 = prof.worst_l2_mixing_time(eps)
    t_linf_sq = prof.mixing_time("linf", eps * eps)
    t_linf_half = prof.mixing_time("linf", 0.5)

    identity_gap = abs(t_l2 - 0.5 * t_linf_sq)
    return [
        BoundReport.check("rel_log_le_tv", t_rel * abs(np.log(eps)), t_tv, **ctx),
        BoundReport.check("tv_le_l2", t_tv, t_l2, **ctx),
        BoundReport.check("l2_linf_identity", identity_gap,
                          1e-8 * (1.0 + t_l2), **ctx),
        BoundReport.check("l2_le_rel_log_pimin", 0.5 * t_linf_sq,
                          t_rel * abs(np.log(eps * eps * pi_min)), **ctx),
        BoundReport.check("linf_le_9_thit", t_linf_half, 9.0 * hitting.t_hit,
                          kernel=kernel.label),
    ]
