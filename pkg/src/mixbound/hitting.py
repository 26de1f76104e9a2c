"""Exact expected hitting times and exact hitting-tail probabilities.

All quantities refer to the continuous-time rate-1 chain, whose expected
hitting times coincide with the expected step counts of the embedded
discrete chain.  The convention is T_y = 0 when the start state is y, so
tails from stationarity start at 1 - pi(y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .chains import TransitionKernel
from .errors import NumericalFailure, SingularSystem
from .spectral import SpectralDecomposition, spectral_moment, symmetrized_laplacian


@dataclass(frozen=True)
class HittingSummary:
    """hit_matrix[x, y] = E_x[T_y], plus the derived scalars.

    t_pi_to[x] is the expected hitting time of x from stationarity, t_hit
    the maximum entry and t_target the common value of the pi-averaged row
    sums (the random target time).
    """

    hit_matrix: np.ndarray
    t_pi_to: np.ndarray
    t_hit: float
    t_target: float


def hit_times(kernel: TransitionKernel) -> HittingSummary:
    """Solve every E_x[T_y] exactly.

    E_x[T_y] solves the linear system (I - P) restricted to V \\ {y} with
    unit right-hand side.  The fast route gets all columns from one
    symmetric solve: with S the symmetrized Laplacian, q = sqrt(pi) and
    N = (S + q q^T)^{-1},

        E_x[T_y] = N[y,y] / pi(y) - N[x,y] / sqrt(pi(x) pi(y)).

    S + q q^T has spectrum {1, lambda_2, ..., lambda_n}, so that solve is
    well conditioned, but the difference cancels catastrophically once
    hitting times span many orders of magnitude (small-drift birth-death
    chains reach 1e19 and beyond).  When the fast route shows a scale
    above ~1e8, or any negative entry, every column is recomputed with a
    subtraction-free GTH-style absorbing-chain elimination, which is
    componentwise accurate at any imbalance.  The restricted-system
    residual contract (<= 1e-10 * n above the float forming floor) is
    verified on a sample of target states either way.
    """
    n = kernel.n
    S, q = symmetrized_laplacian(kernel)
    A = S + np.outer(q, q)
    try:
        N = scipy.linalg.inv(A)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystem(f"fundamental system is singular: {exc}") from exc

    cols = np.linspace(0, n - 1, num=min(n, 8), dtype=int)
    resid = np.abs(A @ N[:, cols] - np.eye(n)[:, cols]).max()
    if resid > 1e-10 * n:
        raise SingularSystem(f"fundamental solve residual {resid:.3e} > 1e-10*n")

    diag = np.diag(N)
    hit = diag[None, :] / kernel.pi[None, :] - N / np.outer(q, q)
    np.fill_diagonal(hit, 0.0)

    off_min = float((hit + np.diag(np.full(n, np.inf))).min())
    if hit.max() > 1e8 or off_min <= 0.0:
        hit = _gth_hit_matrix(kernel)

    _check_restricted_residual(kernel, hit, cols)
    t_pi_to = kernel.pi @ hit
    t_target = float(kernel.pi @ hit @ kernel.pi)
    return HittingSummary(hit_matrix=hit, t_pi_to=t_pi_to,
                          t_hit=float(hit.max()), t_target=t_target)


def _gth_hit_matrix(kernel: TransitionKernel) -> np.ndarray:
    hit = np.zeros((kernel.n, kernel.n))
    for y in range(kernel.n):
        keep, h = _gth_absorbing_column(kernel.P, y)
        hit[keep, y] = h
    return hit


def _gth_absorbing_column(P: np.ndarray, y: int):
    """Expected absorption times into y, by GTH elimination.

    Only additions, multiplications and divisions of nonnegative numbers,
    so every entry keeps relative accuracy regardless of scale.  State k's
    outflow g[k] + sum_{j<k} B[k, j] replaces the diagonal 1 - B[k, k]
    exactly (row sums are preserved by the fold-in updates).
    """
    n = P.shape[0]
    keep = np.flatnonzero(np.arange(n) != y)
    m = keep.size
    B = P[np.ix_(keep, keep)].copy()
    g = P[keep, y].copy()
    b = np.ones(m)
    s = np.empty(m)
    for k in range(m - 1, 0, -1):
        s[k] = g[k] + B[k, :k].sum()
        if s[k] <= 0.0:
            raise SingularSystem(f"no outflow from state {keep[k]}; reducible")
        f = B[:k, k] / s[k]
        b[:k] += f * b[k]
        g[:k] += f * g[k]
        B[:k, :k] += np.outer(f, B[k, :k])
    if g[0] <= 0.0:
        raise SingularSystem(f"no outflow from state {keep[0]}; reducible")
    s[0] = g[0]
    h = np.empty(m)
    h[0] = b[0] / s[0]
    for k in range(1, m):
        h[k] = (b[k] + B[k, :k] @ h[:k]) / s[k]
    return keep, h


def _check_restricted_residual(kernel, hit, cols):
    # (I - P) h = 1 off the target state.  The contract 1e-10 * n is only
    # verifiable above the rounding floor of forming the residual itself,
    # which is O(n * eps * |L| |h|) per row; tiny-drift birth-death chains
    # push |h| to ~1e19 and beyond, where the floor dominates.
    n = kernel.n
    L = np.eye(n) - kernel.P
    eps = np.finfo(float).eps
    for y in cols:
        keep = np.arange(n) != y
        h = hit[keep, y]
        block = L[np.ix_(keep, keep)]
        r = np.abs(block @ h - 1.0)
        floor = 4.0 * n * eps * (np.abs(block) @ np.abs(h) + 1.0)
        if np.any(r > 1e-10 * n + floor):
            raise SingularSystem(
                f"restricted system residual for target {y} exceeds contract")


def eigentime_residual(summary: HittingSummary,
                       decomp: SpectralDecomposition) -> float:
    """|t_target - sum_{i>=2} 1/lambda_i|, the eigentime identity defect."""
    return abs(summary.t_target - spectral_moment(decomp, 1))


def random_target_spread(kernel: TransitionKernel,
                         summary: HittingSummary) -> float:
    """Max deviation of sum_y pi(y) E_x[T_y] from its mean over x."""
    row = summary.hit_matrix @ kernel.pi
    return float(np.abs(row - summary.t_target).max())


# ---------------------------------------------------------------------------
# exact tails of T_y from stationarity

@dataclass(frozen=True)
class TailProfile:
    """P_pi[T_y > t] = sum_j weights[j] exp(-rates[j] t).

    The weights are nonnegative and sum to 1 - pi(y); rates are the
    Dirichlet eigenvalues of the Laplacian with state y removed.
    """

    rates: np.ndarray
    weights: np.ndarray
    pi_y: float

    def survival(self, t: float) -> float:
        return float(self.weights @ np.exp(-self.rates * t))

    def mean(self) -> float:
        return float(self.weights @ (1.0 / self.rates))

    def second_moment(self) -> float:
        return 2.0 * float(self.weights @ self.rates**-2.0)


def hitting_tail_profile(kernel: TransitionKernel, y: int) -> TailProfile:
    """Eigendecompose the substochastic block with y removed.

    The symmetrized block is positive definite for an irreducible chain;
    its eigenpairs give the exact mixture of exponentials for the tail.
    """
    S, q = symmetrized_laplacian(kernel)
    keep = np.arange(kernel.n) != y
    mu, U = scipy.linalg.eigh(S[np.ix_(keep, keep)])
    if mu[0] <= 1e-14 * max(1.0, mu[-1]):
        raise NumericalFailure(
            f"Dirichlet eigenvalue {mu[0]:.3e} is not positive; target {y}")
    c = (U.T @ q[keep]) ** 2
    return TailProfile(rates=mu, weights=c, pi_y=float(kernel.pi[y]))


def hitting_tail(kernel: TransitionKernel, y: int, t: float) -> float:
    """Exact P_pi[T_y > t]; equals 1 - pi(y) at t = 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return hitting_tail_profile(kernel, y).survival(t)


def second_moment_pi(kernel: TransitionKernel, y: int) -> float:
    """Exact E_pi[T_y^2] = 2 int_0^inf t P_pi[T_y > t] dt, in closed form."""
    return hitting_tail_profile(kernel, y).second_moment()


def write_hit_matrix_csv(summary: HittingSummary, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in summary.hit_matrix:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
