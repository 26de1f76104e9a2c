"""Event-driven continuous-time branching random walk at split rate gamma.

Each particle carries an independent rate-1 jump clock (target drawn from
its current row of P) and an independent rate-gamma split clock (the child
appears at the parent's position).  Equivalently, a particle's next event
arrives after Exp(1 + gamma) and is a jump with probability 1/(1 + gamma);
a global priority queue on event times drives the simulation, so the
process is exact in distribution with no time discretization.

Default gamma is the spectral gap of the kernel, the critical regime in
which the population grows by a constant factor every relaxation time.

Conventions: occupancy at time 0 counts, so a replicate whose initial
particle starts on the target reports a hit at time 0, and two processes
born on the same state intersect at time 0.  A state is "visited" from its
first occupancy onward; a birth site is already in the parent process's
visited set, so only jump arrivals (and time 0) can create first visits.

Replicate r draws its seed from (master_seed, r) through splitmix64, which
makes every estimate bit-reproducible and embarrassingly parallel; results
are aggregated by replicate index, so worker count cannot change them.
"""

from __future__ import annotations

import math
from bisect import bisect
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from heapq import heappop, heappush
from random import Random

import numpy as np

from .chains import ChainFamilySpec, TransitionKernel, build_family
from .errors import AllCensored, InvalidSpec
from .hitting import hit_times
from .mixing import MixingProfile
from .spectral import decompose, heat_moment_windowed_all, spectral_moment

_MASK = 0xFFFFFFFFFFFFFFFF


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def replicate_seed(master_seed: int, replicate: int, salt: int = 0) -> int:
    """Fixed mixing function from (master_seed, replicate) to a stream seed."""
    return _splitmix64(_splitmix64(_splitmix64(master_seed & _MASK) ^ replicate) ^ salt)


@dataclass(frozen=True)
class BRWConfig:
    """Simulation knobs.  gamma=None means the spectral gap of the kernel;
    max_time=None means 50 * t_rel * log(1 + t_hit / t_rel)."""

    gamma: float | None = None
    replicates: int = 1000
    master_seed: int = 0
    max_particles: int = 100_000
    max_time: float | None = None
    threads: int = 1

    def __post_init__(self):
        if self.gamma is not None and self.gamma <= 0:
            raise InvalidSpec("gamma must be positive")
        if self.replicates < 1:
            raise InvalidSpec("replicates must be >= 1")
        if self.max_particles < 1:
            raise InvalidSpec("max_particles must be >= 1")
        if self.max_time is not None and self.max_time <= 0:
            raise InvalidSpec("max_time must be positive")


@dataclass(frozen=True)
class BRWEstimate:
    """Monte Carlo mean over uncensored replicates, censoring disclosed."""

    mean: float
    stderr: float
    replicates_used: int
    censor_rate: float
    target: str


def _cum_rows(P: np.ndarray) -> tuple:
    # plain-float tuples: bisect comparisons in the event loop are much
    # faster against Python floats than numpy scalars
    rows = []
    for row in P:
        c = np.cumsum(row)
        c[-1] = 1.0
        rows.append(tuple(float(v) for v in c))
    return tuple(rows)


def _cum_pi(pi: np.ndarray) -> tuple:
    c = np.cumsum(pi)
    c[-1] = 1.0
    return tuple(float(v) for v in c)


def resolve_config(kernel: TransitionKernel, cfg: BRWConfig) -> BRWConfig:
    """Fill gamma and max_time defaults from the kernel's exact quantities."""
    gamma, max_time = cfg.gamma, cfg.max_time
    if gamma is None or max_time is None:
        d = decompose(kernel)
        if gamma is None:
            gamma = d.gap
        if max_time is None:
            t_hit = hit_times(kernel).t_hit
            max_time = 50.0 * d.t_rel * math.log(1.0 + t_hit / d.t_rel)
    return replace(cfg, gamma=gamma, max_time=max_time)


# ---------------------------------------------------------------------------
# single-replicate engines (top level so process pools can pickle them)

def _run_hit(cum_rows, cum_pi, gamma, target, max_particles, max_time, seed,
             initial_state):
    rng = Random(seed)
    pos0 = initial_state if initial_state is not None else bisect(cum_pi, rng.random())
    if pos0 == target:
        return 0.0
    total = 1.0 + gamma
    jump_p = 1.0 / total
    positions = [pos0]
    heap = [(rng.expovariate(total), 0)]
    while True:
        t, p = heappop(heap)
        if t > max_time:
            return None
        if rng.random() < jump_p:
            z = bisect(cum_rows[positions[p]], rng.random())
            positions[p] = z
            if z == target:
                return t
        else:
            if len(positions) >= max_particles:
                return None
            positions.append(positions[p])
            heappush(heap, (t + rng.expovariate(total), len(positions) - 1))
        heappush(heap, (t + rng.expovariate(total), p))


def _run_intersection(cum_rows, cum_pi, gamma, n, max_particles, max_time, seed,
                      initial_states):
    rng = Random(seed)
    if initial_states is not None:
        a0, b0 = initial_states
    else:
        a0 = bisect(cum_pi, rng.random())
        b0 = bisect(cum_pi, rng.random())
    if a0 == b0:
        return 0.0
    visited = (bytearray(n), bytearray(n))
    visited[0][a0] = 1
    visited[1][b0] = 1
    positions = ([a0], [b0])
    total = 1.0 + gamma
    jump_p = 1.0 / total
    heap = [(rng.expovariate(total), 0, 0), (rng.expovariate(total), 1, 0)]
    while True:
        t, pr, p = heappop(heap)
        if t > max_time:
            return None
        own = positions[pr]
        if rng.random() < jump_p:
            z = bisect(cum_rows[own[p]], rng.random())
            own[p] = z
            if visited[1 - pr][z]:
                return t
            visited[pr][z] = 1
        else:
            if len(positions[0]) + len(positions[1]) >= max_particles:
                return None
            own.append(own[p])
            heappush(heap, (t + rng.expovariate(total), pr, len(own) - 1))
        heappush(heap, (t + rng.expovariate(total), pr, p))


def _run_plain(cum_rows, cum_pi, n, max_time, seed, initial_states):
    rng = Random(seed)
    if initial_states is not None:
        a, b = initial_states
    else:
        a = bisect(cum_pi, rng.random())
        b = bisect(cum_pi, rng.random())
    if a == b:
        return 0.0
    visited = (bytearray(n), bytearray(n))
    visited[0][a] = 1
    visited[1][b] = 1
    pos = [a, b]
    clocks = [rng.expovariate(1.0), rng.expovariate(1.0)]
    while True:
        w = 0 if clocks[0] <= clocks[1] else 1
        t = clocks[w]
        if t > max_time:
            return None
        z = bisect(cum_rows[pos[w]], rng.random())
        pos[w] = z
        if visited[1 - w][z]:
            return t
        visited[w][z] = 1
        clocks[w] = t + rng.expovariate(1.0)


def _run_growth(cum_rows, cum_pi, gamma, times, max_particles, seed):
    """Particle counts of one replicate at the sorted query times."""
    rng = Random(seed)
    positions = [bisect(cum_pi, rng.random())]
    total = 1.0 + gamma
    jump_p = 1.0 / total
    heap = [(rng.expovariate(total), 0)]
    counts = []
    qi = 0
    while qi < len(times):
        t, p = heappop(heap)
        while qi < len(times) and times[qi] < t:
            counts.append(len(positions))
            qi += 1
        if qi >= len(times):
            break
        if rng.random() < jump_p:
            positions[p] = bisect(cum_rows[positions[p]], rng.random())
        else:
            if len(positions) >= max_particles:
                counts.extend([len(positions)] * (len(times) - qi))
                return counts
            positions.append(positions[p])
            heappush(heap, (t + rng.expovariate(total), len(positions) - 1))
        heappush(heap, (t + rng.expovariate(total), p))
    return counts


# The pool entry points need flat, picklable signatures; one per kind keeps
# them simple.

def _hit_batch(args):
    cum_rows, cum_pi, gamma, target, max_particles, max_time, master_seed, \
        r0, r1, initial_state = args
    return [_run_hit(cum_rows, cum_pi, gamma, target, max_particles, max_time,
                     replicate_seed(master_seed, r), initial_state)
            for r in range(r0, r1)]


def _intersection_batch(args):
    cum_rows, cum_pi, gamma, n, max_particles, max_time, master_seed, \
        r0, r1, initial_states = args
    return [_run_intersection(cum_rows, cum_pi, gamma, n, max_particles,
                              max_time, replicate_seed(master_seed, r),
                              initial_states)
            for r in range(r0, r1)]


def _plain_batch(args):
    cum_rows, cum_pi, n, max_time, master_seed, r0, r1, initial_states = args
    return [_run_plain(cum_rows, cum_pi, n, max_time,
                       replicate_seed(master_seed, r), initial_states)
            for r in range(r0, r1)]


def _chunk_bounds(replicates, chunks):
    edges = np.linspace(0, replicates, num=chunks + 1, dtype=int)
    return [(int(edges[i]), int(edges[i + 1])) for i in range(chunks)
            if edges[i] < edges[i + 1]]


def _map_batches(batch_fn, arg_lists, threads):
    if threads <= 1 or len(arg_lists) == 1:
        chunks = [batch_fn(a) for a in arg_lists]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(batch_fn, arg_lists))
    out = []
    for c in chunks:
        out.extend(c)
    return out


def _estimate(times, target) -> BRWEstimate:
    hits = [t for t in times if t is not None]
    censored = len(times) - len(hits)
    if not hits:
        raise AllCensored(f"all {len(times)} replicates censored for {target}")
    arr = np.array(hits)
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return BRWEstimate(mean=float(arr.mean()), stderr=stderr,
                       replicates_used=arr.size,
                       censor_rate=censored / len(times), target=target)


# ---------------------------------------------------------------------------
# public estimators

def simulate_hit(kernel: TransitionKernel, x: int, cfg: BRWConfig,
                 initial_state: int | None = None) -> BRWEstimate:
    """Estimate the expected first time any particle reaches x.

    The initial particle is drawn from pi unless initial_state pins it
    (the conditioning hook used by tests).  Replicates that hit a particle
    or time cap are censored out of the mean and disclosed in censor_rate.
    """
    if not (0 <= x < kernel.n):
        raise InvalidSpec(f"state {x} outside 0..{kernel.n - 1}")
    cfg = resolve_config(kernel, cfg)
    common = (_cum_rows(kernel.P), _cum_pi(kernel.pi), cfg.gamma, int(x),
              cfg.max_particles, cfg.max_time, cfg.master_seed)
    args = [common + (r0, r1, initial_state)
            for r0, r1 in _chunk_bounds(cfg.replicates, _n_chunks(cfg))]
    times = _map_batches(_hit_batch, args, cfg.threads)
    return _estimate(times, f"hit(x={x})")


def simulate_intersection(kernel: TransitionKernel, cfg: BRWConfig,
                          initial_states: tuple[int, int] | None = None
                          ) -> BRWEstimate:
    """Estimate the expected first time one branching cloud touches a state
    the other cloud has already visited (time 0 included)."""
    cfg = resolve_config(kernel, cfg)
    common = (_cum_rows(kernel.P), _cum_pi(kernel.pi), cfg.gamma, kernel.n,
              cfg.max_particles, cfg.max_time, cfg.master_seed)
    args = [common + (r0, r1, initial_states)
            for r0, r1 in _chunk_bounds(cfg.replicates, _n_chunks(cfg))]
    times = _map_batches(_intersection_batch, args, cfg.threads)
    return _estimate(times, "intersection")


def plain_intersection(kernel: TransitionKernel, cfg: BRWConfig,
                       initial_states: tuple[int, int] | None = None
                       ) -> BRWEstimate:
    """Intersection time of two plain (non-branching) rate-1 walks from pi."""
    cfg = resolve_config(kernel, cfg)
    common = (_cum_rows(kernel.P), _cum_pi(kernel.pi), kernel.n,
              cfg.max_time, cfg.master_seed)
    args = [common + (r0, r1, initial_states)
            for r0, r1 in _chunk_bounds(cfg.replicates, _n_chunks(cfg))]
    times = _map_batches(_plain_batch, args, cfg.threads)
    return _estimate(times, "plain_intersection")


def _n_chunks(cfg: BRWConfig) -> int:
    if cfg.threads <= 1:
        return 1
    return min(cfg.replicates, 4 * cfg.threads)


def growth_curve(kernel: TransitionKernel, cfg: BRWConfig,
                 times) -> tuple[np.ndarray, np.ndarray]:
    """Mean particle count and its standard error at each query time."""
    cfg = resolve_config(kernel, cfg)
    times = sorted(float(t) for t in times)
    cum_rows, cum_pi = _cum_rows(kernel.P), _cum_pi(kernel.pi)
    counts = np.array([
        _run_growth(cum_rows, cum_pi, cfg.gamma, times, cfg.max_particles,
                    replicate_seed(cfg.master_seed, r))
        for r in range(cfg.replicates)
    ], dtype=float)
    mean = counts.mean(axis=0)
    stderr = counts.std(axis=0, ddof=1) / math.sqrt(cfg.replicates)
    return mean, stderr


# ---------------------------------------------------------------------------
# sandwich experiments across family sequences

# Frozen acceptance bands, keyed by family.  Produced once by
# demos/calibrate_bands.py: 10x replicates (20000, master_seed=7), observed
# per-size ratio ranges widened by 50 percent on each side; never refit in
# tests.  hit bands: (c_lo on estimate/J, C_hi on estimate/(t_tv + J)).
HIT_BANDS = {
    "torus": (0.6470, 1.0807),
    "cycle": (0.6415, 0.9010),
    "complete": (0.6115, 1.0525),
    "hypercube": (0.6467, 1.1229),
}
# intersection bands: (c_lo, C_hi) on estimate / (t_rel log(1 + sqrt(Q)/t_rel)).
INTERSECT_BANDS = {
    "torus": (0.5564, 1.3751),
    "hypercube": (0.5570, 1.5427),
    "complete": (0.5116, 1.3826),
}
SLOPE_TOL = 0.25
CENSOR_LIMIT = 0.01
RHO_MIN_FACTOR = 0.5  # lower-band row applies when rho_min >= this * t_rel^2


@dataclass(frozen=True)
class SandwichRow:
    label: str
    size: int
    n: int
    estimate: float
    stderr: float
    censor_rate: float
    reference: float
    ratio: float
    upper_ratio: float
    lower_ratio: float | None
    upper_ok: bool
    lower_ok: bool
    lower_skipped: bool


@dataclass(frozen=True)
class SandwichResult:
    family: str
    target: str
    rows: tuple
    c_lo: float
    c_hi: float
    slope: float
    slope_ok: bool

    @property
    def passed(self) -> bool:
        rows_ok = all(r.upper_ok and (r.lower_ok or r.lower_skipped)
                      and r.censor_rate <= CENSOR_LIMIT for r in self.rows)
        return rows_ok and self.slope_ok


def _size_param(spec: ChainFamilySpec) -> int:
    key = {"torus": "m", "hypercube": "d"}.get(spec.family, "n")
    return int(spec.params[key])


def _fit_slope(ns, ratios):
    xs = np.log(np.array(ns, dtype=float))
    ys = np.log(np.array(ratios, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


def hit_time_sandwich(specs, cfg: BRWConfig, band=None) -> SandwichResult:
    """Two-sided order check of the worst-state expected BRW hitting time.

    Per size: estimate E[first hit of the state hardest to reach from
    stationarity] and compare with J = t_rel log(1 + t_pi / t_rel): the
    estimate must stay below C_hi * (t_tv + J) and above c_lo * J, and the
    ratio estimate/J must show no size trend (log-log slope within 0.25).
    On transitive families every state is equivalent, so one state
    suffices.
    """
    if len(specs) < 3:
        raise ValueError("need at least 3 sizes")
    family = specs[0].family
    if band is None:
        if family not in HIT_BANDS:
            raise InvalidSpec(f"no frozen band for family {family!r}; pass one")
        band = HIT_BANDS[family]
    c_lo, c_hi = band
    rows = []
    for spec in specs:
        if spec.family != family:
            raise ValueError("mixed families in one sandwich")
        kernel = build_family(spec)
        decomp = decompose(kernel)
        summary = hit_times(kernel)
        x = int(np.argmax(summary.t_pi_to))
        t_rel = decomp.t_rel
        j_ref = t_rel * math.log1p(summary.t_pi_to[x] / t_rel)
        t_tv = MixingProfile(kernel, decomp).mixing_time("tv", 0.25)
        run_cfg = replace(cfg, gamma=cfg.gamma if cfg.gamma is not None else decomp.gap,
                          max_time=cfg.max_time if cfg.max_time is not None
                          else 50.0 * t_rel * math.log1p(summary.t_hit / t_rel))
        est = simulate_hit(kernel, x, run_cfg)
        upper = est.mean / (t_tv + j_ref)
        lower = est.mean / j_ref
        rows.append(SandwichRow(
            label=kernel.label, size=_size_param(spec), n=kernel.n,
            estimate=est.mean, stderr=est.stderr, censor_rate=est.censor_rate,
            reference=j_ref, ratio=lower, upper_ratio=upper, lower_ratio=lower,
            upper_ok=upper <= c_hi, lower_ok=lower >= c_lo, lower_skipped=False))
    slope = _fit_slope([r.n for r in rows], [r.ratio for r in rows])
    return SandwichResult(family=family, target="hit", rows=tuple(rows),
                          c_lo=c_lo, c_hi=c_hi, slope=slope,
                          slope_ok=abs(slope) <= SLOPE_TOL)


def intersection_sandwich(specs, cfg: BRWConfig, band=None,
                          rho_min_factor: float = RHO_MIN_FACTOR) -> SandwichResult:
    """Two-sided order check of the expected intersection time of two BRWs.

    Per size the reference is t_rel log(1 + sqrt(Q)/t_rel) with Q the
    order-2 spectral moment.  The lower band row is skipped (and marked)
    when the minimal windowed order-2 moment falls under
    rho_min_factor * t_rel^2, mirroring the indicator in the lower bound.
    Transitive families only.
    """
    if len(specs) < 3:
        raise ValueError("need at least 3 sizes")
    family = specs[0].family
    if not build_family(specs[0]).transitive:
        raise InvalidSpec("intersection sandwich expects a transitive family")
    if band is None:
        if family not in INTERSECT_BANDS:
            raise InvalidSpec(f"no frozen band for family {family!r}; pass one")
        band = INTERSECT_BANDS[family]
    c_lo, c_hi = band
    rows = []
    for spec in specs:
        if spec.family != family:
            raise ValueError("mixed families in one sandwich")
        kernel = build_family(spec)
        decomp = decompose(kernel)
        t_rel = decomp.t_rel
        q2 = spectral_moment(decomp, 2)
        rho = heat_moment_windowed_all(decomp, 2)
        rho_min = float(rho.min())
        reference = t_rel * math.log1p(math.sqrt(q2) / t_rel)
        run_cfg = replace(cfg, gamma=cfg.gamma if cfg.gamma is not None else decomp.gap,
                          max_time=cfg.max_time if cfg.max_time is not None
                          else 50.0 * t_rel * math.log1p(
                              hit_times(kernel).t_hit / t_rel))
        est = simulate_intersection(kernel, run_cfg)
        ratio = est.mean / reference
        skip_lower = rho_min < rho_min_factor * t_rel**2
        rows.append(SandwichRow(
            label=kernel.label, size=_size_param(spec), n=kernel.n,
            estimate=est.mean, stderr=est.stderr, censor_rate=est.censor_rate,
            reference=reference, ratio=ratio, upper_ratio=ratio,
            lower_ratio=None if skip_lower else ratio,
            upper_ok=ratio <= c_hi,
            lower_ok=skip_lower or ratio >= c_lo,
            lower_skipped=skip_lower))
    slope = _fit_slope([r.n for r in rows], [r.ratio for r in rows])
    return SandwichResult(family=family, target="intersection", rows=tuple(rows),
                          c_lo=c_lo, c_hi=c_hi, slope=slope,
                          slope_ok=abs(slope) <= SLOPE_TOL)
