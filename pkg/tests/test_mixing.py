import math

import numpy as np
import pytest

from mixbound import chains, hitting, mixing, spectral
from mixbound.errors import BadEps

from conftest import SMALL_BENCHMARK_SPECS, random_kernels


def _profile(spec):
    kernel = chains.build_family(spec)
    decomp = spectral.decompose(kernel)
    return kernel, decomp, mixing.MixingProfile(kernel, decomp)


# ---------------------------------------------------------------------------
# mixing times

def test_complete4_uniform_mixing_time():
    # solve 3 exp(-4t/3) = 1/2
    _, _, prof = _profile(chains.complete_spec(4))
    assert prof.mixing_time("linf", 0.5) == pytest.approx(0.75 * math.log(6), rel=1e-12)


def test_complete4_average_l2_mixing_time():
    # solve 3 exp(-8t/3) = 1/4
    _, _, prof = _profile(chains.complete_spec(4))
    assert prof.mixing_time("ave_l2", 0.5) == pytest.approx(
        (3 / 8) * math.log(12), rel=1e-12)


def test_threshold_met_at_zero():
    _, _, prof = _profile(chains.complete_spec(4))
    eps0 = prof.linf_distance(0.0)  # threshold equal to the t=0 value
    assert prof.mixing_time("linf", eps0) == 0.0


def test_bad_eps_rejected():
    _, _, prof = _profile(chains.complete_spec(4))
    with pytest.raises(BadEps):
        prof.mixing_time("linf", 0.0)
    with pytest.raises(BadEps):
        prof.mixing_time("tv", -1.0)


def test_two_state_l2_closed_form():
    kernel = chains.kernel_from_matrix(np.array([[0.5, 0.5], [0.5, 0.5]]))
    prof = mixing.MixingProfile(kernel, spectral.decompose(kernel))
    # d_{2,x}(t)^2 = exp(-2t); crossing eps^2 at t = log(1/eps)
    assert prof.mixing_time("l2x", 0.5, x=0) == pytest.approx(math.log(2), rel=1e-12)


# ---------------------------------------------------------------------------
# TV distance

def test_tv_at_zero_complete4():
    kernel, decomp, _ = _profile(chains.complete_spec(4))
    assert mixing.d_tv(kernel, decomp, 0, 0.0) == pytest.approx(1.5, abs=1e-12)


def test_tv_closed_form_complete4():
    kernel, decomp, _ = _profile(chains.complete_spec(4))
    for t in (0.25, 1.0, 2.0):
        assert mixing.d_tv(kernel, decomp, 0, t) == pytest.approx(
            1.5 * math.exp(-4 * t / 3), rel=1e-10)


def test_tv_vanishes_at_large_time():
    kernel, decomp, _ = _profile(chains.torus_spec(2, 4))
    assert mixing.d_tv(kernel, decomp, 3, 1e6) < 1e-9


def test_tv_worst_matches_scan_on_nontransitive():
    kernel, decomp, prof = _profile(chains.dlp_spec(8, 0.5, 0.1))
    for t in (0.5, 2.0, 10.0):
        scan = max(mixing.d_tv(kernel, decomp, x, t) for x in range(kernel.n))
        assert prof.tv_worst(t) == pytest.approx(scan, rel=1e-12)


# ---------------------------------------------------------------------------
# profile structure

@pytest.mark.parametrize("spec", SMALL_BENCHMARK_SPECS, ids=lambda s: s.label())
def test_profiles_nonincreasing(spec):
    _, decomp, prof = _profile(spec)
    grid = np.geomspace(0.01, 40.0, 20) * decomp.t_rel
    for fn in (prof.linf_distance, prof.tv_worst, prof.ave_l2_sq,
               lambda t: prof.l2_distance(0, t)):
        vals = [fn(t) for t in grid]
        assert all(a >= b - 1e-10 for a, b in zip(vals, vals[1:]))


def test_distance_hierarchy_pointwise():
    # d_1 <= d_2 (Cauchy-Schwarz in pi) and d_2^2 <= d_inf at half time.
    # d_2^2 is computed as (heat ratio - 1), which is unrepresentable below
    # ~1e-16 next to 1.0; points under that floor are skipped.
    for spec in (chains.cycle_spec(8), chains.dlp_spec(8, 0.5, 0.1)):
        kernel, decomp, prof = _profile(spec)
        for t in np.geomspace(0.05, 20.0, 10) * decomp.t_rel:
            for x in range(kernel.n):
                d2_sq = prof.l2_distance_sq(x, t)
                if d2_sq <= 1e-13:
                    continue
                assert prof.tv_distance(x, t) <= d2_sq**0.5 + 1e-10
            dinf = prof.linf_distance(2 * t)
            if dinf > 1e-13:
                assert max(prof.l2_distance_sq(x, t) for x in range(kernel.n)) \
                    <= dinf + 1e-10 * (1.0 + dinf)


def test_l2_vector_matches_scalar_solves():
    kernel, decomp, prof = _profile(chains.dlp_spec(10, 0.5, 0.1))
    vec = prof.l2_mixing_times(0.5)
    for x in range(kernel.n):
        assert vec[x] == pytest.approx(prof.mixing_time("l2x", 0.5, x=x),
                                       abs=1e-10 * (1 + decomp.t_rel))


def test_l2_linf_factor_two_identity_random_pairs():
    rng = np.random.default_rng(11)
    for kernel in random_kernels(10, max_n=12, seed=99):
        decomp = spectral.decompose(kernel)
        prof = mixing.MixingProfile(kernel, decomp)
        for _ in range(2):
            eps = float(rng.uniform(0.1, 0.9))
            t2 = prof.worst_l2_mixing_time(eps)
            tinf = prof.mixing_time("linf", eps * eps)
            assert abs(t2 - 0.5 * tinf) <= 1e-8 * (1 + t2)
            x = int(rng.integers(kernel.n))
            tx = prof.mixing_time("l2x", eps, x=x)
            crossing = prof.l2_distance(x, tx)
            assert crossing <= eps + 1e-9


def test_average_l2_two_formulations_agree():
    # sum_x pi(x) d_{2,x}(t)^2 crossing vs the eigenvalue-sum crossing
    for spec in (chains.cycle_spec(8), chains.dlp_spec(8, 0.5, 0.1)):
        kernel, decomp, prof = _profile(spec)
        eps = 0.5

        def weighted(t):
            return float(kernel.pi @ np.array(
                [prof.l2_distance_sq(x, t) for x in range(kernel.n)]))

        t_spec = prof.mixing_time("ave_l2", eps)
        t_weight = mixing._first_crossing(weighted, eps * eps, 10 * decomp.t_rel)
        assert abs(t_spec - t_weight) <= 1e-9 * (1 + t_spec)


# ---------------------------------------------------------------------------
# hierarchy chain

@pytest.mark.parametrize("spec,eps", [
    (chains.complete_spec(4), 0.5),
    (chains.cycle_spec(16), 0.5),
    (chains.torus_spec(2, 8), 0.25),
    (chains.dlp_spec(12, 0.5, 0.1), 0.5),
])
def test_hierarchy_links_hold(spec, eps):
    kernel = chains.build_family(spec)
    decomp = spectral.decompose(kernel)
    summary = hitting.hit_times(kernel)
    reports = mixing.hierarchy_check(kernel, decomp, eps, summary)
    assert len(reports) == 5
    for r in reports:
        assert r.passed, str(r)


def test_hierarchy_identity_is_tight():
    kernel = chains.build_family(chains.complete_spec(4))
    decomp = spectral.decompose(kernel)
    summary = hitting.hit_times(kernel)
    reports = {r.name: r for r in mixing.hierarchy_check(kernel, decomp, 0.5, summary)}
    assert reports["l2_linf_identity"].lhs <= 1e-10


def test_hierarchy_rejects_eps_one():
    kernel = chains.build_family(chains.complete_spec(4))
    decomp = spectral.decompose(kernel)
    summary = hitting.hit_times(kernel)
    with pytest.raises(BadEps):
        mixing.hierarchy_check(kernel, decomp, 1.0, summary)
