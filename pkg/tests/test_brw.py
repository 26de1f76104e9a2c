import math

import pytest

from mixbound import brw, brw_reference, chains, hitting, spectral
from mixbound.errors import AllCensored, InvalidSpec


@pytest.fixture(scope="module")
def complete4():
    return chains.build_family(chains.complete_spec(4))


@pytest.fixture(scope="module")
def cycle8():
    return chains.build_family(chains.cycle_spec(8))


def pooled_gap(a, b):
    return abs(a.mean - b.mean) / math.hypot(a.stderr, b.stderr)


# ---------------------------------------------------------------------------
# determinism and conventions

def test_bit_identical_reruns(complete4):
    cfg = brw.BRWConfig(replicates=500, master_seed=42)
    assert brw.simulate_hit(complete4, 1, cfg) == brw.simulate_hit(complete4, 1, cfg)
    assert brw.simulate_intersection(complete4, cfg) == \
        brw.simulate_intersection(complete4, cfg)
    assert brw.plain_intersection(complete4, cfg) == \
        brw.plain_intersection(complete4, cfg)


def test_different_seeds_differ(complete4):
    a = brw.simulate_hit(complete4, 1, brw.BRWConfig(replicates=500, master_seed=1))
    b = brw.simulate_hit(complete4, 1, brw.BRWConfig(replicates=500, master_seed=2))
    assert a.mean != b.mean


def test_worker_count_does_not_change_results(complete4):
    serial = brw.simulate_hit(complete4, 0, brw.BRWConfig(replicates=400, master_seed=5))
    pooled = brw.simulate_hit(complete4, 0,
                              brw.BRWConfig(replicates=400, master_seed=5, threads=3))
    assert serial == pooled


def test_hit_at_time_zero_when_started_on_target(complete4):
    est = brw.simulate_hit(complete4, 2, brw.BRWConfig(replicates=20, master_seed=9),
                           initial_state=2)
    assert est.mean == 0.0 and est.stderr == 0.0 and est.censor_rate == 0.0


def test_intersection_at_time_zero_when_same_start(complete4):
    est = brw.simulate_intersection(
        complete4, brw.BRWConfig(replicates=20, master_seed=9),
        initial_states=(1, 1))
    assert est.mean == 0.0
    plain = brw.plain_intersection(
        complete4, brw.BRWConfig(replicates=20, master_seed=9),
        initial_states=(3, 3))
    assert plain.mean == 0.0


def test_invalid_target_rejected(complete4):
    with pytest.raises(InvalidSpec):
        brw.simulate_hit(complete4, 7, brw.BRWConfig(replicates=10))


def test_config_validation():
    with pytest.raises(InvalidSpec):
        brw.BRWConfig(replicates=0)
    with pytest.raises(InvalidSpec):
        brw.BRWConfig(gamma=-1.0)
    with pytest.raises(InvalidSpec):
        brw.BRWConfig(max_time=0.0)


def test_replicate_seed_mixing_spreads():
    seeds = {brw.replicate_seed(7, r) for r in range(1000)}
    assert len(seeds) == 1000
    assert brw.replicate_seed(7, 3) != brw.replicate_seed(8, 3)
    assert brw.replicate_seed(7, 3) != brw.replicate_seed(7, 3, salt=1)


# ---------------------------------------------------------------------------
# censoring

def test_all_censored_raises(cycle8):
    # pinned distinct starts so no replicate can score a time-zero event
    cfg = brw.BRWConfig(replicates=30, master_seed=3, max_time=1e-9)
    with pytest.raises(AllCensored):
        brw.simulate_hit(cycle8, 3, cfg, initial_state=0)
    with pytest.raises(AllCensored):
        brw.simulate_intersection(cycle8, cfg, initial_states=(0, 4))
    with pytest.raises(AllCensored):
        brw.plain_intersection(cycle8, cfg, initial_states=(0, 4))


def test_partial_censoring_disclosed(cycle8):
    # a cap near the typical hit time censors some but not all replicates
    probe = brw.simulate_hit(cycle8, 4, brw.BRWConfig(replicates=400, master_seed=11))
    cfg = brw.BRWConfig(replicates=400, master_seed=11, max_time=probe.mean)
    est = brw.simulate_hit(cycle8, 4, cfg)
    assert 0.0 < est.censor_rate < 1.0
    assert est.replicates_used == round(400 * (1 - est.censor_rate))


def test_default_caps_keep_censoring_negligible(cycle8):
    est = brw.simulate_hit(cycle8, 0, brw.BRWConfig(replicates=800, master_seed=13))
    assert est.censor_rate <= 0.01


# ---------------------------------------------------------------------------
# distributional checks

def test_growth_matches_exponential(complete4):
    # binary splitting at rate gamma: expected count e^{gamma t}
    cfg = brw.BRWConfig(replicates=4000, master_seed=17)
    times = [0.5, 1.0, 2.0]
    mean, stderr = brw.growth_curve(complete4, cfg, times)
    gamma = 4.0 / 3.0
    for m, se, t in zip(mean, stderr, times):
        assert abs(m - math.exp(gamma * t)) <= 3.0 * se


def test_first_particle_bounds_hit_time(cycle8):
    # the first particle alone yields E[hit] <= expected hit time from pi
    summary = hitting.hit_times(cycle8)
    est = brw.simulate_hit(cycle8, 2, brw.BRWConfig(replicates=2000, master_seed=23))
    assert est.mean <= summary.t_pi_to[2] + 3.0 * est.stderr


def test_intersection_faster_than_hit(cycle8):
    cfg = brw.BRWConfig(replicates=1500, master_seed=29)
    hit = brw.simulate_hit(cycle8, 0, cfg)
    inter = brw.simulate_intersection(cycle8, cfg)
    assert inter.mean <= 2.0 * hit.mean + 3.0 * math.hypot(inter.stderr, hit.stderr)


def test_engines_agree_quickly(complete4, cycle8):
    cfg = brw.BRWConfig(replicates=3000, master_seed=31)
    for kernel in (complete4, cycle8):
        x = kernel.n // 2
        assert pooled_gap(brw.simulate_hit(kernel, x, cfg),
                          brw_reference.simulate_hit_reference(kernel, x, cfg)) <= 3.0
        assert pooled_gap(brw.simulate_intersection(kernel, cfg),
                          brw_reference.simulate_intersection_reference(kernel, cfg)) <= 3.0


def test_plain_intersection_tracks_sqrt_moment():
    # transitive case: expected plain intersection time is of order sqrt(Q)
    cfg = brw.BRWConfig(replicates=1500, master_seed=37)
    ratios = []
    for n in (8, 16, 32):
        kernel = chains.build_family(chains.complete_spec(n))
        decomp = spectral.decompose(kernel)
        est = brw.plain_intersection(kernel, cfg)
        root_q = math.sqrt(spectral.spectral_moment(decomp, 2))
        assert root_q == pytest.approx(math.sqrt(n - 1) * (n - 1) / n, rel=1e-12)
        ratios.append(est.mean / root_q)
    assert max(ratios) / min(ratios) < 2.0


# ---------------------------------------------------------------------------
# sandwich plumbing (full-scale runs live in the acceptance suite)

def test_hit_sandwich_structure():
    specs = [chains.complete_spec(n) for n in (4, 8, 16)]
    result = brw.hit_time_sandwich(specs, brw.BRWConfig(replicates=400, master_seed=7))
    assert len(result.rows) == 3
    assert result.family == "complete"
    assert all(r.censor_rate <= 0.01 for r in result.rows)
    assert result.passed, result


def test_intersection_sandwich_structure():
    specs = [chains.complete_spec(n) for n in (4, 8, 16)]
    result = brw.intersection_sandwich(specs,
                                       brw.BRWConfig(replicates=400, master_seed=7))
    assert len(result.rows) == 3
    assert result.passed, result


def test_sandwich_rejects_short_sequences():
    with pytest.raises(ValueError):
        brw.hit_time_sandwich([chains.cycle_spec(8)], brw.BRWConfig(replicates=10))


def test_intersection_sandwich_rejects_nontransitive():
    specs = [chains.dlp_spec(n, 0.5, 0.1) for n in (4, 6, 8)]
    with pytest.raises(InvalidSpec):
        brw.intersection_sandwich(specs, brw.BRWConfig(replicates=10, master_seed=1))


def test_band_failure_detected():
    specs = [chains.complete_spec(n) for n in (4, 8, 16)]
    result = brw.hit_time_sandwich(specs, brw.BRWConfig(replicates=400, master_seed=7),
                                   band=(totally_off := 50.0, 100.0))
    assert not result.passed
    assert totally_off == 50.0
