"""Regenerate the frozen Monte Carlo bands used by the sandwich checks.

Protocol: run every sandwich fixture at 10x the acceptance replicate count
(20000 per size, master_seed=7), record the observed min/max of each ratio
across sizes, widen by 50 percent on each side (divide the low edge by 1.5,
multiply the high edge by 1.5), and round outward.  The resulting constants
are committed into mixbound/brw.py (HIT_BANDS, INTERSECT_BANDS) and into
tests/test_acceptance.py for the scalar fixtures; tests never refit them.

This script is a regeneration tool, not part of the test suite.  Expect a
few minutes of runtime.
"""

import math
import os
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from mixbound import brw, chains, hitting, spectral
from mixbound.mixing import MixingProfile

REPLICATES = 20000
SEED = 7
THREADS = max(1, (os.cpu_count() or 1))


def cfg():
    return brw.BRWConfig(replicates=REPLICATES, master_seed=SEED, threads=THREADS)


def widen(lo, hi):
    return lo / 1.5, hi * 1.5


def calibrate_hit(family_name, specs):
    lows, highs = [], []
    for spec in specs:
        kernel = chains.build_family(spec)
        decomp = spectral.decompose(kernel)
        summary = hitting.hit_times(kernel)
        x = int(np.argmax(summary.t_pi_to))
        t_rel = decomp.t_rel
        j_ref = t_rel * math.log1p(summary.t_pi_to[x] / t_rel)
        t_tv = MixingProfile(kernel, decomp).mixing_time("tv", 0.25)
        est = brw.simulate_hit(kernel, x, cfg())
        lows.append(est.mean / j_ref)
        highs.append(est.mean / (t_tv + j_ref))
        print(f"  {kernel.label}: est={est.mean:.4f}+-{est.stderr:.4f} "
              f"J={j_ref:.4f} t_tv={t_tv:.4f} lower={lows[-1]:.4f} "
              f"upper={highs[-1]:.4f} censor={est.censor_rate:.4%}")
    lo, hi = widen(min(lows), max(highs))
    print(f"  -> HIT_BANDS[{family_name!r}] = ({lo:.4f}, {hi:.4f})")
    return lo, hi


def calibrate_intersection(family_name, specs):
    ratios = []
    for spec in specs:
        kernel = chains.build_family(spec)
        decomp = spectral.decompose(kernel)
        q2 = spectral.spectral_moment(decomp, 2)
        reference = decomp.t_rel * math.log1p(math.sqrt(q2) / decomp.t_rel)
        est = brw.simulate_intersection(kernel, cfg())
        ratios.append(est.mean / reference)
        print(f"  {kernel.label}: est={est.mean:.4f}+-{est.stderr:.4f} "
              f"ref={reference:.4f} ratio={ratios[-1]:.4f} "
              f"censor={est.censor_rate:.4%}")
    lo, hi = widen(min(ratios), max(ratios))
    print(f"  -> INTERSECT_BANDS[{family_name!r}] = ({lo:.4f}, {hi:.4f})")
    return lo, hi


def calibrate_scalar_hit(spec):
    kernel = chains.build_family(spec)
    decomp = spectral.decompose(kernel)
    summary = hitting.hit_times(kernel)
    ref = decomp.t_rel * math.log1p(summary.t_hit / decomp.t_rel)
    est = brw.simulate_hit(kernel, int(np.argmax(summary.t_pi_to)), cfg())
    lo, hi = widen(est.mean / ref, est.mean / ref)
    print(f"  {kernel.label} hit vs t_rel*log(1+t_hit/t_rel): "
          f"ratio={est.mean / ref:.4f} -> band ({lo:.4f}, {hi:.4f})")
    return lo, hi


def calibrate_plain(family_name, specs):
    ratios = []
    for spec in specs:
        kernel = chains.build_family(spec)
        decomp = spectral.decompose(kernel)
        root_q = math.sqrt(spectral.spectral_moment(decomp, 2))
        est = brw.plain_intersection(kernel, cfg())
        ratios.append(est.mean / root_q)
        print(f"  {kernel.label}: plain={est.mean:.4f}+-{est.stderr:.4f} "
              f"sqrtQ={root_q:.4f} ratio={ratios[-1]:.4f} "
              f"censor={est.censor_rate:.4%}")
    lo, hi = widen(min(ratios), max(ratios))
    print(f"  -> plain band {family_name!r} = ({lo:.4f}, {hi:.4f})")
    return lo, hi


def main():
    print(f"calibration: {REPLICATES} replicates, master_seed={SEED}, "
          f"threads={THREADS}")
    print("hit sandwiches:")
    calibrate_hit("torus", [chains.torus_spec(2, m) for m in (4, 8, 12)])
    calibrate_hit("cycle", [chains.cycle_spec(n) for n in (16, 32, 64)])
    calibrate_hit("complete", [chains.complete_spec(n) for n in (8, 16, 32)])
    calibrate_hit("hypercube", [chains.hypercube_spec(d) for d in (4, 6, 8)])
    print("intersection sandwiches:")
    calibrate_intersection("torus", [chains.torus_spec(2, m) for m in (4, 8, 12)])
    calibrate_intersection("hypercube", [chains.hypercube_spec(d) for d in (4, 6, 8)])
    calibrate_intersection("complete", [chains.complete_spec(n) for n in (8, 16, 32)])
    print("scalar fixtures:")
    calibrate_scalar_hit(chains.cycle_spec(64))
    calibrate_plain("complete", [chains.complete_spec(n) for n in (8, 16, 32)])
    calibrate_plain("torus", [chains.torus_spec(2, m) for m in (4, 8, 16)])


if __name__ == "__main__":
    main()
