import sys
from pathlib import Path

import numpy as np
import pytest

SRC = Path(__file__).resolve().parents[1] / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from mixbound import chains  # noqa: E402
from mixbound.analysis import ChainAnalysis  # noqa: E402

# Canonical benchmark set: every built-in family, state counts up to 1024.
BENCHMARK_SPECS = [
    chains.cycle_spec(4),
    chains.cycle_spec(16),
    chains.cycle_spec(64),
    chains.cycle_spec(256),
    chains.cycle_spec(1024),
    chains.torus_spec(2, 4),
    chains.torus_spec(2, 8),
    chains.torus_spec(2, 16),
    chains.torus_spec(3, 6),
    chains.complete_spec(4),
    chains.complete_spec(8),
    chains.complete_spec(16),
    chains.complete_spec(32),
    chains.hypercube_spec(4),
    chains.hypercube_spec(6),
    chains.hypercube_spec(8),
    chains.hypercube_spec(10),
    chains.dlp_spec(16, 0.5, 0.05),
    chains.dlp_spec(50, 0.5, 0.01),
    chains.dlp_spec(32, 0.4, 0.05, k=16),
]

# Smaller subset for the heavier per-test sweeps.
SMALL_BENCHMARK_SPECS = [s for s in BENCHMARK_SPECS
                         if chains.build_family(s).n <= 256]


def random_kernels(count, max_n=20, seed=20240) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(2, max_n + 1))
        out.append(chains.random_reversible_kernel(
            n, rng, label=f"random(n={n},i={i})"))
    return out


@pytest.fixture(scope="session")
def analysis_cache():
    """Memoized ChainAnalysis per kernel label, shared across the session."""
    cache = {}

    def get(spec_or_kernel):
        if isinstance(spec_or_kernel, chains.ChainFamilySpec):
            kernel = chains.build_family(spec_or_kernel)
        else:
            kernel = spec_or_kernel
        if kernel.label not in cache:
            cache[kernel.label] = ChainAnalysis.from_kernel(kernel)
        return cache[kernel.label]

    return get


@pytest.fixture(scope="session")
def benchmark_analyses(analysis_cache):
    return [analysis_cache(spec) for spec in BENCHMARK_SPECS]


@pytest.fixture(scope="session")
def random_kernel_analyses(analysis_cache):
    return [analysis_cache(k) for k in random_kernels(100)]
