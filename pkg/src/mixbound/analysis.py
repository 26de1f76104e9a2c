"""One-stop bundle of the exact quantities derived from a kernel."""

from __future__ import annotations

from dataclasses import dataclass

from .chains import ChainFamilySpec, TransitionKernel, build_family
from .hitting import HittingSummary, hit_times
from .mixing import MixingProfile
from .spectral import SpectralDecomposition, decompose, spectral_moment


@dataclass
class ChainAnalysis:
    """Kernel plus its decomposition, hitting summary and mixing profile."""

    kernel: TransitionKernel
    decomp: SpectralDecomposition
    hitting: HittingSummary
    profile: MixingProfile

    @classmethod
    def from_kernel(cls, kernel: TransitionKernel) -> "ChainAnalysis":
        decomp = decompose(kernel)
        return cls(kernel=kernel, decomp=decomp, hitting=hit_times(kernel),
                   profile=MixingProfile(kernel, decomp))

    @classmethod
    def from_spec(cls, spec: ChainFamilySpec) -> "ChainAnalysis":
        return cls.from_kernel(build_family(spec))

    def summary(self) -> dict:
        """Headline scalars; the CLI analyze output in dict form."""
        d, h, p = self.decomp, self.hitting, self.profile
        out = {
            "n": self.kernel.n,
            "gap": d.gap,
            "t_rel": d.t_rel,
            "t_hit": h.t_hit,
            "t_target": h.t_target,
            "t_pi_max": float(h.t_pi_to.max()),
            "t_pi_min": float(h.t_pi_to.min()),
        }
        for ell in (1, 2, 3, 4):
            out[f"q{ell}"] = spectral_moment(d, ell)
        out["t_mix_linf"] = p.mixing_time("linf", 0.5)
        out["t_mix_tv"] = p.mixing_time("tv", 0.25)
        out["t_mix_ave_l2"] = p.mixing_time("ave_l2", 0.5)
        return out
