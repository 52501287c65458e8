"""Shared-codebook Gaussian channel across two environments.

The received signal is y_i = sum_{l in S*} gains_l * X[i, l] + z_i with
z_i iid N(0, noise_var).  The active column set S* plays the role of the
senders (equivalently, the support of the nonzero regression coefficients);
recovering it exactly is the decoding task.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook
from .errors import ParameterError


@dataclass(frozen=True)
class ChannelConfig:
    """Active support, gains and noise level for one transmission.

    Support indices are zero-based column indices, kept sorted; gains[i] is
    the gain of column support[i].  noise_var = 0 is allowed for tests that
    need the exact noiseless superposition.
    """

    support: tuple[int, ...]
    gains: tuple[float, ...]
    noise_var: float = 1.0

    def __post_init__(self):
        sup = tuple(int(i) for i in self.support)
        if len(sup) == 0:
            raise ParameterError("support must be nonempty")
        if any(i < 0 for i in sup):
            raise ParameterError(f"support indices must be >= 0, got {sup}")
        if len(set(sup)) != len(sup):
            raise ParameterError(f"support indices must be distinct, got {sup}")
        if sup != tuple(sorted(sup)):
            raise ParameterError(f"support must be sorted ascending, got {sup}")
        gains = tuple(float(g) for g in self.gains)
        if len(gains) != len(sup):
            raise ParameterError("gains must align with support, one per active column")
        if any(g == 0.0 for g in gains):
            raise ParameterError("all gains must be nonzero")
        if self.noise_var < 0:
            raise ParameterError(f"noise_var={self.noise_var} must be >= 0")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "gains", gains)

    @property
    def k(self) -> int:
        return len(self.support)


@dataclass(frozen=True)
class ReceivedSignal:
    y: np.ndarray = field(repr=False)
    config: ChannelConfig
    codebook: Codebook

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        if y.shape != (self.codebook.n,):
            raise ParameterError(f"signal length {y.shape} != codebook n={self.codebook.n}")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)


def transmit(
    codebook: Codebook, config: ChannelConfig, rng: np.random.Generator
) -> ReceivedSignal:
    """Superpose the active columns and add white Gaussian noise.

    Always draws exactly n standard normals from rng (even at noise_var=0),
    so the stream position after a call does not depend on the noise level.
    """
    if config.k > codebook.m:
        raise ParameterError(f"k={config.k} exceeds codeword count m={codebook.m}")
    if config.support[-1] >= codebook.m:
        raise ParameterError(
            f"support {config.support} out of range for m={codebook.m} codewords"
        )
    clean = codebook.entries[:, config.support] @ np.asarray(config.gains)
    noise = rng.standard_normal(codebook.n)
    y = clean + np.sqrt(config.noise_var) * noise
    return ReceivedSignal(y=y, config=config, codebook=codebook)


def draw_support(m: int, k: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniformly random k-subset of {0..m-1}, returned sorted."""
    if not 1 <= k <= m:
        raise ParameterError(f"need 1 <= k <= m, got k={k}, m={m}")
    return tuple(sorted(int(i) for i in rng.choice(m, size=k, replace=False)))
