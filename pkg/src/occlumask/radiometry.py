"""Radiance-to-counts response model and the panel transmittance curve.

The chain of interest: scene radiance L passes a panel with per-pixel
transmittance T, giving attenuated radiance T*L; a camera turns radiance
into counts through a monotone response. The panel transmittance itself is
driven by the displayed level through a logistic curve with an analytic
inverse and derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .image import COUNTS, FRACTION, RADIANCE, Image, max_count, quantize_counts


@dataclass(frozen=True)
class ResponseCurve:
    """Monotone map from relative radiance (>= 0) to counts.

    ``radiance_samples``/``count_samples`` define a piecewise-linear curve;
    the default is linear full-scale over radiance [0, 1]. The pseudo-inverse
    is defined for every count in [0, max_count] by clamping to the sampled
    range.
    """

    radiance_samples: np.ndarray
    count_samples: np.ndarray
    bit_depth: int = 12

    def __post_init__(self):
        rad = np.asarray(self.radiance_samples, dtype=np.float64)
        cnt = np.asarray(self.count_samples, dtype=np.float64)
        if rad.ndim != 1 or rad.shape != cnt.shape or rad.size < 2:
            raise ConfigError("response curve needs >= 2 paired samples")
        if np.any(np.diff(rad) <= 0) or np.any(np.diff(cnt) <= 0):
            raise ConfigError("response curve samples must be strictly increasing")
        if rad[0] < 0 or cnt[0] < 0 or cnt[-1] > max_count(self.bit_depth):
            raise ConfigError("response curve samples out of range")
        rad.setflags(write=False)
        cnt.setflags(write=False)
        object.__setattr__(self, "radiance_samples", rad)
        object.__setattr__(self, "count_samples", cnt)

    @classmethod
    def linear(cls, bit_depth: int = 12) -> "ResponseCurve":
        top = float(max_count(bit_depth))
        return cls(np.array([0.0, 1.0]), np.array([0.0, top]), bit_depth)

    @classmethod
    def from_table(cls, radiance, counts, bit_depth: int = 12) -> "ResponseCurve":
        return cls(np.asarray(radiance, float), np.asarray(counts, float), bit_depth)

    @property
    def max_count(self) -> int:
        return max_count(self.bit_depth)

    def eval(self, radiance):
        """Continuous (unquantized) counts for the given radiance values."""
        r = np.asarray(radiance, dtype=np.float64)
        out = np.interp(r, self.radiance_samples, self.count_samples)
        return np.clip(out, 0.0, float(self.max_count))

    def inverse(self, counts):
        """Radiance whose response is ``counts`` (clamped to the sampled range)."""
        c = np.clip(np.asarray(counts, dtype=np.float64), self.count_samples[0], self.count_samples[-1])
        return np.interp(c, self.count_samples, self.radiance_samples)


def _logistic(z):
    return 1.0 / (1.0 + np.exp(-np.asarray(z, dtype=np.float64)))


def default_steepness(bit_depth: int) -> float:
    """Steepness that spends 95% of the swing on the central half of the level range."""
    return float(np.log(39.0) * 4.0 / max_count(bit_depth))


@dataclass(frozen=True)
class TransmittanceCurve:
    """Logistic map from displayed panel level to transmittance.

    T(i) = t_min + (t_max - t_min) * logistic(+-k * (i - i0)); the sign is
    positive for ``increasing=True`` (higher level = more transparent).
    """

    t_min: float = 0.002
    t_max: float = 0.10
    k: float = field(default=0.0)
    i0: float = field(default=-1.0)
    bit_depth: int = 12
    increasing: bool = True

    def __post_init__(self):
        if not (0.0 < self.t_min < self.t_max <= 1.0):
            raise ConfigError("need 0 < t_min < t_max <= 1")
        if self.k == 0.0:
            object.__setattr__(self, "k", default_steepness(self.bit_depth))
        if self.i0 < 0:
            object.__setattr__(self, "i0", max_count(self.bit_depth) / 2.0)
        if self.k <= 0:
            raise ConfigError("steepness k must be positive")

    @property
    def max_count(self) -> int:
        return max_count(self.bit_depth)

    @property
    def span(self) -> float:
        return self.t_max - self.t_min

    @property
    def sign(self) -> float:
        return 1.0 if self.increasing else -1.0

    @property
    def most_transparent_level(self) -> int:
        return self.max_count if self.increasing else 0

    @property
    def most_occluding_level(self) -> int:
        return 0 if self.increasing else self.max_count

    def transmittance(self, level):
        lvl = np.asarray(level, dtype=np.float64)
        return self.t_min + self.span * _logistic(self.sign * self.k * (lvl - self.i0))

    def derivative(self, level):
        """dT/dlevel; strictly positive for increasing orientation."""
        s = _logistic(self.sign * self.k * (np.asarray(level, dtype=np.float64) - self.i0))
        return self.sign * self.span * self.k * s * (1.0 - s)

    def slope_magnitude(self, level):
        return np.abs(self.derivative(level))

    def inverse_level(self, t):
        """Continuous level reaching transmittance ``t``, plus a clamp flag.

        Values at or beyond (t_min, t_max) clamp to the nearest representable
        level of the right orientation.
        """
        tv = np.asarray(t, dtype=np.float64)
        lo_clip = tv <= self.t_min
        hi_clip = tv >= self.t_max
        u = np.clip((tv - self.t_min) / self.span, 1e-15, 1.0 - 1e-15)
        level = self.i0 + self.sign * np.log(u / (1.0 - u)) / self.k
        top = float(self.max_count)
        if self.increasing:
            level = np.where(lo_clip, 0.0, level)
            level = np.where(hi_clip, top, level)
        else:
            level = np.where(lo_clip, top, level)
            level = np.where(hi_clip, 0.0, level)
        level = np.clip(level, 0.0, top)
        return level, (lo_clip | hi_clip)


def apply_response(radiance_image: Image, curve: ResponseCurve) -> Image:
    """Pixelwise camera response; output clamped and quantized to counts."""
    radiance_image.require_domain(RADIANCE)
    out = quantize_counts(curve.eval(radiance_image.pixels), curve.bit_depth)
    return Image(out, COUNTS, curve.bit_depth)


def transmittance_of_level(level, curve: TransmittanceCurve):
    """Panel transmittance for displayed level(s); total on [0, max_count]."""
    return curve.transmittance(level)


def level_of_transmittance(t, curve: TransmittanceCurve):
    """Quantized level whose transmittance is closest to ``t``.

    Returns ``(levels, clamped)``; ``clamped`` marks inputs at or beyond the
    open range (t_min, t_max), clamped to the nearest representable level.
    """
    level, clamped = curve.inverse_level(t)
    return quantize_counts(level, curve.bit_depth), clamped


def attenuate(radiance_image: Image, transmittance_map: Image) -> Image:
    """Pixelwise product of scene radiance with a transmittance field."""
    radiance_image.require_domain(RADIANCE)
    transmittance_map.require_domain(FRACTION)
    if radiance_image.shape != transmittance_map.shape:
        raise DataError(
            f"dimension mismatch {radiance_image.shape} vs {transmittance_map.shape}"
        )
    return Image(
        radiance_image.pixels * transmittance_map.pixels,
        RADIANCE,
        radiance_image.bit_depth,
    )
