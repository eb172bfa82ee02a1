"""Comfort modulation curve and the naive occlusion mask.

The modulation curve maps scene intensity to a dimmed target intensity. The
parabola is pinned by three constraints: tangent to the identity at the low
end, crossing the proportional-dimming line at the high end, and monotone
in between. The naive mask then works backwards from the target intensity
to a displayed panel level via the transmittance curve's inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibration import Homography, warp_image
from .errors import ConfigError, DataError
from .image import COUNTS, Image, quantize_counts
from .radiometry import ResponseCurve, TransmittanceCurve


@dataclass(frozen=True)
class ModulationCurve:
    """Quadratic intensity map f(I) = c2*I^2 + c1*I + c0 on [i_min, i_max]."""

    i_min: float
    i_max: float
    a_end: float
    c0: float
    c1: float
    c2: float

    def __call__(self, i_sc):
        i = np.clip(np.asarray(i_sc, dtype=np.float64), self.i_min, self.i_max)
        return self.c0 + i * (self.c1 + i * self.c2)


def min_feasible_a_end(i_min: float, i_max: float) -> float:
    """Smallest end-attenuation that keeps the parabola monotone."""
    return 1.0 - (i_max - i_min) / (2.0 * i_max)


def build_parabolic_curve(i_min: float, i_max: float, a_end: float) -> ModulationCurve:
    """Solve the three curve constraints exactly.

    f(i_min) = i_min, f'(i_min) = 1, f(i_max) = a_end * i_max. Monotonicity
    on [i_min, i_max] requires the end slope to stay non-negative, which
    bounds a_end from below; infeasible values are rejected with the bound.
    """
    if not i_min < i_max:
        raise ConfigError(f"need i_min < i_max, got {i_min} >= {i_max}")
    if not 0.0 < a_end <= 1.0:
        raise ConfigError(f"a_end must lie in (0, 1], got {a_end}")
    d = i_max - i_min
    c2 = (a_end - 1.0) * i_max / (d * d)
    c1 = 1.0 - 2.0 * c2 * i_min
    c0 = c2 * i_min * i_min
    end_slope = 2.0 * c2 * i_max + c1
    if end_slope < -1e-12:
        bound = min_feasible_a_end(i_min, i_max)
        raise ConfigError(
            f"a_end={a_end} makes the curve non-monotone on "
            f"[{i_min}, {i_max}]; minimum feasible a_end is {bound:.6g}"
        )
    return ModulationCurve(float(i_min), float(i_max), float(a_end), c0, c1, c2)


def modulate(i_sc, curve: ModulationCurve):
    """Target intensity for scene intensity; unquantized, never brightens."""
    return curve(i_sc)


@dataclass(frozen=True)
class MaskDiagnostics:
    """Per-frame saturation report for the naive-mask transmittance chain."""

    clamped_low: int
    clamped_high: int
    total_pixels: int

    @property
    def clamped_fraction(self) -> float:
        return (self.clamped_low + self.clamped_high) / self.total_pixels


def compute_naive_mask(
    scene: Image,
    mod_curve: ModulationCurve,
    resp: ResponseCurve,
    trans: TransmittanceCurve,
    t_max_secondary: float,
    warp: Homography | None = None,
    out_shape: tuple[int, int] | None = None,
) -> tuple[Image, MaskDiagnostics]:
    """Panel levels realizing the modulation target, resampled to the panel grid.

    Per pixel: recover relative radiance from the scene capture, derive the
    target transmittance from the modulated intensity, and invert the panel
    curve. Target transmittances outside the reachable range saturate and
    are counted in the diagnostics. Dark pixels (zero recovered radiance)
    need no dimming and map to the most transparent level.
    """
    scene.require_domain(COUNTS)
    if not 0.0 < t_max_secondary <= 1.0:
        raise ConfigError("t_max_secondary must lie in (0, 1]")

    i_sc = scene.pixels
    radiance = resp.inverse(i_sc) / t_max_secondary
    i_t = modulate(i_sc, mod_curve)
    target_radiance = resp.inverse(i_t)

    dark = radiance <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        t_t = np.where(dark, trans.t_max, target_radiance / np.where(dark, 1.0, radiance))

    level, clamped = trans.inverse_level(t_t)
    mask = quantize_counts(level, trans.bit_depth)
    diag = MaskDiagnostics(
        clamped_low=int(np.count_nonzero(clamped & (t_t <= trans.t_min))),
        clamped_high=int(np.count_nonzero(clamped & (t_t >= trans.t_max))),
        total_pixels=int(i_sc.size),
    )

    mask_img = Image(mask, COUNTS, trans.bit_depth)
    if warp is not None:
        shape = out_shape or scene.shape
        mask_img = warp_image(
            mask_img, warp, out_shape=shape, fill=float(trans.most_transparent_level)
        )
        mask_img = Image(
            quantize_counts(mask_img.pixels, trans.bit_depth), COUNTS, trans.bit_depth
        )
    elif out_shape is not None and out_shape != scene.shape:
        raise DataError(
            f"scene {scene.shape} cannot fill panel {out_shape} without a warp"
        )
    return mask_img, diag
