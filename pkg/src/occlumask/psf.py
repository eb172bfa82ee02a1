"""Out-of-focus blur of the panel plane: disc kernels, convolution, radius fit.

A panel pixel off the focal plane images as a uniform disc whose radius
follows from the aperture and the two plane depths. Kernels are normalized
to unit sum with exact pixel/disc intersection areas on the boundary taps,
so small radii are not biased by hard thresholding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConfigError, DataError, NumericError
from .image import Image

#: kernels up to this radius use the direct spatial path by default
DIRECT_RADIUS_LIMIT = 15.0


@dataclass(frozen=True)
class BlurGeometry:
    """Aperture and plane depths fixing the defocus disc size."""

    aperture_mm: float
    focal_depth_mm: float
    panel_depth_mm: float
    pixel_pitch_mm: float

    def __post_init__(self):
        if self.aperture_mm <= 0:
            raise ConfigError("aperture must be positive")
        if not 0 < self.panel_depth_mm <= self.focal_depth_mm:
            raise ConfigError("need 0 < panel depth <= focal depth")
        if self.pixel_pitch_mm <= 0:
            raise ConfigError("pixel pitch must be positive")

    @property
    def relative_defocus(self) -> float:
        """Fractional shortfall of the blur radius from the half aperture."""
        return self.panel_depth_mm / self.focal_depth_mm


def blur_radius_mm(geom: BlurGeometry) -> float:
    """Blur disc radius on the sensor plane, in millimetres."""
    return (geom.aperture_mm / 2.0) * abs(1.0 - geom.panel_depth_mm / geom.focal_depth_mm)


def blur_radius_px(geom: BlurGeometry) -> float:
    return blur_radius_mm(geom) / geom.pixel_pitch_mm


@dataclass(frozen=True)
class DiscKernel:
    """Normalized uniform-disc blur kernel."""

    radius_px: float
    taps: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.taps, dtype=np.float64)
        t.setflags(write=False)
        object.__setattr__(self, "taps", t)

    @property
    def half(self) -> int:
        return self.taps.shape[0] // 2


def _quarter_circle_integral(x: np.ndarray, r: float) -> np.ndarray:
    """Integral of sqrt(r^2 - t^2) dt from 0 to x, for x in [0, r]."""
    x = np.clip(x, 0.0, r)
    return 0.5 * (x * np.sqrt(np.maximum(r * r - x * x, 0.0)) + r * r * np.arcsin(np.clip(x / r, -1.0, 1.0)))


def _quadrant_area(a: np.ndarray, b: np.ndarray, r: float) -> np.ndarray:
    """Area of {0 <= x <= a, 0 <= y <= b} inside the disc of radius r (a, b >= 0)."""
    a = np.minimum(a, r)
    b = np.minimum(b, r)
    xb = np.sqrt(np.maximum(r * r - b * b, 0.0))
    straight = np.minimum(a, xb) * b
    curved = _quarter_circle_integral(a, r) - _quarter_circle_integral(np.minimum(a, xb), r)
    return straight + np.maximum(curved, 0.0)


def _signed_area(x: np.ndarray, y: np.ndarray, r: float) -> np.ndarray:
    return np.sign(x) * np.sign(y) * _quadrant_area(np.abs(x), np.abs(y), r)


def pixel_disc_area(x0, x1, y0, y1, r: float) -> np.ndarray:
    """Exact intersection area of axis-aligned boxes with the origin disc."""
    x0, x1, y0, y1 = (np.asarray(v, dtype=np.float64) for v in (x0, x1, y0, y1))
    return (
        _signed_area(x1, y1, r)
        - _signed_area(x0, y1, r)
        - _signed_area(x1, y0, r)
        + _signed_area(x0, y0, r)
    )


def disc_kernel(r: float) -> DiscKernel:
    """Uniform disc of radius ``r`` pixels, area-weighted on the rim.

    Taps live on a (2*ceil(r) + 1)^2 support; tap centers farther than
    r + 0.5 from the origin are zero. Radii at or below half a pixel
    degenerate to the identity kernel.
    """
    if not np.isfinite(r):
        raise NumericError(f"non-finite kernel radius {r}")
    if r <= 0:
        raise ConfigError(f"kernel radius must be positive, got {r}")
    if r <= 0.5:
        return DiscKernel(float(r), np.array([[1.0]]))

    m = int(np.ceil(r))
    offsets = np.arange(-m, m + 1, dtype=np.float64)
    oy, ox = np.meshgrid(offsets, offsets, indexing="ij")
    taps = pixel_disc_area(ox - 0.5, ox + 0.5, oy - 0.5, oy + 0.5, float(r))

    taps[ox * ox + oy * oy > (r + 0.5) ** 2] = 0.0
    # enforce the dihedral symmetry of the disc exactly
    taps = 0.25 * (taps + taps[::-1, :] + taps[:, ::-1] + taps[::-1, ::-1])
    taps = 0.5 * (taps + taps.T)
    total = taps.sum()
    if total <= 0:
        raise NumericError(f"degenerate disc kernel for r={r}")
    return DiscKernel(float(r), taps / total)


def _next_fast_len(n: int) -> int:
    """Smallest 5-smooth integer >= n (keeps numpy's FFT away from large primes)."""
    best = 1
    while best < n:
        best *= 2
    candidate = best
    f5 = 1
    while f5 < 2 * n:
        f35 = f5
        while f35 < 2 * n:
            f = f35
            while f < n:
                f *= 2
            if n <= f < candidate:
                candidate = f
            f35 *= 3
        f5 *= 5
    return candidate


def _convolve_fft(arr: np.ndarray, taps: np.ndarray) -> np.ndarray:
    h, w = arr.shape
    my, mx = taps.shape[0] // 2, taps.shape[1] // 2
    padded = np.pad(arr, ((my, my), (mx, mx)), mode="edge")
    sh = _next_fast_len(padded.shape[0] + taps.shape[0] - 1)
    sw = _next_fast_len(padded.shape[1] + taps.shape[1] - 1)
    spec = np.fft.rfft2(padded, s=(sh, sw)) * np.fft.rfft2(taps, s=(sh, sw))
    full = np.fft.irfft2(spec, s=(sh, sw))
    return full[2 * my : 2 * my + h, 2 * mx : 2 * mx + w]


def convolve(image, kernel: DiscKernel, method: str = "auto"):
    """Space-invariant convolution with replicate-edge borders, same size out.

    ``method`` is "direct", "fft", or "auto" (direct for radii up to
    ``DIRECT_RADIUS_LIMIT``, frequency domain above). Both paths agree to
    high precision; the split is purely about speed.
    """
    is_image = isinstance(image, Image)
    arr = image.pixels if is_image else np.asarray(image, dtype=np.float64)
    taps = kernel.taps
    if taps.shape[0] > arr.shape[0] or taps.shape[1] > arr.shape[1]:
        raise DataError(
            f"kernel {taps.shape} larger than image {arr.shape}"
        )
    if method == "auto":
        method = "direct" if kernel.radius_px <= DIRECT_RADIUS_LIMIT else "fft"
    if method == "direct":
        out = _backend.conv2d_direct(arr, taps)
    elif method == "fft":
        out = _convolve_fft(arr, taps) if taps.size > 1 else arr.copy()
    else:
        raise ConfigError(f"unknown convolution method {method!r}")
    if is_image:
        if image.domain == "counts":
            out = np.clip(out, 0.0, float(image.max_count))
        elif image.domain == "fraction":
            out = np.clip(out, 0.0, 1.0)
        return image.with_pixels(out)
    return out


@dataclass(frozen=True)
class RadiusEstimate:
    radius_px: float
    residual: float
    radii: np.ndarray
    residuals: np.ndarray


def central_roi(shape: tuple[int, int], side: int | None = None) -> tuple[slice, slice]:
    """Centered square region; default side is a quarter of the short edge."""
    h, w = shape
    if side is None:
        side = max(1, min(h, w) // 4)
    top = (h - side) // 2
    left = (w - side) // 2
    return slice(top, top + side), slice(left, left + side)


def estimate_radius(
    mask,
    observed,
    search: tuple[float, float],
    step: float = 0.25,
    roi: tuple[slice, slice] | None = None,
    method: str = "fft",
) -> RadiusEstimate:
    """Grid-search the blur radius minimizing the L2 fit to an observation.

    Scans ``search`` inclusive at ``step`` spacing; ties break toward the
    smaller radius. The residual is restricted to ``roi`` (default: the
    central square) to stay clear of rim artifacts.
    """
    mask_arr = mask.pixels if isinstance(mask, Image) else np.asarray(mask, dtype=np.float64)
    obs_arr = observed.pixels if isinstance(observed, Image) else np.asarray(observed, dtype=np.float64)
    if mask_arr.shape != obs_arr.shape:
        raise DataError("mask and observation must share a grid")

    lo, hi = search
    if step <= 0:
        raise ConfigError("search step must be positive")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    radii = lo + step * np.arange(n)
    radii = radii[radii > 0]
    if radii.size == 0:
        raise ConfigError(f"empty radius search range {search}")

    if roi is None:
        roi = central_roi(mask_arr.shape)
    ys, xs = roi
    probe = np.empty(mask_arr.shape)[ys, xs]
    if probe.size == 0:
        raise DataError("empty ROI")
    if (
        (ys.start or 0) < 0
        or (xs.start or 0) < 0
        or (ys.stop or 0) > mask_arr.shape[0]
        or (xs.stop or 0) > mask_arr.shape[1]
    ):
        raise DataError("ROI out of bounds")

    target = obs_arr[ys, xs]
    residuals = np.empty(radii.size)
    for i, r in enumerate(radii):
        blurred = convolve(mask_arr, disc_kernel(float(r)), method=method)
        residuals[i] = np.sqrt(((blurred[ys, xs] - target) ** 2).sum())
    best = int(np.argmin(residuals))
    return RadiusEstimate(float(radii[best]), float(residuals[best]), radii, residuals)
