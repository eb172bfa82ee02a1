"""Planar homographies between the scene camera, eye camera, and panel.

Estimation uses the normalized direct linear transform: both point sets are
translated to their centroid and scaled to mean distance sqrt(2) before the
SVD solve, which keeps the system well conditioned. Correspondences are
supplied as point lists; no corner detection happens here.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericError
from .image import Image


@dataclass(frozen=True)
class Homography:
    """3x3 projective map, normalized so matrix[2, 2] == 1 when nonzero."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (3, 3):
            raise DataError("homography must be a 3x3 matrix")
        if abs(m[2, 2]) > 1e-12:
            m = m / m[2, 2]
        if abs(np.linalg.det(m)) <= 1e-12:
            raise NumericError("homography is singular")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))

    @classmethod
    def translation(cls, dx: float, dy: float) -> "Homography":
        m = np.eye(3)
        m[0, 2] = dx
        m[1, 2] = dy
        return cls(m)

    def apply(self, points) -> np.ndarray:
        """Map Nx2 points through the homography."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        ones = np.ones((pts.shape[0], 1))
        proj = np.hstack([pts, ones]) @ self.matrix.T
        w = proj[:, 2]
        if np.any(np.abs(w) < 1e-12):
            raise NumericError("point maps to infinity under homography")
        return proj[:, :2] / w[:, None]

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.matrix))

    def compose(self, other: "Homography") -> "Homography":
        """self o other (apply ``other`` first)."""
        return Homography(self.matrix @ other.matrix)

    def to_flat(self) -> np.ndarray:
        return self.matrix.reshape(9).copy()

    @classmethod
    def from_flat(cls, values) -> "Homography":
        v = np.asarray(values, dtype=np.float64)
        if v.size != 9:
            raise DataError("expected 9 row-major homography entries")
        return cls(v.reshape(3, 3))


def save_homography(path, h: Homography) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(" ".join(repr(x) for x in h.to_flat()) + "\n")


def load_homography(path) -> Homography:
    with open(path, "r", encoding="ascii") as fh:
        values = [float(tok) for tok in fh.read().split()]
    return Homography.from_flat(values)


def load_correspondences(path) -> tuple[np.ndarray, np.ndarray]:
    """Read x_src,y_src,x_dst,y_dst rows (header row optional)."""
    src, dst = [], []
    with open(path, "r", encoding="ascii", newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            try:
                vals = [float(x) for x in row[:4]]
            except ValueError:
                continue  # header
            if len(vals) != 4:
                raise DataError(f"bad correspondence row: {row}")
            src.append(vals[:2])
            dst.append(vals[2:])
    if not src:
        raise DataError(f"no correspondences found in {path}")
    return np.asarray(src), np.asarray(dst)


def _normalization(points: np.ndarray) -> np.ndarray:
    centroid = points.mean(axis=0)
    dist = np.sqrt(((points - centroid) ** 2).sum(axis=1)).mean()
    if dist < 1e-12:
        raise NumericError("degenerate point configuration (coincident points)")
    s = np.sqrt(2.0) / dist
    return np.array(
        [[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]]
    )


@dataclass(frozen=True)
class HomographyFit:
    homography: Homography
    reprojection_rms: float


def estimate_homography(src_points, dst_points) -> HomographyFit:
    """Least-squares homography from >= 4 correspondences (normalized DLT)."""
    src = np.atleast_2d(np.asarray(src_points, dtype=np.float64))
    dst = np.atleast_2d(np.asarray(dst_points, dtype=np.float64))
    if src.shape != dst.shape or src.shape[1] != 2:
        raise DataError("src and dst must be matching Nx2 arrays")
    n = src.shape[0]
    if n < 4:
        raise DataError(f"need >= 4 correspondences, got {n}")

    t_src = _normalization(src)
    t_dst = _normalization(dst)
    sn = (np.hstack([src, np.ones((n, 1))]) @ t_src.T)[:, :2]
    dn = (np.hstack([dst, np.ones((n, 1))]) @ t_dst.T)[:, :2]

    rows = []
    for (x, y), (xp, yp) in zip(sn, dn):
        rows.append([0.0, 0.0, 0.0, -x, -y, -1.0, yp * x, yp * y, yp])
        rows.append([x, y, 1.0, 0.0, 0.0, 0.0, -xp * x, -xp * y, -xp])
    a = np.asarray(rows)

    _, sv, vt = np.linalg.svd(a)
    if sv[-2] < 1e-10 * sv[0]:
        raise NumericError("degenerate correspondence configuration")
    h_norm = vt[-1].reshape(3, 3)
    h = Homography(np.linalg.inv(t_dst) @ h_norm @ t_src)

    reproj = h.apply(src)
    rms = float(np.sqrt(((reproj - dst) ** 2).sum(axis=1).mean()))
    return HomographyFit(h, rms)


def warp_image(
    img: Image,
    h: Homography,
    out_shape: tuple[int, int] | None = None,
    fill: float = 0.0,
) -> Image:
    """Resample ``img`` through ``h`` (source -> destination coordinates).

    Inverse mapping with bilinear interpolation; destination pixels falling
    outside the source take the fill value. ``out_shape`` is (height, width).
    """
    shape = out_shape or img.shape
    hh, ww = shape
    inv = h.inverse().matrix

    xs, ys = np.meshgrid(np.arange(ww, dtype=np.float64), np.arange(hh, dtype=np.float64))
    denom = inv[2, 0] * xs + inv[2, 1] * ys + inv[2, 2]
    bad = np.abs(denom) < 1e-12
    denom = np.where(bad, 1.0, denom)
    sx = (inv[0, 0] * xs + inv[0, 1] * ys + inv[0, 2]) / denom
    sy = (inv[1, 0] * xs + inv[1, 1] * ys + inv[1, 2]) / denom

    src_h, src_w = img.shape
    inside = (~bad) & (sx >= 0) & (sx <= src_w - 1) & (sy >= 0) & (sy <= src_h - 1)

    x0 = np.clip(np.floor(sx).astype(np.intp), 0, src_w - 1)
    y0 = np.clip(np.floor(sy).astype(np.intp), 0, src_h - 1)
    x1 = np.minimum(x0 + 1, src_w - 1)
    y1 = np.minimum(y0 + 1, src_h - 1)
    fx = np.clip(sx - x0, 0.0, 1.0)
    fy = np.clip(sy - y0, 0.0, 1.0)

    px = img.pixels
    top = px[y0, x0] * (1.0 - fx) + px[y0, x1] * fx
    bot = px[y1, x0] * (1.0 - fx) + px[y1, x1] * fx
    out = top * (1.0 - fy) + bot * fy
    out = np.where(inside, out, fill)
    return Image(out, img.domain, img.bit_depth)


@dataclass(frozen=True)
class DeviationRow:
    dx: int
    dy: int
    variant: str
    effective_area: int
    leak_area: int
    peak_bright_leak: float
    rms_contrast: float


def deviation_sweep(ctx, offsets, variants: dict[str, Image]) -> list[DeviationRow]:
    """Re-run the occlusion metrics with the panel-to-eye mapping shifted.

    ``variants`` maps a name to a displayed mask; each (dx, dy) offset
    translates the mask before the blur simulation, standing in for a
    miscalibrated panel. Rows come back in input order, variants outer.
    """
    from .metrics import evaluate_mask

    limit_y = ctx.scene.height // 4
    limit_x = ctx.scene.width // 4
    rows = []
    for name, mask in variants.items():
        for dx, dy in offsets:
            if abs(dx) > limit_x or abs(dy) > limit_y:
                raise DataError(f"offset ({dx}, {dy}) beyond a quarter of the image")
            if dx == 0 and dy == 0:
                shifted = mask
            else:
                shifted = warp_image(
                    mask,
                    Homography.translation(dx, dy),
                    fill=float(ctx.trans.most_transparent_level),
                )
            report = evaluate_mask(ctx, shifted, name)
            rows.append(
                DeviationRow(
                    dx=int(dx),
                    dy=int(dy),
                    variant=name,
                    effective_area=report.effective_area,
                    leak_area=report.leak_area,
                    peak_bright_leak=report.peak_bright_leak,
                    rms_contrast=report.rms_contrast,
                )
            )
    return rows
