"""Frequency decompositions: the alpha-covering, rough windows and the dyadic system.

The alpha-covering places window ``k`` around ``center_k = <k>^beta * k``
with scale ``<k>^beta`` where ``beta = alpha / (1 - alpha)``.  Windows are
built as products of a smooth rise and a smooth fall sharing breakpoints
with their neighbours, so the partition of unity is exact by
construction:

* the breakpoint between ``k`` and ``k + 1`` splits the gap between their
  centers in proportion to their scales, so it sits at the same relative
  distance ``ratio_k`` from both centers;
* each breakpoint carries a transition of half width ``slope * <k+1>^beta``
  (mirrored for negative indices), with one global ``slope`` chosen so that
  every window is identically one on its inner ball and vanishes outside
  its outer ball.

Coverings are pure geometry; windows are sampled lazily on whatever grid a
computation uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from . import kernels
from .errors import ConfigError, CoveringGapError, IndexOutOfCovering, ShellOutOfCovering
from .grid import Grid, GridFunction

__all__ = [
    "AlphaCovering",
    "CoveringReport",
    "DyadicPartition",
    "bracket",
    "build_alpha_covering",
    "verify_covering",
    "alpha_block",
    "build_dyadic",
    "dyadic_block",
    "shell_indices",
    "kmax_for_band",
    "covering_summary",
]

ROUGH_FALL = 0.5  # width of the fall of the rough windows, in units of the block scale
DYADIC_PLATEAU = 4.0 / 3.0
DYADIC_SUPPORT = 1.5


def bracket(k):
    """Japanese bracket ``sqrt(1 + k^2)``."""
    k = np.asarray(k, dtype=float)
    return np.sqrt(1.0 + k * k)


def _as_alpha(alpha) -> Tuple[float, str]:
    if isinstance(alpha, str):
        alpha = Fraction(alpha)
    value = float(alpha)
    if not 0.0 <= value < 1.0:
        raise ConfigError(f"alpha must lie in [0, 1), got {alpha}")
    return value, str(alpha)


def _geometry(alpha: float, kmax: int):
    beta = alpha / (1.0 - alpha)
    k = np.arange(kmax + 2, dtype=float)
    scale = bracket(k) ** beta
    center = scale * k
    gap = center[1:] - center[:-1]
    ratio = gap / (scale[:-1] + scale[1:])
    return beta, center, scale, ratio


def default_constants(alpha, kmax: int = 64) -> Tuple[float, float]:
    """Inner and outer constants used when none are given.

    The inner constant is 0.8 of the smallest relative half gap and the outer
    one exceeds the largest by 0.2 of the smallest, which leaves room for
    transitions on every window.
    """
    a, _ = _as_alpha(alpha)
    _, _, _, ratio = _geometry(a, kmax)
    rmin, rmax = float(ratio.min()), float(ratio.max())
    return 0.8 * rmin, rmax + 0.2 * rmin


def kmax_for_band(alpha, band: float) -> int:
    """Smallest truncation whose covered band reaches ``band``."""
    a, _ = _as_alpha(alpha)
    beta = a / (1.0 - a)
    # centers grow like k^(1 + beta); start from that guess and walk up
    k = max(1, int(math.floor(max(band, 1.0) ** (1.0 / (1.0 + beta)))) - 2)
    while True:
        cov = build_alpha_covering(a, kmax=k)
        if cov.covered_band >= band:
            return k
        k += max(1, k // 16)


class AlphaCovering:
    """Smooth partition of unity adapted to the alpha-geometry.

    Attributes
    ----------
    alpha : float
    inner, outer : float
        Each window is one on ``|xi - center| <= inner * scale`` and vanishes
        for ``|xi - center| >= outer * scale``.
    kmax : int
        Windows exist for ``|k| <= kmax``.
    indices, centers, scales : ndarray
        Per-window data ordered by ``k = -kmax .. kmax``.
    breaks, half_widths : ndarray
        The ``2 kmax + 2`` breakpoints and transition half widths.
    """

    def __init__(self, alpha, inner, outer, kmax, centers, scales, breaks, half_widths,
                 slope, label=None):
        self.alpha = float(alpha)
        self.alpha_label = label if label is not None else str(alpha)
        self.inner = float(inner)
        self.outer = float(outer)
        self.kmax = int(kmax)
        self.slope = float(slope)
        self.indices = np.arange(-self.kmax, self.kmax + 1)
        self.centers = _frozen(centers)
        self.scales = _frozen(scales)
        self.breaks = _frozen(breaks)
        self.half_widths = _frozen(half_widths)

    @property
    def beta(self) -> float:
        return self.alpha / (1.0 - self.alpha)

    @property
    def covered_band(self) -> float:
        """Radius of the band on which the windows sum to one."""
        return float(self.breaks[-1] - self.half_widths[-1])

    def position(self, k: int) -> int:
        if abs(int(k)) > self.kmax:
            raise IndexOutOfCovering(f"|k| = {abs(int(k))} exceeds kmax = {self.kmax}")
        return int(k) + self.kmax

    def window_params(self, profile: str = "canonical"):
        """Arrays ``(rise_center, rise_half, fall_center, fall_half)`` over all windows."""
        if profile == "canonical":
            return (self.breaks[:-1], self.half_widths[:-1], self.breaks[1:], self.half_widths[1:])
        if profile == "rough":
            w = self.scales
            edge = (self.outer + ROUGH_FALL / 2) * w
            half = (ROUGH_FALL / 2) * w
            return (self.centers - edge, half, self.centers + edge, half)
        raise ConfigError(f"unknown window profile {profile!r}")

    def supports(self, profile: str = "canonical"):
        rc, rh, fc, fh = self.window_params(profile)
        return rc - rh, fc + fh

    def window(self, k: int, xi, profile: str = "canonical") -> np.ndarray:
        """Evaluate window ``k`` at arbitrary frequencies."""
        pos = self.position(k)
        rc, rh, fc, fh = (a[pos:pos + 1] for a in self.window_params(profile))
        xi = np.asarray(xi, dtype=float)
        return kernels.interval_windows(xi.ravel(), rc, rh, fc, fh)[0].reshape(xi.shape)

    def segments(self, grid: Grid, profile: str = "canonical"):
        """Frequency-index segments ``(start, length)`` of every window on ``grid``.

        Segments are clipped to the signed index range of the grid; windows
        entirely outside it get length zero.
        """
        lo, hi = self.supports(profile)
        half_n = grid.samples // 2
        start = np.maximum(np.ceil(lo / grid.dxi), -half_n)
        stop = np.minimum(np.floor(hi / grid.dxi), half_n - 1)
        length = np.maximum(stop - start + 1, 0)
        return start.astype(np.int64), length.astype(np.int64)

    def window_array(self, k: int, grid: Grid, profile: str = "canonical") -> np.ndarray:
        """Window ``k`` sampled on the full frequency axis of ``grid``."""
        pos = self.position(k)
        start, length = self.segments(grid, profile)
        out = np.zeros(grid.samples)
        if length[pos] > 0:
            m = start[pos] + np.arange(length[pos])
            out[m % grid.samples] = self.window(k, m * grid.dxi, profile)
        return out

    def partition_sum(self, xi, profile: str = "canonical", with_count: bool = False):
        """Sum of all windows at ``xi``; optionally the number of nonzero windows."""
        xi = np.asarray(xi, dtype=float).ravel()
        idx = np.searchsorted(self.breaks, xi)
        rc, rh, fc, fh = self.window_params(profile)
        total = np.zeros_like(xi)
        count = np.zeros(xi.shape, dtype=int)
        # neighbours of the enclosing cell; transitions never reach further
        for offset in range(-4, 4):
            pos = idx + offset
            ok = (pos >= 0) & (pos < self.indices.size)
            p = np.clip(pos, 0, self.indices.size - 1)
            val = kernels.smooth_step((xi - (rc[p] - rh[p])) / (2 * rh[p]))
            val = val * (1.0 - kernels.smooth_step((xi - (fc[p] - fh[p])) / (2 * fh[p])))
            val = np.where(ok, val, 0.0)
            total += val
            count += val > 0
        return (total, count) if with_count else total

    def corrupted(self, k: int, factor: float = 3.0) -> "AlphaCovering":
        """Copy with the fall of window ``k`` widened; a negative control for the checks."""
        pos = self.position(k)
        half = np.array(self.half_widths)
        half[pos + 1] *= factor
        return AlphaCovering(self.alpha, self.inner, self.outer, self.kmax, self.centers,
                             self.scales, self.breaks, half, self.slope, self.alpha_label)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha_label,
            "inner": self.inner,
            "outer": self.outer,
            "kmax": self.kmax,
            "slope": self.slope,
            "covered_band": self.covered_band,
            "windows": [
                {"k": int(k), "center": float(c), "radius": float(self.outer * w),
                 "scale": float(w)}
                for k, c, w in zip(self.indices, self.centers, self.scales)
            ],
        }


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


def build_alpha_covering(alpha, inner: Optional[float] = None, outer: Optional[float] = None,
                         kmax: int = 64, grid: Optional[Grid] = None,
                         band: Optional[float] = None, margin: float = 0.9) -> AlphaCovering:
    """Construct the alpha-covering truncated at ``|k| <= kmax``.

    Parameters
    ----------
    alpha : float, Fraction or str
        In ``[0, 1)``.
    inner, outer : float, optional
        Ball constants; defaults come from :func:`default_constants`.
    kmax : int
    grid : Grid, optional
        When given (and ``band`` is not), the covered band must reach the
        grid's Nyquist frequency.
    band : float, optional
        Working band the covering must reach.
    margin : float
        Fraction of the admissible transition width actually used.

    Raises
    ------
    CoveringGapError
        If no transition width fits between the inner and outer balls.
    ConfigError
        If the covered band falls short of the working band.
    """
    a, label = _as_alpha(alpha)
    kmax = int(kmax)
    if kmax < 1:
        raise ConfigError("kmax must be at least 1")
    beta, center, scale, ratio = _geometry(a, kmax)
    if inner is None or outer is None:
        d_inner, d_outer = default_constants(a, kmax)
        inner = d_inner if inner is None else inner
        outer = d_outer if outer is None else outer
    inner, outer = float(inner), float(outer)
    if not 0 < inner < outer:
        raise CoveringGapError(f"need 0 < inner < outer, got {inner}, {outer}")
    ratio = ratio[: kmax + 1]
    room = np.minimum(ratio - inner, outer - ratio) * scale[: kmax + 1] / scale[1: kmax + 2]
    slope = margin * float(room.min())
    if slope <= 0:
        raise CoveringGapError(
            f"constants ({inner:.4g}, {outer:.4g}) leave no room for transitions: "
            f"relative half gaps span [{ratio.min():.4g}, {ratio.max():.4g}]")
    right = center[: kmax + 1] + ratio * scale[: kmax + 1]
    right_half = slope * scale[1: kmax + 2]
    breaks = np.concatenate([-right[::-1], right])
    half = np.concatenate([right_half[::-1], right_half])
    centers = np.concatenate([-center[1: kmax + 1][::-1], center[: kmax + 1]])
    scales = np.concatenate([scale[1: kmax + 1][::-1], scale[: kmax + 1]])
    cov = AlphaCovering(a, inner, outer, kmax, centers, scales, breaks, half, slope, label)
    if band is None and grid is not None:
        band = grid.nyquist
    if band is not None and cov.covered_band < band:
        raise ConfigError(
            f"kmax = {kmax} covers |xi| <= {cov.covered_band:.6g}, below the working band {band:.6g}")
    return cov


# ---------------------------------------------------------------------------
# verification


@dataclass
class ConditionResult:
    passed: bool
    value: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"passed": bool(self.passed), "value": float(self.value), "detail": self.detail}


@dataclass
class CoveringReport:
    """Outcome of the four covering checks plus diagnostic metrics."""

    conditions: Dict[str, ConditionResult] = field(default_factory=dict)
    metrics: Dict[str, float] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "conditions": {k: v.to_dict() for k, v in self.conditions.items()},
            "metrics": {k: float(v) for k, v in self.metrics.items()},
        }


def _fit_slope(x, y) -> float:
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])


def verify_covering(cov: AlphaCovering, tol: float = 1e-9, slope_tol: float = 0.1,
                    samples: int = 256) -> CoveringReport:
    """Check the four defining conditions of the covering numerically.

    1. ``inner_lower_bound``: each window is at least ``1 - tol`` on its inner ball.
    2. ``support``: each window vanishes outside its outer ball.
    3. ``partition_of_unity``: the windows sum to one on the covered band.
    4. ``derivative_scaling``: the largest first and second finite differences
       of window ``k`` decay like ``<k>^(-beta)`` and ``<k>^(-2 beta)``.

    Windows are sampled locally, with ``samples`` points per transition half
    width, since far windows lie beyond any practical grid.
    """
    report = CoveringReport()
    rc, rh, fc, fh = cov.window_params()
    lo, hi = rc - rh, fc + fh
    ball_lo = cov.centers - cov.outer * cov.scales
    ball_hi = cov.centers + cov.outer * cov.scales

    worst_inner = math.inf
    worst_outside = 0.0
    probe = np.linspace(-1.0, 1.0, 129)
    for pos, k in enumerate(cov.indices):
        w = cov.scales[pos]
        inner_pts = cov.centers[pos] + cov.inner * w * probe
        worst_inner = min(worst_inner, float(cov.window(k, inner_pts).min()))
        out_left = np.linspace(ball_lo[pos] - 2 * cov.outer * w, ball_lo[pos], 65)
        out_right = np.linspace(ball_hi[pos], ball_hi[pos] + 2 * cov.outer * w, 65)
        outside = np.concatenate([out_left, out_right])
        worst_outside = max(worst_outside, float(np.abs(cov.window(k, outside)).max()))
    report.conditions["inner_lower_bound"] = ConditionResult(
        worst_inner >= 1.0 - tol, worst_inner, "min of each window over its inner ball")
    spill = float(np.maximum(np.maximum(ball_lo - lo, hi - ball_hi), 0.0).max())
    report.conditions["support"] = ConditionResult(
        spill <= 0.0 and worst_outside <= 0.0, max(spill, worst_outside),
        "largest excursion of a support beyond its outer ball")

    band = cov.covered_band
    pts = [np.linspace(b - h, b + h, 2 * samples + 1) for b, h in zip(cov.breaks, cov.half_widths)]
    pts += [np.linspace(a, b, 33) for a, b in zip(rc + rh, fc - fh)]
    xi = np.concatenate(pts)
    xi = xi[np.abs(xi) <= band]
    total, count = cov.partition_sum(xi, with_count=True)
    deviation = float(np.abs(total - 1.0).max()) if xi.size else math.inf
    report.conditions["partition_of_unity"] = ConditionResult(
        deviation <= tol, deviation, f"max |sum - 1| on |xi| <= {band:.6g}")
    report.metrics["max_overlap"] = int(count.max()) if xi.size else 0
    report.metrics["covered_band"] = band

    ks, d1, d2 = [], [], []
    for pos, k in enumerate(cov.indices):
        if k < 0:
            continue
        first, second = 0.0, 0.0
        for center, half in ((rc[pos], rh[pos]), (fc[pos], fh[pos])):
            step = half / samples
            grid_pts = center + step * np.arange(-samples - 2, samples + 3)
            vals = cov.window(k, grid_pts)
            diff1 = (vals[2:] - vals[:-2]) / (2 * step)
            diff2 = (vals[2:] - 2 * vals[1:-1] + vals[:-2]) / step ** 2
            first = max(first, float(np.abs(diff1).max()))
            second = max(second, float(np.abs(diff2).max()))
        ks.append(k)
        d1.append(first)
        d2.append(second)
    ks = np.array(ks)
    br = bracket(ks)
    sel = (br >= 8) & (ks <= cov.kmax)
    if sel.sum() < 3:
        sel = ks >= 1
    slope1 = _fit_slope(br[sel], np.array(d1)[sel])
    slope2 = _fit_slope(br[sel], np.array(d2)[sel])
    target = -cov.beta
    ok = abs(slope1 - target) <= slope_tol and abs(slope2 - 2 * target) <= slope_tol
    report.conditions["derivative_scaling"] = ConditionResult(
        ok, slope1, f"slopes {slope1:.4f} and {slope2:.4f}, targets {target:.4f} and {2 * target:.4f}")
    report.metrics["slope_first"] = slope1
    report.metrics["slope_second"] = slope2
    report.metrics["first_derivative_constant"] = float(np.max(np.array(d1) * br ** cov.beta))
    report.metrics["second_derivative_constant"] = float(np.max(np.array(d2) * br ** (2 * cov.beta)))
    return report


def alpha_block(f: GridFunction, k: int, cov: AlphaCovering,
                profile: str = "canonical") -> GridFunction:
    """Apply window ``k`` (canonical or rough) as a Fourier multiplier."""
    return GridFunction.from_spectrum(f.grid, f.spectrum * cov.window_array(k, f.grid, profile))


def covering_summary(cov: AlphaCovering, report: Optional[CoveringReport] = None) -> dict:
    """JSON-ready summary of a covering and, optionally, its check report."""
    out = cov.to_dict()
    if report is not None:
        out["report"] = report.to_dict()
    return out


# ---------------------------------------------------------------------------
# dyadic system


def dyadic_profile(xi) -> np.ndarray:
    """Radial bump: 1 on ``|xi| <= 4/3`` and 0 on ``|xi| >= 3/2``."""
    t = (np.abs(np.asarray(xi, dtype=float)) - DYADIC_PLATEAU) / (DYADIC_SUPPORT - DYADIC_PLATEAU)
    return 1.0 - kernels.smooth_step(t)


@dataclass(frozen=True)
class DyadicPartition:
    """Littlewood-Paley system ``phi_0 = profile``, ``phi_j = profile(./2^j) - profile(./2^(j-1))``."""

    jmax: int
    grid: Grid

    @property
    def covered_band(self) -> float:
        return DYADIC_PLATEAU * 2.0 ** self.jmax

    def window(self, j: int, xi) -> np.ndarray:
        if not 0 <= j <= self.jmax:
            raise IndexOutOfCovering(f"dyadic index {j} outside 0..{self.jmax}")
        xi = np.asarray(xi, dtype=float)
        if j == 0:
            return dyadic_profile(xi)
        return dyadic_profile(xi / 2.0 ** j) - dyadic_profile(xi / 2.0 ** (j - 1))

    def window_array(self, j: int) -> np.ndarray:
        return self.window(j, self.grid.xi)


def build_dyadic(jmax: Optional[int], grid: Grid) -> DyadicPartition:
    """Dyadic partition up to ``jmax``; defaults to the largest level below Nyquist."""
    top = int(math.floor(math.log2(grid.nyquist)))
    if jmax is None:
        jmax = top
    if jmax < 0 or 2.0 ** jmax > grid.nyquist:
        raise ConfigError(f"2^{jmax} exceeds the Nyquist frequency {grid.nyquist:.6g}")
    return DyadicPartition(int(jmax), grid)


def dyadic_block(f: GridFunction, j: int, dp: DyadicPartition) -> GridFunction:
    if f.grid != dp.grid:
        raise ConfigError("function and partition live on different grids")
    return GridFunction.from_spectrum(f.grid, f.spectrum * dp.window_array(j))


def shell_indices(cov: AlphaCovering, j: int, kind: str = "intersecting") -> Tuple[int, ...]:
    """Indices whose window support meets (or lies inside) a dyadic shell.

    ``intersecting`` uses the shell ``3/4 * 2^j <= |xi| <= 4/3 * 2^j``;
    ``contained`` uses ``7/8 * 2^j <= |xi| <= 8/7 * 2^j``.  Supports are the
    exact ones of the construction.
    """
    if kind == "intersecting":
        a, b = 0.75 * 2.0 ** j, (4.0 / 3.0) * 2.0 ** j
    elif kind == "contained":
        a, b = (7.0 / 8.0) * 2.0 ** j, (8.0 / 7.0) * 2.0 ** j
    else:
        raise ConfigError(f"unknown shell kind {kind!r}")
    if (4.0 / 3.0) * 2.0 ** j >= cov.covered_band:
        raise ShellOutOfCovering(f"shell {j} reaches beyond the covered band {cov.covered_band:.6g}")
    lo, hi = cov.supports()
    if kind == "intersecting":
        hit = ((hi >= a) & (lo <= b)) | ((lo <= -a) & (hi >= -b))
    else:
        hit = ((lo >= a) & (hi <= b)) | ((hi <= -a) & (lo >= -b))
    return tuple(int(k) for k in cov.indices[hit])
