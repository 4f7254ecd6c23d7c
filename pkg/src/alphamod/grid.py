"""Sampled functions on a uniform periodic 1-D grid.

The grid covers ``[-L, L)`` with ``N`` samples.  Spectra use the
convention ``fhat(xi) = int f(x) exp(-2 pi i x xi) dx`` sampled at
``xi_m = m / (2L)`` for the signed FFT index ``m``, so that

    spectrum = dx * (-1)^m * fft(values)
    values   = (1/dx) * ifft((-1)^m * spectrum)

Both representations are stored and kept in sync; a ``GridFunction`` is
immutable once built.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .errors import ConfigError, GridOverflowError

__all__ = [
    "Grid",
    "GridFunction",
    "fft_workers",
    "as_float_exponent",
    "transform",
    "inverse_transform",
    "lebesgue_norm",
    "lp_quadrature",
    "apply_multiplier",
    "convolve",
    "synthesize",
    "band_energy_fraction",
    "smooth_step",
    "save_csv",
    "load_csv",
    "save_raw",
    "load_raw",
]

THREADS_ENV = "ALPHAMOD_THREADS"


def fft_workers() -> int:
    """Thread count for FFTs, read from ``ALPHAMOD_THREADS`` (default: all cores)."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        value = int(raw)
    except ValueError:
        value = os.cpu_count() or 1
    return max(1, value)


def as_float_exponent(p) -> float:
    """Turn an exponent given as Exponent, Fraction, literal or float into a float."""
    from .index_calculus import Exponent

    if isinstance(p, Exponent):
        return float(p.value)
    if isinstance(p, str):
        return float(Exponent.of(p).value)
    value = float(p)
    if value <= 0:
        raise ValueError(f"exponent must be positive, got {p}")
    return value


def smooth_step(tau):
    """C-infinity step equal to 0 for ``tau <= 0`` and 1 for ``tau >= 1``.

    Built from ``exp(-1/t)`` so that ``step(tau) + step(1 - tau) = 1``.
    """
    from . import kernels

    return kernels.smooth_step(np.asarray(tau, dtype=float))


@lru_cache(maxsize=64)
def _signs(n: int) -> np.ndarray:
    # (-1)^m over the signed FFT indices; cached per size and read-only
    m = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    out = np.where(m % 2 == 0, 1.0, -1.0)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[-half_width, half_width)``.

    Parameters
    ----------
    half_width : float
        Half length ``L`` of the periodic domain.
    samples : int
        Number of samples ``N``, a power of two.
    """

    half_width: float
    samples: int

    def __post_init__(self):
        n = int(self.samples)
        if n < 2 or n & (n - 1):
            raise ConfigError(f"grid size must be a power of two, got {self.samples}")
        if not self.half_width > 0:
            raise ConfigError("half width must be positive")
        object.__setattr__(self, "samples", n)
        object.__setattr__(self, "half_width", float(self.half_width))

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.samples

    @property
    def dxi(self) -> float:
        return 1.0 / (2.0 * self.half_width)

    @property
    def nyquist(self) -> float:
        return self.samples / (4.0 * self.half_width)

    @cached_property
    def x(self) -> np.ndarray:
        out = -self.half_width + np.arange(self.samples) * self.dx
        out.setflags(write=False)
        return out

    @cached_property
    def index(self) -> np.ndarray:
        """Signed frequency indices ``m`` in FFT order."""
        out = np.fft.fftfreq(self.samples, 1.0 / self.samples).astype(np.int64)
        out.setflags(write=False)
        return out

    @cached_property
    def xi(self) -> np.ndarray:
        out = self.index * self.dxi
        out.setflags(write=False)
        return out

    @property
    def signs(self) -> np.ndarray:
        return _signs(self.samples)

    def to_dict(self) -> dict:
        return {"half_width": self.half_width, "samples": self.samples}

    @classmethod
    def for_band(cls, half_width: float, band: float) -> "Grid":
        """Smallest power-of-two grid on ``[-L, L)`` whose Nyquist reaches ``band``."""
        need = 4.0 * half_width * band
        n = 1 << max(1, math.ceil(math.log2(max(need, 2.0))))
        return cls(half_width, n)


def transform(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Physical samples to spectrum samples."""
    out = sfft.fft(np.asarray(values, dtype=complex), workers=fft_workers())
    out *= grid.signs
    out *= grid.dx
    return out


def inverse_transform(grid: Grid, spectrum: np.ndarray) -> np.ndarray:
    """Spectrum samples to physical samples."""
    work = np.asarray(spectrum, dtype=complex) * grid.signs
    out = sfft.ifft(work, workers=fft_workers(), overwrite_x=True)
    out /= grid.dx
    return out


class GridFunction:
    """Complex function sampled on a :class:`Grid`, with its spectrum.

    Build with :meth:`from_values` or :meth:`from_spectrum`; the other side is
    computed once and both arrays are frozen.
    """

    __slots__ = ("grid", "values", "spectrum")

    def __init__(self, grid: Grid, values: np.ndarray, spectrum: np.ndarray):
        values = np.ascontiguousarray(values, dtype=complex)
        spectrum = np.ascontiguousarray(spectrum, dtype=complex)
        if values.shape != (grid.samples,) or spectrum.shape != (grid.samples,):
            raise ConfigError("sample arrays do not match the grid size")
        values.setflags(write=False)
        spectrum.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "spectrum", spectrum)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    @classmethod
    def from_values(cls, grid: Grid, values) -> "GridFunction":
        values = np.asarray(values, dtype=complex)
        return cls(grid, values, transform(grid, values))

    @classmethod
    def from_spectrum(cls, grid: Grid, spectrum) -> "GridFunction":
        spectrum = np.asarray(spectrum, dtype=complex)
        return cls(grid, inverse_transform(grid, spectrum), spectrum)

    @classmethod
    def zeros(cls, grid: Grid) -> "GridFunction":
        z = np.zeros(grid.samples, dtype=complex)
        return cls(grid, z, z.copy())

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values, self.spectrum + other.spectrum)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values, self.spectrum - other.spectrum)

    def scale(self, factor: complex) -> "GridFunction":
        return GridFunction(self.grid, self.values * factor, self.spectrum * factor)

    __mul__ = scale
    __rmul__ = scale

    def shift_samples(self, count: int) -> "GridFunction":
        """Circular translation by ``count`` samples (exact on the grid)."""
        grid = self.grid
        phase = np.exp(-2j * np.pi * grid.index * (count % grid.samples) / grid.samples)
        return GridFunction(grid, np.roll(self.values, count), self.spectrum * phase)


def _same_grid(a: GridFunction, b: GridFunction):
    if a.grid != b.grid:
        raise ConfigError("functions live on different grids")


def lp_quadrature(modulus: np.ndarray, dx: float, p) -> float:
    """Rectangle-rule ``(sum |f|^p dx)^{1/p}`` of nonnegative samples; max for ``p = inf``."""
    pf = as_float_exponent(p)
    mod = np.asarray(modulus, dtype=float)
    if math.isinf(pf):
        return float(mod.max(initial=0.0))
    if pf == 2.0:
        total = float(np.dot(mod, mod))
    elif pf == 1.0:
        total = float(mod.sum())
    else:
        total = float(np.sum(mod ** pf))
    return (total * dx) ** (1.0 / pf)


def lebesgue_norm(f: GridFunction, p) -> float:
    """Rectangle-rule ``L^p`` (quasi-)norm; the sample maximum for ``p = inf``."""
    return lp_quadrature(np.abs(f.values), f.grid.dx, p)


def apply_multiplier(f: GridFunction, window) -> GridFunction:
    """Multiply the spectrum by a window given as samples or as a callable of ``xi``."""
    if callable(window):
        window = window(f.grid.xi)
    window = np.asarray(window)
    if window.shape != (f.grid.samples,):
        raise ConfigError("window must be sampled on the grid's frequency axis")
    return GridFunction.from_spectrum(f.grid, f.spectrum * window)


def convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """Periodic convolution ``f * g`` through the product of spectra."""
    _same_grid(f, g)
    return GridFunction.from_spectrum(f.grid, f.spectrum * g.spectrum)


def band_energy_fraction(f: GridFunction, radius: float) -> float:
    """Fraction of spectral energy outside ``|xi| <= radius``."""
    power = np.abs(f.spectrum) ** 2
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    outside = float(power[np.abs(f.grid.xi) > radius].sum())
    return outside / total


# ---------------------------------------------------------------------------
# closed-form synthesis


class Form:
    """Closed-form function with optional physical and spectral evaluators.

    ``spatial_radius`` and ``band_radius`` are essential-support estimates
    used by the overflow guards; either may be ``inf``.
    """

    def __init__(self, phys=None, spec=None, spatial_radius=math.inf, band_radius=math.inf,
                 band_limited=False):
        self.phys = phys
        self.spec = spec
        self.spatial_radius = spatial_radius
        self.band_radius = band_radius
        self.band_limited = band_limited


def bump_spectrum(xi, center=0.0, plateau=0.5, radius=1.0):
    """Even spectral bump: 1 on ``|xi-center| <= plateau``, 0 beyond ``radius``."""
    t = np.abs(np.asarray(xi, dtype=float) - center)
    if radius <= plateau:
        raise ConfigError("bump radius must exceed its plateau")
    return 1.0 - smooth_step((t - plateau) / (radius - plateau))


def compact_bump(x, center=0.0, radius=1.0):
    """Spatial bump ``exp(1 - 1/(1 - t^2))`` supported in ``|x - center| < radius``."""
    t = (np.asarray(x, dtype=float) - center) / radius
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def _form(desc: dict) -> Form:
    kind = desc.get("kind")
    if kind == "gaussian":
        c = float(desc.get("center", 0.0))
        w = float(desc.get("width", 1.0))
        return Form(
            phys=lambda x: np.exp(-np.pi * ((x - c) / w) ** 2),
            spec=lambda xi: w * np.exp(-np.pi * (w * xi) ** 2) * np.exp(-2j * np.pi * c * xi),
            spatial_radius=abs(c) + 6.0 * w,
            band_radius=6.0 / w,
        )
    if kind == "smooth_bump":
        domain = desc.get("domain", "frequency")
        c = float(desc.get("center", 0.0))
        r = float(desc.get("radius", 1.0))
        if domain == "frequency":
            plateau = float(desc.get("plateau", r / 2))
            return Form(spec=lambda xi: bump_spectrum(xi, c, plateau, r),
                        band_radius=abs(c) + r, band_limited=True)
        if domain == "space":
            return Form(phys=lambda x: compact_bump(x, c, r), spatial_radius=abs(c) + r,
                        band_radius=48.0 / r)
        raise ConfigError(f"unknown bump domain {domain!r}")
    if kind == "modulated":
        base = _form(desc["base"])
        f0 = float(desc["frequency"])
        phys = None if base.phys is None else (lambda x: np.exp(2j * np.pi * f0 * x) * base.phys(x))
        spec = None if base.spec is None else (lambda xi: base.spec(xi - f0))
        return Form(phys, spec, base.spatial_radius, base.band_radius + abs(f0), base.band_limited)
    if kind == "translated":
        base = _form(desc["base"])
        a = float(desc["shift"])
        phys = None if base.phys is None else (lambda x: base.phys(x - a))
        spec = None if base.spec is None else (lambda xi: np.exp(-2j * np.pi * a * xi) * base.spec(xi))
        return Form(phys, spec, base.spatial_radius + abs(a), base.band_radius, base.band_limited)
    if kind == "dilated":
        # spectrum xi -> fhat(xi / lam), i.e. f(x) -> lam f(lam x)
        base = _form(desc["base"])
        lam = float(desc["factor"])
        if lam <= 0:
            raise ConfigError("dilation factor must be positive")
        phys = None if base.phys is None else (lambda x: lam * base.phys(lam * x))
        spec = None if base.spec is None else (lambda xi: base.spec(xi / lam))
        return Form(phys, spec, base.spatial_radius / lam, base.band_radius * lam, base.band_limited)
    raise ConfigError(f"unknown family kind {kind!r}")


def synthesize(grid: Grid, desc: dict, tol: float = 1e-10) -> GridFunction:
    """Sample a closed-form descriptor on ``grid``.

    Descriptors are nested dictionaries, e.g.
    ``{"kind": "modulated", "frequency": 4, "base": {"kind": "gaussian"}}``.
    Band-limited forms are sampled on the spectral side, everything else on
    the physical side.

    Raises
    ------
    GridOverflowError
        If the essential support leaves the domain, or the essential band
        leaves the Nyquist range.
    """
    form = _form(desc)
    spectral = form.spec is not None and (form.band_limited or form.phys is None)
    if not spectral and form.spatial_radius > grid.half_width:
        raise GridOverflowError(
            f"spatial extent {form.spatial_radius:.4g} exceeds half width {grid.half_width:.4g}")
    if form.band_limited and form.band_radius > grid.nyquist:
        raise GridOverflowError(
            f"band {form.band_radius:.4g} exceeds Nyquist {grid.nyquist:.4g}")
    if spectral:
        f = GridFunction.from_spectrum(grid, form.spec(grid.xi))
        edge = np.abs(grid.x) > 0.95 * grid.half_width
        power = np.abs(f.values) ** 2
        total = power.sum()
        if total > 0 and power[edge].sum() > tol * total:
            raise GridOverflowError("function is not localized inside the periodic domain")
        return f
    f = GridFunction.from_values(grid, form.phys(grid.x))
    if band_energy_fraction(f, 0.95 * grid.nyquist) > tol:
        raise GridOverflowError("function is not resolved below the Nyquist frequency")
    return f


# ---------------------------------------------------------------------------
# import / export


def save_csv(f: GridFunction, path) -> None:
    """Write columns ``x, re, im``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re", "im"])
        for xv, val in zip(f.grid.x, f.values):
            writer.writerow([repr(float(xv)), repr(float(val.real)), repr(float(val.imag))])


def load_csv(path) -> GridFunction:
    """Read a CSV written by :func:`save_csv`; the grid is inferred from ``x``."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in rows])
    values = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    grid = Grid(-float(x[0]), len(x))
    if not np.allclose(x, grid.x, rtol=0, atol=1e-9 * grid.half_width):
        raise ConfigError("x column is not a uniform grid on [-L, L)")
    return GridFunction.from_values(grid, values)


def save_raw(f: GridFunction, path) -> Path:
    """Write interleaved little-endian float64 ``(re, im)`` pairs plus a JSON sidecar."""
    path = Path(path)
    np.ascontiguousarray(f.values).view("<f8").astype("<f8").tofile(path)
    sidecar = path.with_suffix(path.suffix + ".json")
    meta = dict(f.grid.to_dict(), dtype="<f8", layout="interleaved re,im", side="physical")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True))
    return sidecar


def load_raw(path) -> GridFunction:
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    grid = Grid(meta["half_width"], meta["samples"])
    flat = np.fromfile(path, dtype="<f8")
    if flat.size != 2 * grid.samples:
        raise ConfigError("raw file length does not match its sidecar")
    return GridFunction.from_values(grid, flat[0::2] + 1j * flat[1::2])
