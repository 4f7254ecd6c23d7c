"""Local Hardy atoms and the extremal test families.

Atoms are random smooth bumps on an interval; small ones get their low
moments removed by a weighted projection, so the support survives
exactly.  The families are built on the spectral side from a few fixed
band-limited profiles:

* ``dilated``: ``fhat(xi / lam)`` for a bump ``fhat`` equal to one near 0;
* ``dyadic_bump`` and ``comb_G``: ``ghat(xi / 2^j)`` with ``ghat`` one on
  ``7/8 <= |xi| <= 8/7`` and supported in ``3/4 <= |xi| <= 4/3``, shifted
  by ``origin - j h``;
* ``alpha_bump`` and ``comb_F``: a bump moved to window ``k`` and scaled by
  its block scale, shifted by ``origin + k h``;
* ``flat``: ``fhat(xi / 2^J)`` with ``fhat`` one on ``|xi| <= 1``, zero for
  ``|xi| >= 2``;
* ``linf_comb``: an unshifted sum of alpha-bumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .decomposition import AlphaCovering
from .errors import ConfigError, CoveringMismatch, DegenerateAtom, DomainError, GridOverflowError
from .grid import Grid, GridFunction, bump_spectrum, compact_bump
from .index_calculus import Exponent

__all__ = [
    "Atom",
    "AtomCheck",
    "make_atom",
    "validate_atom",
    "atom_grid",
    "make_family",
    "comb_interference",
    "atom_tail_profile",
    "TailReport",
    "FAMILY_KINDS",
]

FAMILY_KINDS = ("dilated", "dyadic_bump", "comb_G", "alpha_bump", "comb_F", "flat", "linf_comb")
SIZE_SLACK = 1e-6


def moment_order(p) -> int:
    """``floor(1/p - 1)`` for ``0 < p <= 1`` in dimension one."""
    u = Exponent.of(p).recip
    return max(0, math.floor(u - 1))


@dataclass(frozen=True)
class Atom:
    """An atom supported on ``[center - side/2, center + side/2]``."""

    p: Exponent
    center: float
    side: float
    kind: str
    moments: int
    function: GridFunction
    seed: Optional[int] = None

    @property
    def measure(self) -> float:
        return self.side

    @property
    def size_bound(self) -> float:
        return self.side ** (-float(self.p.recip))


def atom_grid(side: float, band_factor: float = 48.0, min_band: float = 8.0,
              min_half_width: float = 32.0) -> Grid:
    """Grid resolving an atom of the given side.

    The bump's spectrum keeps less than ``1e-10`` of its energy beyond about
    ``32 / side``; ``band_factor`` adds room for the random modulation.
    """
    half_width = max(min_half_width, 4.0 * side)
    band = max(band_factor / side, min_band)
    return Grid.for_band(half_width, band)


def make_atom(p, side: float, kind: Optional[str] = None, seed: int = 0, center: float = 0.0,
              grid: Optional[Grid] = None, modes: int = 3) -> Atom:
    """Random smooth atom.

    Parameters
    ----------
    p : exponent in ``(0, 1]``
    side : float
        Interval length; kind ``"I"`` needs ``side < 1`` and kind ``"II"``
        needs ``side >= 1``.
    kind : {"I", "II"}, optional
        Inferred from ``side`` when omitted.
    seed : int
    center : float
    grid : Grid, optional
        Defaults to :func:`atom_grid`.
    modes : int
        Number of random cosine/sine modes modulating the bump.

    Raises
    ------
    DegenerateAtom
        If removing the moments leaves (almost) nothing.
    """
    exp = Exponent.of(p)
    if exp.recip < 1:
        raise DomainError("atoms need 0 < p <= 1")
    side = float(side)
    inferred = "I" if side < 1 else "II"
    kind = inferred if kind is None else kind
    if kind != inferred:
        raise DomainError(f"kind {kind} does not match side {side}")
    grid = grid if grid is not None else atom_grid(side)
    if abs(center) + side / 2 > grid.half_width:
        raise GridOverflowError("atom support leaves the domain")
    rng = np.random.default_rng(seed)
    t = 2.0 * (grid.x - center) / side
    weight = compact_bump(grid.x, center, side / 2)
    inside = weight > 0
    ts = t[inside]
    profile = np.ones_like(ts)
    for m in range(1, modes + 1):
        a, b = rng.uniform(-1, 1, 2)
        profile += (0.5 / m) * (a * np.cos(np.pi * m * ts) + b * np.sin(np.pi * m * ts))
    order = moment_order(exp) if kind == "I" else -1
    values = weight[inside] * profile
    if order >= 0:
        basis = np.vstack([ts ** b for b in range(order + 1)])
        gram = (basis * weight[inside]) @ basis.T
        rhs = basis @ values
        coef = np.linalg.solve(gram, rhs)
        projected = values - weight[inside] * (coef @ basis)
        # one refinement pass cleans up rounding in the solve
        coef2 = np.linalg.solve(gram, basis @ projected)
        projected = projected - weight[inside] * (coef2 @ basis)
        if np.abs(projected).max() < 1e-3 * np.abs(values).max():
            raise DegenerateAtom(f"moment removal annihilated the bump (seed {seed})")
        values = projected
    full = np.zeros(grid.samples)
    full[inside] = values
    bound = side ** (-float(exp.recip))
    full *= bound * (1.0 - SIZE_SLACK) / np.abs(full).max()
    f = GridFunction.from_values(grid, full)
    return Atom(exp, float(center), side, kind, moment_order(exp), f, seed)


@dataclass
class AtomCheck:
    passed: bool
    checks: Dict[str, bool] = field(default_factory=dict)
    details: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": dict(self.checks),
                "details": {k: float(v) for k, v in self.details.items()}}


def validate_atom(atom: Atom, moment_tol: float = 1e-8, min_samples: int = 8) -> AtomCheck:
    """Support, size, moment and resolution checks for an atom.

    Moments are taken about the interval center, which is equivalent to
    the moments about the origin when all orders up to ``moments`` vanish.
    """
    f = atom.function
    x = f.grid.x
    vals = f.values
    outside = np.abs(x - atom.center) >= atom.side / 2
    checks, details = {}, {}
    checks["support"] = bool(np.all(vals[outside] == 0))
    sup = float(np.abs(vals).max())
    details["sup_over_bound"] = sup / atom.size_bound
    checks["size"] = sup <= atom.size_bound
    samples_inside = int((~outside).sum())
    details["samples_inside"] = samples_inside
    checks["resolution"] = samples_inside >= min_samples
    if atom.kind == "I":
        scale = atom.side ** (1.0 - float(atom.p.recip))
        worst = 0.0
        for b in range(atom.moments + 1):
            mom = abs(np.sum((x - atom.center) ** b * vals) * f.grid.dx)
            worst = max(worst, mom / (atom.side ** b * scale))
        details["worst_moment"] = worst
        checks["moments"] = worst <= moment_tol
    ok = all(checks.values())
    return AtomCheck(ok, checks, details)


# ---------------------------------------------------------------------------
# families


def _unit_mass_bump(xi, radius):
    # plateau radius/2, support radius; the symmetric step makes the
    # integral exactly plateau + radius = 1.5 * radius
    return bump_spectrum(xi, 0.0, radius / 2, radius) / (1.5 * radius)


def annulus_spectrum(xi) -> np.ndarray:
    """Even profile: one on ``7/8 <= |xi| <= 8/7``, zero outside ``3/4 < |xi| < 4/3``."""
    from .grid import smooth_step

    r = np.abs(np.asarray(xi, dtype=float))
    rise = smooth_step((r - 0.75) / (0.875 - 0.75))
    fall = smooth_step((r - 8.0 / 7.0) / (4.0 / 3.0 - 8.0 / 7.0))
    return rise * (1.0 - fall)


def flat_spectrum(xi) -> np.ndarray:
    """One on ``|xi| <= 1``, zero on ``|xi| >= 2``."""
    return bump_spectrum(xi, 0.0, 1.0, 2.0)


def _phase(grid: Grid, shift: float) -> np.ndarray:
    # spectral factor of the translation x -> x - shift
    return np.exp(-2j * np.pi * shift * grid.xi)


def _check_shift(grid: Grid, shift: float, reach: float = 0.0):
    if abs(shift) + reach > grid.half_width:
        raise GridOverflowError(f"translation {shift:.4g} leaves the domain [-L, L)")


def _check_band(grid: Grid, radius: float):
    if radius > grid.nyquist:
        raise GridOverflowError(f"band {radius:.6g} exceeds Nyquist {grid.nyquist:.6g}")


def alpha_bump_spectrum(cov: AlphaCovering, k: int, xi, check: bool = True) -> np.ndarray:
    """Spectrum of the unit alpha-bump at window ``k``.

    Supported in the inner ball of the window, so the canonical window is
    identically one there.
    """
    pos = cov.position(k)
    center, scale = cov.centers[pos], cov.scales[pos]
    radius = cov.inner
    xi = np.asarray(xi, dtype=float)
    values = _unit_mass_bump((xi - center) / scale, radius)
    if check:
        support = np.abs(xi - center) < radius * scale
        if support.any():
            win = cov.window(k, xi[support])
            if np.abs(win - 1.0).max() > 1e-12:
                raise CoveringMismatch(f"alpha-bump {k} straddles neighbouring windows")
    return values


def _coeffs(desc) -> Dict[int, float]:
    raw = desc.get("coefficients")
    if raw is None:
        raise ConfigError("comb descriptors need 'coefficients'")
    if isinstance(raw, dict):
        return {int(k): float(v) for k, v in raw.items()}
    return {int(k): float(v) for k, v in raw}


def make_family(desc: dict, grid: Grid, cov: Optional[AlphaCovering] = None,
                return_members: bool = False):
    """Build one member of an extremal family.

    Parameters
    ----------
    desc : dict
        ``{"kind": ..., parameters}``; see the module docstring for kinds.
    grid : Grid
    cov : AlphaCovering, optional
        Needed for ``alpha_bump``, ``comb_F`` and ``linf_comb``.
    return_members : bool
        For combs, also return the list of translated summands.
    """
    kind = desc.get("kind")
    xi = grid.xi
    members: List[GridFunction] = []
    if kind == "dilated":
        lam = float(desc["factor"])
        radius = float(desc.get("radius", 1.0))
        _check_band(grid, radius * lam)
        spec = bump_spectrum(xi / lam, 0.0, radius / 2, radius)
        out = GridFunction.from_spectrum(grid, spec)
    elif kind == "dyadic_bump":
        j = int(desc["j"])
        h = float(desc.get("separation", 0.0))
        origin = float(desc.get("origin", 0.0))
        _check_band(grid, (4.0 / 3.0) * 2.0 ** j)
        _check_shift(grid, origin - j * h)
        out = GridFunction.from_spectrum(grid, annulus_spectrum(xi / 2.0 ** j) * _phase(grid, origin - j * h))
    elif kind == "comb_G":
        h = float(desc.get("separation", 0.0))
        origin = float(desc.get("origin", 0.0))
        total = np.zeros(grid.samples, dtype=complex)
        for j, a in sorted(_coeffs(desc).items()):
            if j < 0:
                raise ConfigError("dyadic indices are natural numbers")
            _check_band(grid, (4.0 / 3.0) * 2.0 ** j)
            _check_shift(grid, origin - j * h)
            spec = a * annulus_spectrum(xi / 2.0 ** j) * _phase(grid, origin - j * h)
            total += spec
            if return_members:
                members.append(GridFunction.from_spectrum(grid, spec))
        out = GridFunction.from_spectrum(grid, total)
    elif kind in ("alpha_bump", "comb_F", "linf_comb"):
        if cov is None:
            raise ConfigError(f"{kind} needs an alpha-covering")
        if kind == "alpha_bump":
            coeffs = {int(desc["k"]): 1.0}
            h = float(desc.get("shift", 0.0))
            shifts = {int(desc["k"]): h}
        else:
            coeffs = _coeffs(desc)
            h = float(desc.get("separation", 0.0)) if kind == "comb_F" else 0.0
            origin = float(desc.get("origin", 0.0)) if kind == "comb_F" else 0.0
            shifts = {k: origin + k * h for k in coeffs}
        total = np.zeros(grid.samples, dtype=complex)
        for k, b in sorted(coeffs.items()):
            pos = cov.position(k)
            _check_band(grid, abs(cov.centers[pos]) + cov.inner * cov.scales[pos])
            _check_shift(grid, shifts[k])
            spec = b * alpha_bump_spectrum(cov, k, xi) * _phase(grid, shifts[k])
            total += spec
            if return_members:
                members.append(GridFunction.from_spectrum(grid, spec))
        out = GridFunction.from_spectrum(grid, total)
    elif kind == "flat":
        big_j = int(desc["J"])
        _check_band(grid, 2.0 * 2.0 ** big_j)
        out = GridFunction.from_spectrum(grid, flat_spectrum(xi / 2.0 ** big_j))
    else:
        raise ConfigError(f"unknown family kind {kind!r}")
    return (out, members) if return_members else out


def comb_interference(members: List[GridFunction]) -> float:
    """Overlap mass ``sum_{i != j} int |u_i||u_j|`` relative to ``sum_i int |u_i|^2``."""
    if len(members) < 2:
        return 0.0
    mods = np.array([np.abs(m.values) for m in members])
    total = mods.sum(axis=0)
    own = float((mods ** 2).sum())
    cross = float((total ** 2).sum()) - own
    return max(cross, 0.0) / own if own > 0 else 0.0


# ---------------------------------------------------------------------------
# pointwise tails


@dataclass
class TailReport:
    """Comparison of a rough block of an atom with the two pointwise envelopes."""

    k: int
    decay_order: float
    max_ratio_plain: float
    max_ratio_moment: Optional[float]
    moment_factor: float
    max_tail: float
    points: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "decay_order": self.decay_order,
            "max_ratio_plain": self.max_ratio_plain,
            "max_ratio_moment": self.max_ratio_moment,
            "moment_factor": self.moment_factor,
            "max_tail": self.max_tail,
            "points": self.points,
        }


def atom_tail_profile(atom: Atom, k: int, cov: AlphaCovering, decay_order: float = 4.0,
                      reach: float = 0.5) -> TailReport:
    """Compare ``|rough_box_k a(x)|`` outside the doubled interval with its envelopes.

    The plain envelope is ``w * <w x>^{-decay} * |Q|^{1 - 1/p}`` with
    ``w = <k>^{alpha/(1-alpha)}``; when moments vanish it is multiplied by
    ``(|Q| <k>^{1/(1-alpha)})^{moments + 1}``.  Only ``|x| <= reach * L`` is
    used, which keeps periodization out of the comparison.
    """
    from .decomposition import alpha_block, bracket

    f = atom.function
    block = alpha_block(f, k, cov, profile="rough")
    x = f.grid.x
    region = (np.abs(x - atom.center) >= atom.side) & (np.abs(x) <= reach * f.grid.half_width)
    tail = np.abs(block.values[region])
    w = float(bracket(k)) ** cov.beta
    u = float(atom.p.recip)
    plain = w * (1.0 + (w * (x[region] - atom.center)) ** 2) ** (-decay_order / 2) * atom.side ** (1 - u)
    factor = atom.side * float(bracket(k)) ** (1.0 / (1.0 - cov.alpha))
    ratio_plain = float((tail / plain).max()) if tail.size else 0.0
    ratio_moment = None
    if atom.kind == "I":
        ratio_moment = ratio_plain / factor ** (atom.moments + 1)
    return TailReport(int(k), float(decay_order), ratio_plain, ratio_moment, float(factor),
                      float(tail.max(initial=0.0)), int(tail.size))
