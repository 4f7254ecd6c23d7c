"""Pure numpy implementations of the hot kernels.

These mirror the compiled module function for function and serve as the
fallback when the extension is unavailable or disabled.
"""

import numpy as np

# beyond this the logistic form of the step underflows cleanly to 0 or 1
_EXP_CLIP = 700.0


def smooth_step(tau):
    tau = np.asarray(tau, dtype=float)
    out = np.zeros(tau.shape)
    out[tau >= 1.0] = 1.0
    mid = (tau > 0.0) & (tau < 1.0)
    t = tau[mid]
    with np.errstate(over="ignore", divide="ignore"):  # subnormal t overflows 1/t; the clip handles it
        expo = np.clip(1.0 / t - 1.0 / (1.0 - t), -_EXP_CLIP, _EXP_CLIP)
    out[mid] = 1.0 / (1.0 + np.exp(expo))
    return out


def interval_windows(xi, rise_c, rise_h, fall_c, fall_h):
    """Windows ``step(rise) * (1 - step(fall))`` evaluated on a shared abscissa.

    ``xi`` has shape ``(P,)``; the four parameter arrays have shape ``(B,)``;
    the result has shape ``(B, P)``.
    """
    xi = np.asarray(xi, dtype=float)[None, :]
    rise = smooth_step((xi - (rise_c[:, None] - rise_h[:, None])) / (2.0 * rise_h[:, None]))
    fall = smooth_step((xi - (fall_c[:, None] - fall_h[:, None])) / (2.0 * fall_h[:, None]))
    return rise * (1.0 - fall)


def gather_blocks(spectrum, dxi, starts, lengths, rise_c, rise_h, fall_c, fall_h, width, offsets):
    """Windowed spectral segments packed into rows of length ``width``.

    Row ``b`` receives ``spectrum[(starts[b] + i) mod N] * window_b(xi)`` at
    position ``(offsets[b] + i) mod width`` for ``i < lengths[b]``.
    """
    n = spectrum.shape[0]
    count = starts.shape[0]
    out = np.zeros((count, width), dtype=complex)
    for b in range(count):
        length = int(lengths[b])
        if length <= 0:
            continue
        m = starts[b] + np.arange(length)
        xi = m * dxi
        rise = smooth_step((xi - (rise_c[b] - rise_h[b])) / (2.0 * rise_h[b]))
        fall = smooth_step((xi - (fall_c[b] - fall_h[b])) / (2.0 * fall_h[b]))
        pos = (offsets[b] + np.arange(length)) % width
        out[b, pos] = spectrum[m % n] * (rise * (1.0 - fall))
    return out


def row_power_sums(rows, exponents):
    """Per-row ``sum |z|^p`` for each finite exponent, ``max |z|`` for ``inf``.

    Returns an array of shape ``(B, len(exponents))``.
    """
    mod = np.abs(rows)
    out = np.empty((rows.shape[0], len(exponents)))
    for j, p in enumerate(exponents):
        if np.isinf(p):
            out[:, j] = mod.max(axis=1, initial=0.0)
        elif p == 2.0:
            out[:, j] = np.einsum("ij,ij->i", mod, mod)
        elif p == 1.0:
            out[:, j] = mod.sum(axis=1)
        else:
            out[:, j] = (mod ** p).sum(axis=1)
    return out
