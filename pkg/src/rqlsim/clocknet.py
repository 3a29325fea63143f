"""Multisection quarter-wave impedance transformers for the clock feed.

Synthesis follows small-reflection theory with an equal-ripple (Chebyshev)
passband: section reflection coefficients come from expanding
G_m * T_N(sec(theta_m) cos(theta)) in cosines, and section impedances from
ln Z_{k+1} = ln Z_k + 2 G_k.  A maximally-flat (binomial) alternative is
included.  Designs are verified exactly with an ABCD-matrix cascade of ideal
lines, so the synthesized band can be checked against the achieved return
loss rather than the approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C


class MatchDesignError(ValueError):
    """Requested ripple/bandwidth combination is unreachable; carries the
    ripple the design could achieve over that band."""

    def __init__(self, message: str, achievable_ripple_db: float):
        super().__init__(message)
        self.achievable_ripple_db = achievable_ripple_db


@dataclass(frozen=True)
class TransformerDesign:
    z_source: float
    z_load: float
    n_sections: int
    f_center_hz: float
    section_impedances: tuple[float, ...]
    ripple_db: float | None = None  # in-band |S11| bound from synthesis
    fractional_bandwidth: float | None = None

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("section,impedance_ohm\n")
            for k, z in enumerate(self.section_impedances, start=1):
                fh.write(f"{k},{z:.6f}\n")


def _chebyshev_gammas(n: int, ln_ratio: float, sec_theta_m: float) -> list[float]:
    """Partial reflection coefficients G_0..G_N from the exact cosine
    expansion of gamma_m * T_N(sec(theta_m) cos(theta))."""
    gamma_m = abs(ln_ratio) / (2.0 * _coshN(n, sec_theta_m))
    # T_N(sec_theta_m * u) as a Chebyshev series in u: scale the power
    # series of T_N, then convert back.
    power = C.cheb2poly([0.0] * n + [1.0])
    power *= sec_theta_m ** np.arange(n + 1)
    a = C.poly2cheb(power)  # T_N(x u) = sum a_k T_k(u), T_k(cos t) = cos kt
    gammas = [0.0] * (n + 1)
    for k in range(n, -1, -2):
        coeff = gamma_m * a[k]
        if k == 0:
            gammas[n // 2] = coeff
        else:
            i = (n - k) // 2
            gammas[i] = coeff / 2.0
            gammas[n - i] = coeff / 2.0
    sign = 1.0 if ln_ratio >= 0 else -1.0
    return [sign * g for g in gammas]


def _binomial_gammas(n: int, ln_ratio: float) -> list[float]:
    total = 2.0 ** n
    return [ln_ratio / 2.0 * math.comb(n, k) / total for k in range(n + 1)]


def _coshN(n: int, x: float) -> float:
    """T_n(x) continued to x >= 1."""
    if x < 1.0:
        return math.cos(n * math.acos(max(-1.0, x)))
    return math.cosh(n * math.acosh(x))


def _acoshT(n: int, value: float) -> float:
    """Inverse of T_n on [1, inf): smallest x with T_n(x) = value."""
    if value <= 1.0:
        return 1.0
    return math.cosh(math.acosh(value) / n)


def chebyshev_bandwidth(
    z_source: float, z_load: float, n_sections: int, ripple_db: float
) -> float:
    """Fractional bandwidth over which an equal-ripple design holds |S11|
    below the ripple (small-reflection theory)."""
    gamma_m = 10.0 ** (ripple_db / 20.0)
    ln_ratio = abs(math.log(z_load / z_source))
    sec_tm = _acoshT(n_sections, ln_ratio / (2.0 * gamma_m))
    theta_m = math.acos(min(1.0, 1.0 / sec_tm))
    return 2.0 - 4.0 * theta_m / math.pi


def design_transformer(
    z_source: float = 50.0,
    z_load: float = 4.0,
    n_sections: int = 6,
    f_center_hz: float = 7.5e9,
    ripple_db: float = -30.0,
    band_hz: tuple[float, float] | None = None,
    kind: str = "chebyshev",
) -> TransformerDesign:
    """Synthesize a quarter-wave-section impedance ladder.

    ``ripple_db`` is the in-band return-loss target (negative dB).  With
    ``band_hz`` the equal-ripple bandwidth is pinned to that band and the
    achievable ripple checked against the target, raising MatchDesignError
    if the combination cannot be met.
    """
    if z_source <= 0 or z_load <= 0 or z_source == z_load:
        raise ValueError("source and load impedances must be positive and differ")
    if n_sections < 1:
        raise ValueError("need at least one section")
    if f_center_hz <= 0:
        raise ValueError("center frequency must be positive")
    ln_ratio = math.log(z_load / z_source)

    if kind == "binomial":
        gammas = _binomial_gammas(n_sections, ln_ratio)
        ripple, fbw = None, None
    elif kind == "chebyshev":
        if ripple_db >= 0:
            raise ValueError("ripple must be negative dB")
        gamma_m = 10.0 ** (ripple_db / 20.0)
        if band_hz is not None:
            f_lo, f_hi = band_hz
            if not 0 < f_lo < f_center_hz < f_hi:
                raise ValueError("band must straddle the center frequency")
            theta_m = math.pi / 2.0 * (f_lo / f_center_hz)
            sec_tm = 1.0 / math.cos(theta_m)
            achievable = abs(ln_ratio) / (2.0 * _coshN(n_sections, sec_tm))
            if achievable > gamma_m:
                ach_db = 20.0 * math.log10(achievable)
                raise MatchDesignError(
                    f"{n_sections} sections reach only {ach_db:.1f} dB ripple "
                    f"over {f_lo / 1e9:.3g}-{f_hi / 1e9:.3g} GHz",
                    ach_db,
                )
            gamma_m = achievable
        else:
            sec_tm = _acoshT(n_sections, abs(ln_ratio) / (2.0 * gamma_m))
        gammas = _chebyshev_gammas(n_sections, ln_ratio, sec_tm)
        ripple = 20.0 * math.log10(
            abs(ln_ratio) / (2.0 * _coshN(n_sections, sec_tm))
        )
        theta_m = math.acos(min(1.0, 1.0 / sec_tm))
        fbw = 2.0 - 4.0 * theta_m / math.pi
    else:
        raise ValueError(f"unknown design kind {kind!r}")

    ln_z = math.log(z_source)
    zs = []
    for g in gammas[:-1]:
        ln_z += 2.0 * g
        zs.append(math.exp(ln_z))
    return TransformerDesign(
        z_source,
        z_load,
        n_sections,
        f_center_hz,
        tuple(zs),
        ripple,
        fbw,
    )


def cascade_sparams(design: TransformerDesign, frequencies_hz) -> np.ndarray:
    """Exact (S11, S21) of the ideal lossless ladder at each frequency.

    Each section is a quarter wave long at the design center; the chain
    ABCD product is referenced to the source and load impedances.
    """
    freqs = np.atleast_1d(np.asarray(frequencies_hz, dtype=float))
    if np.any(freqs <= 0):
        raise ValueError("frequencies must be positive")
    out = np.empty((len(freqs), 2), dtype=complex)
    zs, zl = design.z_source, design.z_load
    for i, f in enumerate(freqs):
        theta = math.pi / 2.0 * f / design.f_center_hz
        a, b, c, d = 1.0 + 0j, 0.0 + 0j, 0.0 + 0j, 1.0 + 0j
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        for z in design.section_impedances:
            sa, sb = cos_t, 1j * z * sin_t
            sc, sd = 1j * sin_t / z, cos_t
            a, b, c, d = (
                a * sa + b * sc,
                a * sb + b * sd,
                c * sa + d * sc,
                c * sb + d * sd,
            )
        denom = a * zl + b + c * zs * zl + d * zs
        out[i, 0] = (a * zl + b - c * zs * zl - d * zs) / denom
        out[i, 1] = 2.0 * math.sqrt(zs * zl) / denom
    return out


def return_loss_db(s11: np.ndarray) -> np.ndarray:
    """Return loss in positive dB; infinite for a perfect match."""
    mag = np.abs(np.atleast_1d(s11))
    with np.errstate(divide="ignore"):
        return -20.0 * np.log10(mag)


def sweep_to_csv(design: TransformerDesign, frequencies_hz, path) -> None:
    """Touchstone-style CSV: re/im columns per parameter."""
    s = cascade_sparams(design, frequencies_hz)
    with open(path, "w") as fh:
        fh.write("frequency_hz,s11_re,s11_im,s21_re,s21_im\n")
        for f, (s11, s21) in zip(np.atleast_1d(frequencies_hz), s):
            fh.write(
                f"{f:.6g},{s11.real:.9g},{s11.imag:.9g},"
                f"{s21.real:.9g},{s21.imag:.9g}\n"
            )
