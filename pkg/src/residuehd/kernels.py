"""Closed-form similarity kernels of modular phasor encodings.

In the infinite-dimensional limit the kernel of an encoding with phases
on the m-th roots of unity is a sinc comb, sum_s sinc(x - m s), which
collapses to a sum-free expression whose branch depends on the parity
of m:

    m even:  K_m(x) = (1/m) sin(pi x) cot(pi x / m)
    m odd:   K_m(x) = (1/m) sin(pi x) csc(pi x / m)

Both branches are m-periodic, even, equal 1 at x = 0 (mod m), and
vanish at every other integer. Composing moduli multiplies kernels.
At integer offsets the removable singularity at x = 0 (mod m) is the
only delicate point; evaluation here goes through normalized sinc
ratios, which are uniformly stable (naive cot/csc would overflow).
"""

from __future__ import annotations

import csv
from typing import Iterable, Sequence

import numpy as np

from .phasor import ModulusBase, encode_rational, similarity
from .residue import ResidueSystem

__all__ = [
    "analytic_kernel",
    "sinc_comb",
    "empirical_kernel",
    "product_kernel",
    "kernel_curve",
    "write_curve_csv",
]


def analytic_kernel(m: int, dx):
    """Closed-form kernel K_m at offset dx (scalar or array).

    Returns exactly 1.0 at dx = 0 (mod m) and exactly 0.0 at all other
    integer offsets.
    """
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    dx = np.asarray(dx, dtype=float)
    # reduce to the principal period [-m/2, m/2]; both branches are m-periodic
    t = dx - m * np.round(dx / m)
    # sin(pi t) / (m sin(pi t/m)) written as a stable sinc ratio;
    # |t/m| <= 1/2 keeps the denominator away from zero
    ratio = np.sinc(t) / np.sinc(t / m)
    if m % 2 == 0:
        out = ratio * np.cos(np.pi * t / m)
    else:
        out = ratio
    # integer offsets are exact: 1 at multiples of m, 0 at the rest
    out = np.where(t == np.round(t), np.where(t == 0.0, 1.0, 0.0), out)
    return float(out) if out.ndim == 0 else out


def sinc_comb(m: int, dx, n_terms: int):
    """Truncated sinc comb: sum over s in [-n_terms, n_terms] of sinc(dx - m s)."""
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    dx = np.asarray(dx, dtype=float)
    s = np.arange(-n_terms, n_terms + 1, dtype=float)
    out = np.sinc(dx[..., None] - m * s).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def product_kernel(moduli: Sequence[int], dx):
    """Kernel of a composed residue encoding: prod_k K_{m_k}(dx)."""
    out = None
    for m in moduli:
        k = np.asarray(analytic_kernel(m, dx))
        out = k if out is None else out * k
    return float(out) if out.ndim == 0 else out


def empirical_kernel(encoder, dx_grid) -> np.ndarray:
    """Measured similarity(z(0), z(dx)) per grid point.

    `encoder` is a ModulusBase or a ResidueSystem; encodings go through
    the public rational-encoding path so the estimate exercises the same
    code every consumer uses.
    """
    if isinstance(encoder, ModulusBase):
        enc = lambda q: encode_rational(encoder, q)
    elif isinstance(encoder, ResidueSystem):
        enc = encoder.encode_rational
    else:
        raise TypeError(f"expected ModulusBase or ResidueSystem, got {type(encoder).__name__}")
    origin = enc(0.0)
    return np.array([similarity(origin, enc(float(dx))) for dx in np.asarray(dx_grid, dtype=float)])


def kernel_curve(encoder, dx_grid) -> list[tuple[float, float, float, float]]:
    """Rows (dx, empirical, analytic, abs_error) for an encoder over a grid."""
    dx_grid = np.asarray(dx_grid, dtype=float)
    emp = empirical_kernel(encoder, dx_grid)
    if isinstance(encoder, ModulusBase):
        ana = analytic_kernel(encoder.modulus, dx_grid)
    else:
        ana = product_kernel(encoder.moduli, dx_grid)
    ana = np.asarray(ana, dtype=float)
    return [
        (float(dx), float(e), float(a), float(abs(e - a)))
        for dx, e, a in zip(dx_grid, emp, ana)
    ]


def write_curve_csv(path, rows: Iterable[tuple[float, float, float, float]]) -> None:
    """CSV with header dx,empirical,analytic,abs_error (repr floats, '.' decimal)."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh)
        w.writerow(["dx", "empirical", "analytic", "abs_error"])
        for dx, emp, ana, err in rows:
            w.writerow([repr(float(dx)), repr(float(emp)), repr(float(ana)), repr(float(err))])
