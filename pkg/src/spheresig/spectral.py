"""Layer vocabulary: harmonic-domain convolution, filters, pooling, descriptors.

Convolution with a zonal (latitude-constant) filter is a per-degree scaling
of the signal's coefficients:

    y_m^l = 2 pi sqrt(4 pi / (2l+1)) * f_m^l * h_0^l,

where h_0^l is the filter's order-zero spectrum.  Filters are parameterized
either by the full length-b spectrum or by a few anchor degrees with linear
interpolation in between, which enforces spectral smoothness and hence
spatial locality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import make_grid
from .harmonics import HarmonicTable, build_table
from .sft import SpectralCoeffs, SphericalSignal, isft


@dataclass(frozen=True)
class ZonalFilterSpec:
    """Zonal filter as an order-zero spectrum, full or anchor-interpolated."""

    mode: str  # "full" | "anchored"
    bandwidth: int
    full_coeffs: np.ndarray | None = None
    anchor_degrees: np.ndarray | None = None
    anchor_values: np.ndarray | None = None

    def __post_init__(self) -> None:
        b = self.bandwidth
        if self.mode == "full":
            fc = np.asarray(self.full_coeffs, dtype=np.float64)
            if fc.shape != (b,):
                raise ValueError(f"full spectrum must have length {b}, got {fc.shape}")
            object.__setattr__(self, "full_coeffs", fc)
        elif self.mode == "anchored":
            deg = np.asarray(self.anchor_degrees, dtype=np.int64)
            val = np.asarray(self.anchor_values, dtype=np.float64)
            if deg.ndim != 1 or deg.shape != val.shape:
                raise ValueError("anchor degrees and values must be 1-d and matched")
            if len(deg) < 2 or np.any(np.diff(deg) <= 0):
                raise ValueError("anchor degrees must be strictly increasing")
            if deg[0] != 0 or deg[-1] != b - 1:
                raise ValueError(f"anchors must span degrees 0 .. {b - 1}")
            object.__setattr__(self, "anchor_degrees", deg)
            object.__setattr__(self, "anchor_values", val)
        else:
            raise ValueError(f"unknown filter mode {self.mode!r}")


def anchor_layout(b: int, n: int) -> np.ndarray:
    """Default anchor placement: n uniformly spaced degrees including endpoints."""
    if n < 2 or n > b:
        raise ValueError(f"anchor count must be in [2, {b}], got {n}")
    return np.unique(np.round(np.linspace(0, b - 1, n)).astype(np.int64))

def realize_filter(spec: ZonalFilterSpec) -> np.ndarray:
    """Length-b order-zero spectrum of the filter."""
    if spec.mode == "full":
        return np.array(spec.full_coeffs, dtype=np.float64)
    return np.interp(
        np.arange(spec.bandwidth), spec.anchor_degrees, spec.anchor_values
    )


def conv_scale(b: int) -> np.ndarray:
    """Degree-wise constant 2 pi sqrt(4 pi / (2l+1)) of the convolution theorem."""
    ls = np.arange(b)
    return 2.0 * np.pi * np.sqrt(4.0 * np.pi / (2.0 * ls + 1.0))


def degree_of_index(b: int) -> np.ndarray:
    """Degree of each slot in the packed coefficient layout, length b*b."""
    out = np.empty(b * b, dtype=np.int64)
    for l in range(b):
        out[l * l : (l + 1) * (l + 1)] = l
    return out


def conv_spectral(f: SpectralCoeffs, h: ZonalFilterSpec) -> SpectralCoeffs:
    """Convolve every channel of ``f`` with the zonal filter ``h``."""
    if h.bandwidth != f.bandwidth:
        raise ValueError(
            f"bandwidth mismatch: coeffs b={f.bandwidth}, filter b={h.bandwidth}"
        )
    s = conv_scale(f.bandwidth) * realize_filter(h)
    out = f.coeffs * s[degree_of_index(f.bandwidth)]
    return SpectralCoeffs(f.bandwidth, out, real_origin=f.real_origin)


def filter_to_signal(spec: ZonalFilterSpec, table: HarmonicTable | None = None) -> SphericalSignal:
    """Spatial realization of a zonal filter (order-zero synthesis)."""
    b = spec.bandwidth
    table = build_table(make_grid(b)) if table is None else table
    c = np.zeros((1, b * b), dtype=np.complex128)
    ls = np.arange(b)
    c[0, ls * ls + ls] = realize_filter(spec)
    return isft(SpectralCoeffs(b, c, real_origin=True), table)


# ---------------------------------------------------------------------------
# Pooling.
# ---------------------------------------------------------------------------


def spectral_pool(f: SpectralCoeffs, presmooth: bool = False) -> SpectralCoeffs:
    """Halve the bandwidth by dropping all degrees >= b/2.

    With ``presmooth`` a raised-cosine taper is applied over the retained
    degrees first, trading ringing for attenuation (off by default).
    """
    b = f.bandwidth
    if b % 2 != 0:
        raise ValueError(f"spectral pooling requires even bandwidth, got {b}")
    half = b // 2
    out = np.array(f.coeffs[:, : half * half])
    if presmooth:
        ls = degree_of_index(half)
        out *= np.cos(0.5 * np.pi * ls / half) ** 2
    return SpectralCoeffs(half, out, real_origin=f.real_origin)


def _pool_blocks(values: np.ndarray) -> np.ndarray:
    """Reshape (..., 2b, 2b) into 2x2 blocks (..., b, b, 2, 2)."""
    n = values.shape[-1]
    blocked = values.reshape(values.shape[:-2] + (n // 2, 2, n // 2, 2))
    return np.moveaxis(blocked, -3, -2)


def weighted_avg_pool(signal: SphericalSignal) -> SphericalSignal:
    """2x2 downsampling averaging with cell-area (sin theta) weights.

    A block whose two rows both carry zero weight falls back to the plain
    mean (cannot occur on a valid grid, where only the pole row has sin 0).
    """
    b = signal.bandwidth
    if b % 2 != 0:
        raise ValueError(f"pooling requires even bandwidth, got {b}")
    blocks = _pool_blocks(signal.values)  # (..., b, b, 2, 2)
    rw = signal.grid.area_weights.reshape(b, 2)  # weight of each theta row in a block
    bw = np.broadcast_to(rw[:, None, :, None], blocks.shape[-4:])
    num = (blocks * bw).sum(axis=(-2, -1))
    den = bw.sum(axis=(-2, -1))
    safe = den > 0.0
    out = np.where(safe, num / np.where(safe, den, 1.0), blocks.mean(axis=(-2, -1)))
    return SphericalSignal(make_grid(b // 2), out)


def max_pool(signal: SphericalSignal) -> SphericalSignal:
    """Plain 2x2 block maximum; kept for ablation parity with area-weighted pooling."""
    b = signal.bandwidth
    if b % 2 != 0:
        raise ValueError(f"pooling requires even bandwidth, got {b}")
    out = _pool_blocks(signal.values).max(axis=(-2, -1))
    return SphericalSignal(make_grid(b // 2), out)


# ---------------------------------------------------------------------------
# Invariant descriptors and nonlinearity.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantDescriptor:
    """Rotation-invariant summary: one value per channel (WGAP) or per
    (channel, degree) pair (MAG-L)."""

    kind: str  # "wgap" | "magl"
    values: np.ndarray = field(repr=False)


def wgap(signal: SphericalSignal) -> InvariantDescriptor:
    """Weighted global average pooling; cell weight is the sine of colatitude."""
    w = signal.grid.area_weights
    num = (signal.values * w[:, None]).sum(axis=(-2, -1))
    den = w.sum() * signal.grid.n
    return InvariantDescriptor(kind="wgap", values=num / den)


def magl(coeffs: SpectralCoeffs) -> InvariantDescriptor:
    """Per-degree coefficient norms, invariant to rotation by unitarity."""
    b = coeffs.bandwidth
    out = np.empty((coeffs.channels, b), dtype=np.float64)
    for l in range(b):
        out[:, l] = np.linalg.norm(coeffs.degree(l), axis=1)
    return InvariantDescriptor(kind="magl", values=out)


def pointwise_nonlinearity(signal: SphericalSignal, kind: str = "relu") -> SphericalSignal:
    """Elementwise nonlinearity in the spatial domain."""
    if kind == "relu":
        return SphericalSignal(signal.grid, np.maximum(signal.values, 0.0))
    if kind in ("none", "identity"):
        return signal
    raise ValueError(f"unknown nonlinearity {kind!r}")
