"""Binary container formats: SPH1 (signals), SPEC1 (spectra), CKPT1 (checkpoints).

All integers and floats are little-endian.

SPH1:  magic ``SPH1`` | u32 bandwidth | u32 channels | u8 dtype (0=f32, 1=f64)
       | payload: channel-major, then colatitude row, then longitude column.

SPEC1: magic ``SPEC`` | u32 bandwidth | u32 channels | u8 real_origin
       | packed complex float64 pairs in (l, m) lexicographic order, with m
       running -l..l, or 0..l when real_origin is set (negative orders are
       reconstructed from the conjugation symmetry, losslessly because the
       analysis path derives them from the same symmetry).

CKPT1: magic ``CKPT1`` | u32 tensor count | per tensor: u16 name length,
       utf-8 name, u8 rank, u32 dims, float32 payload.

Readers reject wrong magic bytes and truncated payloads.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import FormatError
from .grid import make_grid
from .sft import SpectralCoeffs, SphericalSignal

_SPH_MAGIC = b"SPH1"
_SPEC_MAGIC = b"SPEC"
_CKPT_MAGIC = b"CKPT1"


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FormatError(f"truncated file while reading {what}")
    return data


def write_sph1(path: str, signal: SphericalSignal, dtype: str = "f64") -> None:
    if dtype not in ("f32", "f64"):
        raise ValueError(f"dtype must be f32 or f64, got {dtype}")
    code = 0 if dtype == "f32" else 1
    np_dtype = "<f4" if dtype == "f32" else "<f8"
    with open(path, "wb") as fh:
        fh.write(_SPH_MAGIC)
        fh.write(struct.pack("<IIB", signal.bandwidth, signal.channels, code))
        fh.write(np.ascontiguousarray(signal.values, dtype=np_dtype).tobytes())


def read_sph1(path: str) -> SphericalSignal:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != _SPH_MAGIC:
            raise FormatError(f"{path}: not an SPH1 file")
        b, channels, code = struct.unpack("<IIB", _read_exact(fh, 9, "header"))
        if code not in (0, 1):
            raise FormatError(f"{path}: unknown dtype code {code}")
        np_dtype = "<f4" if code == 0 else "<f8"
        itemsize = 4 if code == 0 else 8
        n = 2 * b
        payload = _read_exact(fh, channels * n * n * itemsize, "payload")
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after payload")
    values = np.frombuffer(payload, dtype=np_dtype).reshape(channels, n, n)
    return SphericalSignal(make_grid(b), values.astype(np_dtype[1:], copy=True))


def _half_index(b: int) -> np.ndarray:
    """Packed-layout indices of the m >= 0 coefficients, (l, m) lexicographic."""
    idx = []
    for l in range(b):
        for m in range(l + 1):
            idx.append(l * l + l + m)
    return np.array(idx)


def write_spec1(path: str, coeffs: SpectralCoeffs) -> None:
    b = coeffs.bandwidth
    with open(path, "wb") as fh:
        fh.write(_SPEC_MAGIC)
        fh.write(struct.pack("<IIB", b, coeffs.channels, 1 if coeffs.real_origin else 0))
        if coeffs.real_origin:
            data = coeffs.coeffs[:, _half_index(b)]
        else:
            data = coeffs.coeffs
        fh.write(np.ascontiguousarray(data, dtype="<c16").tobytes())


def read_spec1(path: str) -> SpectralCoeffs:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != _SPEC_MAGIC:
            raise FormatError(f"{path}: not a SPEC1 file")
        b, channels, real_origin = struct.unpack("<IIB", _read_exact(fh, 9, "header"))
        count = (b * (b + 1)) // 2 if real_origin else b * b
        payload = _read_exact(fh, channels * count * 16, "payload")
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after payload")
    data = np.frombuffer(payload, dtype="<c16").reshape(channels, count)
    if not real_origin:
        return SpectralCoeffs(b, data.copy(), real_origin=False)
    full = np.zeros((channels, b * b), dtype=np.complex128)
    full[:, _half_index(b)] = data
    for l in range(b):
        base = l * l + l
        for m in range(1, l + 1):
            full[:, base - m] = (-1) ** m * np.conj(full[:, base + m])
    return SpectralCoeffs(b, full, real_origin=True)


def write_ckpt1(path: str, tensors: dict[str, np.ndarray]) -> None:
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<I", len(tensors)))
        for name, arr in tensors.items():
            blob = name.encode("utf-8")
            arr = np.ascontiguousarray(arr, dtype="<f4")
            fh.write(struct.pack("<H", len(blob)))
            fh.write(blob)
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes())


def read_ckpt1(path: str) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    with open(path, "rb") as fh:
        if _read_exact(fh, 5, "magic") != _CKPT_MAGIC:
            raise FormatError(f"{path}: not a CKPT1 file")
        (count,) = struct.unpack("<I", _read_exact(fh, 4, "count"))
        for _ in range(count):
            (nlen,) = struct.unpack("<H", _read_exact(fh, 2, "name length"))
            name = _read_exact(fh, nlen, "name").decode("utf-8")
            (rank,) = struct.unpack("<B", _read_exact(fh, 1, "rank"))
            shape = struct.unpack(f"<{rank}I", _read_exact(fh, 4 * rank, "shape"))
            size = int(np.prod(shape)) if rank else 1
            data = _read_exact(fh, 4 * size, f"tensor {name}")
            out[name] = np.frombuffer(data, dtype="<f4").reshape(shape).astype(np.float64)
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after payload")
    return out
