"""Binary containers: round trips are bit-exact, corruption is rejected."""

import numpy as np
import pytest

from spheresig.errors import FormatError
from spheresig.formats import (
    read_ckpt1,
    read_spec1,
    read_sph1,
    write_ckpt1,
    write_spec1,
    write_sph1,
)
from spheresig.grid import make_grid
from spheresig.sft import SpectralCoeffs, SphericalSignal, random_coeffs


class TestSph1:
    def test_roundtrip_f64_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        sig = SphericalSignal(make_grid(8), rng.standard_normal((3, 16, 16)))
        path = str(tmp_path / "x.sph")
        write_sph1(path, sig)
        back = read_sph1(path)
        assert back.bandwidth == 8 and back.channels == 3
        np.testing.assert_array_equal(back.values, sig.values)

    def test_roundtrip_f32(self, tmp_path):
        rng = np.random.default_rng(1)
        sig = SphericalSignal(make_grid(4), rng.standard_normal((1, 8, 8)))
        path = str(tmp_path / "x.sph")
        write_sph1(path, sig, dtype="f32")
        back = read_sph1(path)
        assert back.values.dtype == np.float32
        np.testing.assert_array_equal(back.values, sig.values.astype(np.float32))

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "bad.sph"
        path.write_bytes(b"NOPE" + b"\0" * 16)
        with pytest.raises(FormatError):
            read_sph1(str(path))

    def test_truncated(self, tmp_path):
        rng = np.random.default_rng(2)
        sig = SphericalSignal(make_grid(4), rng.standard_normal((1, 8, 8)))
        path = tmp_path / "x.sph"
        write_sph1(str(path), sig)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(FormatError):
            read_sph1(str(path))

    def test_trailing_bytes_rejected(self, tmp_path):
        rng = np.random.default_rng(3)
        sig = SphericalSignal(make_grid(4), rng.standard_normal((1, 8, 8)))
        path = tmp_path / "x.sph"
        write_sph1(str(path), sig)
        path.write_bytes(path.read_bytes() + b"\0")
        with pytest.raises(FormatError):
            read_sph1(str(path))


class TestSpec1:
    def test_real_origin_roundtrip_bit_exact(self, tmp_path):
        """Only m >= 0 is stored; the reader reconstructs negative orders
        through the same conjugation rule the analysis used, so the round
        trip is exact to the bit."""
        c = random_coeffs(8, 2, np.random.default_rng(4))
        path = str(tmp_path / "x.spec")
        write_spec1(path, c)
        back = read_spec1(path)
        assert back.real_origin
        np.testing.assert_array_equal(back.coeffs, c.coeffs)

    def test_full_storage_roundtrip(self, tmp_path):
        rng = np.random.default_rng(5)
        raw = rng.standard_normal((1, 16)) + 1j * rng.standard_normal((1, 16))
        c = SpectralCoeffs(4, raw, real_origin=False)
        path = str(tmp_path / "x.spec")
        write_spec1(path, c)
        back = read_spec1(path)
        assert not back.real_origin
        np.testing.assert_array_equal(back.coeffs, c.coeffs)

    def test_payload_is_half_size_for_real_origin(self, tmp_path):
        c = random_coeffs(8, 1, np.random.default_rng(6))
        half = tmp_path / "half.spec"
        write_spec1(str(half), c)
        full = tmp_path / "full.spec"
        write_spec1(str(full), SpectralCoeffs(8, c.coeffs, real_origin=False))
        assert half.stat().st_size < full.stat().st_size

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "bad.spec"
        path.write_bytes(b"SPH1" + b"\0" * 16)
        with pytest.raises(FormatError):
            read_spec1(str(path))


class TestCkpt1:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(7)
        tensors = {
            "conv1/filters": rng.standard_normal((4, 2, 3)),
            "conv1/bias": rng.standard_normal(4),
            "head/weight": rng.standard_normal((3, 4)),
        }
        path = str(tmp_path / "m.ckpt")
        write_ckpt1(path, tensors)
        back = read_ckpt1(path)
        assert set(back) == set(tensors)
        for name in tensors:
            np.testing.assert_array_equal(
                back[name], tensors[name].astype(np.float32).astype(np.float64)
            )

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "bad.ckpt"
        path.write_bytes(b"CKPTX" + b"\0" * 8)
        with pytest.raises(FormatError):
            read_ckpt1(str(path))

    def test_truncated_tensor(self, tmp_path):
        path = tmp_path / "m.ckpt"
        write_ckpt1(str(path), {"w": np.ones((2, 2))})
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(FormatError):
            read_ckpt1(str(path))
