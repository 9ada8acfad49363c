"""Forward/inverse transform contracts: round trips, symmetry, Parseval."""

import numpy as np
import pytest

from spheresig.grid import make_grid
from spheresig.harmonics import build_table
from spheresig.sft import (
    SpectralCoeffs,
    SphericalSignal,
    bandlimit,
    coeff_index,
    evaluate_coeffs_at,
    isft,
    random_coeffs,
    sft_direct,
    sft_sepvar,
)
from spheresig.sft import _synthesis_complex


def table_for(b):
    return build_table(make_grid(b))


class TestForward:
    def test_constant_signal(self):
        table = table_for(8)
        sig = SphericalSignal(table.grid, np.full((1, 16, 16), 2.5))
        c = sft_sepvar(sig, table)
        np.testing.assert_allclose(c.at(0, 0, 0), 2.5 * np.sqrt(4 * np.pi), rtol=1e-12)
        rest = c.coeffs.copy()
        rest[0, coeff_index(0, 0)] = 0
        assert np.abs(rest).max() < 1e-9

    def test_zero_signal(self):
        table = table_for(4)
        sig = SphericalSignal(table.grid, np.zeros((2, 8, 8)))
        assert np.all(sft_direct(sig, table).coeffs == 0)

    def test_single_harmonic_recovery(self):
        """A real combination of degree-1 order-1 harmonics comes back alone."""
        table = table_for(8)
        z = 0.7 - 0.4j
        c = np.zeros((1, 64), dtype=np.complex128)
        c[0, coeff_index(1, 1)] = z
        c[0, coeff_index(1, -1)] = -np.conj(z)
        sig = isft(SpectralCoeffs(8, c), table)
        got = sft_sepvar(sig, table)
        np.testing.assert_allclose(got.at(0, 1, 1), z, atol=1e-12)
        np.testing.assert_allclose(got.at(0, 1, -1), -np.conj(z), atol=1e-12)
        mask = np.ones(64, bool)
        mask[[coeff_index(1, 1), coeff_index(1, -1)]] = False
        assert np.abs(got.coeffs[0, mask]).max() < 1e-9

    def test_direct_equals_sepvar(self):
        rng = np.random.default_rng(0)
        table = table_for(8)
        sig = SphericalSignal(table.grid, rng.standard_normal((3, 16, 16)))
        d = sft_direct(sig, table).coeffs
        s = sft_sepvar(sig, table).coeffs
        assert np.abs(d - s).max() < 1e-9

    def test_bandwidth_mismatch(self):
        sig = SphericalSignal(make_grid(4), np.zeros((1, 8, 8)))
        with pytest.raises(ValueError):
            sft_sepvar(sig, table_for(8))

    def test_real_symmetry_is_exact(self):
        """Negative orders are stored as exact conjugates, entry for entry."""
        rng = np.random.default_rng(1)
        table = table_for(8)
        sig = SphericalSignal(table.grid, rng.standard_normal((1, 16, 16)))
        c = sft_sepvar(sig, table)
        for l in range(8):
            for m in range(1, l + 1):
                lhs = c.at(0, l, -m)
                rhs = (-1) ** m * np.conj(c.at(0, l, m))
                assert lhs == rhs  # bitwise, not approximate


class TestInverse:
    def test_constant_coefficient(self):
        table = table_for(8)
        c = np.zeros((1, 64), dtype=np.complex128)
        c[0, 0] = np.sqrt(4 * np.pi)
        sig = isft(SpectralCoeffs(8, c), table)
        np.testing.assert_allclose(sig.values, 1.0, atol=1e-12)

    def test_zero_coeffs(self):
        table = table_for(4)
        sig = isft(SpectralCoeffs(4, np.zeros((1, 16), complex)), table)
        assert np.all(sig.values == 0)

    def test_roundtrip_many_bandwidths(self):
        for b in (2, 4, 8, 16, 32):
            table = table_for(b)
            c = random_coeffs(b, channels=2, rng=np.random.default_rng(b))
            back = sft_sepvar(isft(c, table), table)
            assert np.abs(back.coeffs - c.coeffs).max() < 1e-9

    def test_imaginary_residue_of_complex_path(self):
        table = table_for(8)
        c = random_coeffs(8, 1, np.random.default_rng(2))
        full = _synthesis_complex(c.coeffs, table)
        assert np.abs(full.imag).max() < 1e-9

    def test_complex_and_real_paths_agree(self):
        table = table_for(8)
        c = random_coeffs(8, 1, np.random.default_rng(3))
        real_path = isft(c, table).values
        complex_path = _synthesis_complex(c.coeffs, table).real
        np.testing.assert_allclose(real_path, complex_path, atol=1e-12)

    def test_output_dtype(self):
        table = table_for(4)
        c = random_coeffs(4, 1, np.random.default_rng(0))
        assert isft(c, table, dtype=np.float32).values.dtype == np.float32
        assert isft(c, table).values.dtype == np.float64


class TestParseval:
    def test_energy_identity(self):
        b = 16
        table = table_for(b)
        c = random_coeffs(b, 1, np.random.default_rng(4))
        sig = isft(c, table)
        mu = (np.sqrt(2 * np.pi) / (2 * b)) * table.grid.quad_weights
        energy = float((mu[:, None] * sig.values[0] ** 2).sum())
        spectral = float((np.abs(c.coeffs) ** 2).sum())
        np.testing.assert_allclose(energy, spectral, rtol=1e-8)


class TestBandlimit:
    def test_projection_identity_on_bandlimited(self):
        table = table_for(8)
        sig = isft(random_coeffs(8, 1, np.random.default_rng(5)), table)
        out = bandlimit(sig, table)
        np.testing.assert_allclose(out.values, sig.values, atol=1e-9)

    def test_idempotent(self):
        rng = np.random.default_rng(6)
        table = table_for(8)
        sig = SphericalSignal(table.grid, rng.standard_normal((1, 16, 16)))
        once = bandlimit(sig, table)
        twice = bandlimit(once, table)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-9)

    def test_step_signal_loses_energy(self):
        table = table_for(8)
        v = np.zeros((1, 16, 16))
        v[0, :, :3] = 1.0  # sharp longitudinal step
        sig = SphericalSignal(table.grid, v)
        out = bandlimit(sig, table)
        assert np.abs(out.values - v).max() > 1e-3
        mu = (np.sqrt(2 * np.pi) / 16) * table.grid.quad_weights
        assert (mu[:, None] * out.values[0] ** 2).sum() < (mu[:, None] * v[0] ** 2).sum()


class TestPointwiseSynthesis:
    def test_matches_grid_synthesis(self):
        table = table_for(6)
        c = random_coeffs(6, 2, np.random.default_rng(7))
        sig = isft(c, table)
        tt, pp = np.meshgrid(table.grid.thetas, table.grid.phis, indexing="ij")
        np.testing.assert_allclose(evaluate_coeffs_at(c, tt, pp), sig.values, atol=1e-12)


class TestSignalValidation:
    def test_rejects_nonfinite(self):
        v = np.zeros((1, 8, 8))
        v[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            SphericalSignal(make_grid(4), v)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            SphericalSignal(make_grid(4), np.zeros((1, 8, 10)))
