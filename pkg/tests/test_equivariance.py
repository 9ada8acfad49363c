"""Measurement harness: exact rows, nonzero rows, exclusions, report forms."""

import json

import numpy as np
import pytest

from spheresig.equivariance import measure
from spheresig.grid import make_grid
from spheresig.network import init_parameters, shared_table, stack_config
from spheresig.sft import SphericalSignal, random_bandlimited_signal


def bandlimited_signals(b, count, seed):
    rng = np.random.default_rng(seed)
    return [random_bandlimited_signal(b, 1, rng, shared_table(b)) for _ in range(count)]


class TestExactRows:
    def test_linear_spectral_pool_bandlimited_is_zero(self):
        """Linear layers + spectral pooling + bandlimited input: every layer exact."""
        cfg = stack_config(
            16, [4, 4, 8], in_channels=1, num_classes=3, pool="sp", pool_layers=[2],
            nonlinearity="none",
        )
        params = init_parameters(cfg, seed=0)
        rep = measure(cfg, params, bandlimited_signals(16, 3, 1), rotations=1, seed=2)
        assert rep.per_layer_error.max() < 1e-6

    def test_input_layer_zero_for_bandlimited(self):
        cfg = stack_config(
            16, [4, 4], in_channels=1, num_classes=3, pool="wap", pool_layers=[1],
        )
        params = init_parameters(cfg, seed=3)
        rep = measure(cfg, params, bandlimited_signals(16, 2, 4), rotations=1, seed=5)
        assert rep.layer_names[0] == "input"
        assert rep.per_layer_error[0] < 1e-6


class TestNonzeroRows:
    def test_untrained_nonlinear_network_has_errors_by_design(self):
        """Random (untrained) weights already show the nonlinearity's error."""
        cfg = stack_config(
            16, [4, 4], in_channels=1, num_classes=3, pool="wap", pool_layers=[1],
        )
        params = init_parameters(cfg, seed=6)
        signals = []
        rng = np.random.default_rng(7)
        for s in bandlimited_signals(16, 3, 8):
            signals.append(SphericalSignal(s.grid, s.values - s.values.mean()))
        rep = measure(cfg, params, signals, rotations=2, seed=9)
        assert rep.per_layer_error[1:].max() > 1e-4
        assert np.isfinite(rep.per_layer_error).all()


class TestEdgeCases:
    def test_zero_norm_sample_excluded_with_warning(self):
        cfg = stack_config(8, [3], in_channels=1, num_classes=3)
        params = init_parameters(cfg, seed=10)
        zero = SphericalSignal(make_grid(8), np.zeros((1, 16, 16)))
        good = bandlimited_signals(8, 1, 11)[0]
        with pytest.warns(UserWarning, match="zero-norm"):
            rep = measure(cfg, params, [zero, good], rotations=1, seed=12)
        assert np.isfinite(rep.per_layer_error).all()

    def test_empty_dataset_rejected(self):
        cfg = stack_config(8, [3], in_channels=1, num_classes=3)
        with pytest.raises(ValueError):
            measure(cfg, init_parameters(cfg), [], rotations=1)


class TestReportOutput:
    def test_json_and_table_forms(self):
        cfg = stack_config(8, [3, 4], in_channels=1, num_classes=3, pool="sp", pool_layers=[1])
        params = init_parameters(cfg, seed=13)
        rep = measure(cfg, params, bandlimited_signals(8, 2, 14), rotations=1, seed=15)
        doc = json.loads(rep.to_json())
        assert doc["layers"] == ["input", "conv1", "conv2"]
        assert len(doc["per_layer_error"]) == 3
        table = rep.table()
        assert "conv1" in table and "input" in table

    def test_reproducible_under_seed(self):
        cfg = stack_config(8, [3], in_channels=1, num_classes=3)
        params = init_parameters(cfg, seed=16)
        sigs = bandlimited_signals(8, 2, 17)
        a = measure(cfg, params, sigs, rotations=2, seed=18)
        c = measure(cfg, params, sigs, rotations=2, seed=18)
        np.testing.assert_array_equal(a.per_layer_error, c.per_layer_error)
