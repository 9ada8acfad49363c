"""Command-line pipelines: exit codes, reproducibility, end-to-end flows."""

import json

import numpy as np
import pytest

from spheresig.cli import main
from spheresig.formats import read_spec1, read_sph1, write_sph1
from spheresig.grid import make_grid
from spheresig.harmonics import build_table
from spheresig.sft import isft, random_coeffs
from spheresig.synth import star_mesh


@pytest.fixture()
def star_off(tmp_path):
    mesh = star_mesh(seed=1, n_theta=10, n_phi=20)
    path = tmp_path / "star.off"
    lines = ["OFF", f"{len(mesh.vertices)} {len(mesh.faces)} 0"]
    lines += [" ".join(f"{x:.17g}" for x in v) for v in mesh.vertices]
    lines += ["3 " + " ".join(map(str, f)) for f in mesh.faces]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture()
def bandlimited_sph(tmp_path):
    table = build_table(make_grid(8))
    sig = isft(random_coeffs(8, 1, np.random.default_rng(0)), table)
    path = str(tmp_path / "sig.sph")
    write_sph1(path, sig)
    return path, sig


def test_sft_isft_roundtrip(tmp_path, bandlimited_sph):
    path, sig = bandlimited_sph
    spec = str(tmp_path / "sig.spec")
    back = str(tmp_path / "back.sph")
    assert main(["sft", path, "-o", spec]) == 0
    assert main(["isft", spec, "-o", back]) == 0
    recovered = read_sph1(back)
    assert np.abs(recovered.values - sig.values).max() < 1e-9


def test_sft_methods_agree(tmp_path, bandlimited_sph):
    path, _ = bandlimited_sph
    a = str(tmp_path / "a.spec")
    d = str(tmp_path / "d.spec")
    assert main(["sft", path, "-o", a, "--method", "sepvar"]) == 0
    assert main(["sft", path, "-o", d, "--method", "direct"]) == 0
    assert np.abs(read_spec1(a).coeffs - read_spec1(d).coeffs).max() < 1e-9


def test_mesh2sphere_and_align(tmp_path, star_off, capsys):
    sph = str(tmp_path / "m.sph")
    assert main(["mesh2sphere", star_off, "-b", "8", "-o", sph]) == 0
    sig = read_sph1(sph)
    assert sig.channels == 2
    assert main(["align", star_off, star_off, "-b", "8", "--grid", "8,8,8",
                 "--truth", "0,0,0"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["angular_error_deg"] < 1e-6
    assert not doc["degenerate"]


def test_mesh2sphere_reproducible(tmp_path, star_off):
    a = tmp_path / "a.sph"
    d = tmp_path / "b.sph"
    for out in (a, d):
        assert main([
            "mesh2sphere", star_off, "-b", "8", "-o", str(out),
            "--rotate", "3", "--jitter", "0.1",
        ]) == 0
    assert a.read_bytes() == d.read_bytes()


def test_conv_and_pool(tmp_path, bandlimited_sph):
    path, _ = bandlimited_sph
    spec = str(tmp_path / "x.spec")
    main(["sft", path, "-o", spec])
    filt = tmp_path / "filt.json"
    filt.write_text(json.dumps(dict(mode="full", bandwidth=8, coeffs=[0.0] * 8)))
    out = str(tmp_path / "conv.spec")
    assert main(["conv", spec, "--filter", str(filt), "-o", out]) == 0
    assert np.abs(read_spec1(out).coeffs).max() == 0
    pooled = str(tmp_path / "p.spec")
    assert main(["pool", spec, "--kind", "sp", "-o", pooled]) == 0
    assert read_spec1(pooled).bandwidth == 4
    pooled_sph = str(tmp_path / "p.sph")
    assert main(["pool", path, "--kind", "wap", "-o", pooled_sph]) == 0
    assert read_sph1(pooled_sph).bandwidth == 4


def test_synth_train_infer(tmp_path, capsys):
    data = str(tmp_path / "ds")
    assert main(["synth", "--kind", "blobs", "--classes", "3", "--count", "4",
                 "--seed", "0", "-b", "8", "-o", data]) == 0
    meta = json.loads((tmp_path / "ds" / "meta.json").read_text())
    assert len(meta["samples"]) == 12
    cfgfile = tmp_path / "net.json"
    cfgfile.write_text(json.dumps(dict(
        input_bandwidth=8, num_classes=3, in_channels=1, head="wgap",
        layers=[dict(out_channels=6, pool="sp"), dict(out_channels=8)],
    )))
    ckpt = str(tmp_path / "m.ckpt")
    report = str(tmp_path / "train.json")
    assert main(["train", "--config", str(cfgfile), "--data", data, "--seed", "0",
                 "--epochs", "4", "-o", ckpt, "--report", report]) == 0
    doc = json.loads((tmp_path / "train.json").read_text())
    assert len(doc["loss_per_epoch"]) == 4
    capsys.readouterr()
    assert main(["infer", "--config", str(cfgfile), "--ckpt", ckpt,
                 "--input", f"{data}/c0_0000.sph"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["logits"]) == 3 and 0 <= out["prediction"] < 3


def test_synth_reproducible(tmp_path):
    da, db = str(tmp_path / "a"), str(tmp_path / "b")
    for d in (da, db):
        assert main(["synth", "--kind", "harmonics", "--count", "2", "--seed", "7",
                     "-b", "8", "-o", d]) == 0
    fa = sorted((tmp_path / "a").iterdir())
    fb = sorted((tmp_path / "b").iterdir())
    assert [f.name for f in fa] == [f.name for f in fb]
    for x, y in zip(fa, fb):
        assert x.read_bytes() == y.read_bytes()


def test_equiv_report_zero_row(tmp_path, capsys):
    cfgfile = tmp_path / "net.json"
    cfgfile.write_text(json.dumps(dict(
        input_bandwidth=8, num_classes=3, in_channels=1,
        layers=[dict(out_channels=4, pool="sp", nonlinearity="none"),
                dict(out_channels=4, nonlinearity="none")],
    )))
    assert main(["equiv-report", "--config", str(cfgfile), "--seed", "1",
                 "--count", "2", "--bandlimited"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert max(doc["per_layer_error"]) < 1e-6


def test_bench_output_shape(capsys):
    assert main(["bench-sft", "--bandwidths", "8", "--reps", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc["8"]) >= {"direct_median_s", "sepvar_median_s", "sepvar_faster"}


class TestExitCodes:
    def test_usage_error(self, capsys):
        assert main(["no-such-command"]) == 1
        assert main([]) == 1
        capsys.readouterr()

    def test_missing_file(self, tmp_path, capsys):
        assert main(["sft", str(tmp_path / "nope.sph"), "-o", str(tmp_path / "o")]) == 2
        capsys.readouterr()

    def test_bad_magic(self, tmp_path, capsys):
        bad = tmp_path / "bad.sph"
        bad.write_bytes(b"JUNKJUNKJUNKJUNK")
        assert main(["sft", str(bad), "-o", str(tmp_path / "o")]) == 2
        capsys.readouterr()

    def test_pool_kind_mismatch(self, tmp_path, bandlimited_sph, capsys):
        path, _ = bandlimited_sph
        assert main(["pool", path, "--kind", "sp", "-o", str(tmp_path / "o")]) == 2
        capsys.readouterr()
