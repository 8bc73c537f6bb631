import filecmp
from pathlib import Path

import pytest

from momentct.cli import main

MINI_CONFIG = """
[phantom]
kind = uniform

[mollifier]
kernel = bump
epsilon = 0.08

[noise]
sigma = 0.01
seed = 3

[grids]
angles = 48
angle_cover = moment
offsets = 256
margin = 1.1

[moments]
K = 2

[recon]
method = both
m = 1
n = 1
resolution = 16

[output]
directory = {out}
"""

ARTIFACTS = [
    "sinogram.csv",
    "sinogram.pgm",
    "phantom.pgm",
    "moments.csv",
    "recon_moments.csv",
    "recon_moments.pgm",
    "recon_fbp.csv",
    "recon_fbp.pgm",
]


def write_config(tmp_path, name="run.ini", out="run_out", text=MINI_CONFIG):
    path = tmp_path / name
    path.write_text(text.format(out=tmp_path / out))
    return path


class TestPipeline:
    def test_end_to_end(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["pipeline", "-c", str(cfg)]) == 0
        outdir = tmp_path / "run_out"
        for name in ARTIFACTS:
            assert (outdir / name).exists(), name
        printed = capsys.readouterr().out
        assert "l1 norm" in printed
        assert "sup error" in printed
        assert "relative l2 error" in printed

    def test_reproducible_byte_for_byte(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["pipeline", "-c", str(cfg), "-o", str(tmp_path / "a")]) == 0
        assert main(["pipeline", "-c", str(cfg), "-o", str(tmp_path / "b")]) == 0
        for name in ARTIFACTS:
            assert filecmp.cmp(tmp_path / "a" / name, tmp_path / "b" / name,
                               shallow=False), name

    def test_subcommands_compose_to_pipeline(self, tmp_path):
        cfg = write_config(tmp_path)
        out_pipe = tmp_path / "pipe"
        out_steps = tmp_path / "steps"
        assert main(["pipeline", "-c", str(cfg), "-o", str(out_pipe)]) == 0
        assert main(["project", "-c", str(cfg), "-o", str(out_steps)]) == 0
        assert main(["moments", "-c", str(cfg), "-o", str(out_steps),
                     str(out_steps / "sinogram.csv")]) == 0
        assert main(["reconstruct", "-c", str(cfg), "-o", str(out_steps),
                     str(out_steps / "moments.csv")]) == 0
        assert main(["reconstruct", "-c", str(cfg), "-o", str(out_steps),
                     str(out_steps / "sinogram.csv")]) == 0
        for name in ARTIFACTS:
            assert filecmp.cmp(out_pipe / name, out_steps / name, shallow=False), name


class TestErrorContracts:
    def test_unknown_config_key_exits_2(self, tmp_path):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[phantom]\nkind = uniform\nwat = 1\n")
        assert main(["project", "-c", str(cfg)]) == 2

    def test_unknown_phantom_exits_2(self, tmp_path):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[phantom]\nkind = pyramid\n")
        assert main(["project", "-c", str(cfg)]) == 2

    def test_margin_below_one_exits_3(self, tmp_path):
        cfg = tmp_path / "bad.ini"
        cfg.write_text(f"[grids]\nmargin = 0.9\n[output]\ndirectory = {tmp_path/'o'}\n")
        assert main(["project", "-c", str(cfg)]) == 3

    def test_mollified_sinogram_without_kernel_block_exits_2(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["project", "-c", str(cfg)]) == 0
        stripped = "\n".join(
            line for line in MINI_CONFIG.splitlines()
            if not line.startswith(("[mollifier]", "kernel", "epsilon"))
        )
        cfg2 = write_config(tmp_path, name="stripped.ini", text=stripped)
        code = main(["moments", "-c", str(cfg2),
                     str(tmp_path / "run_out" / "sinogram.csv")])
        assert code == 2

    def test_malformed_sinogram_exits_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("no header here\n")
        cfg = write_config(tmp_path)
        assert main(["moments", "-c", str(cfg), str(bad)]) == 2

    def test_insufficient_moment_order_exits_5(self, tmp_path):
        # K = 2 moments cannot support an (m, n) = (2, 2) reconstruction
        cfg_text = MINI_CONFIG.replace("m = 1", "m = 2").replace("n = 1", "n = 2") \
            .replace("method = both", "method = moments")
        cfg = write_config(tmp_path, text=cfg_text)
        assert main(["project", "-c", str(cfg)]) == 0
        out = tmp_path / "run_out"
        assert main(["moments", "-c", str(cfg), str(out / "sinogram.csv")]) == 0
        assert main(["reconstruct", "-c", str(cfg), str(out / "moments.csv")]) == 5

    def test_missing_file_exits_2(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["moments", "-c", str(cfg), str(tmp_path / "nope.csv")]) == 2


class TestFlags:
    def test_angles_auto_flag(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "run_out"
        assert main(["project", "-c", str(cfg)]) == 0
        assert main(["moments", "-c", str(cfg), "--angles-auto", "1",
                     str(out / "sinogram.csv")]) == 0
        header = (out / "moments.csv").read_text().splitlines()[0]
        assert header == "# moments K=1"

    def test_explicit_angle_list(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "run_out"
        assert main(["project", "-c", str(cfg)]) == 0
        assert main(["moments", "-c", str(cfg), "--angles", "0.8,1.6,2.4",
                     str(out / "sinogram.csv")]) == 0
        header = (out / "moments.csv").read_text().splitlines()[0]
        assert header == "# moments K=2"

    def test_shipped_demo_config_parses(self):
        from momentct.config import load_config

        demo = Path(__file__).resolve().parents[1] / "configs" / "uniform_demo.ini"
        cfg = load_config(demo)
        assert cfg.phantom.kind == "uniform"
        assert cfg.recon.method == "both"

    def test_moment_deviation_grows_with_noise(self, tmp_path):
        # at a fixed seed the injected noise scales linearly with sigma, so
        # the moment-table deviation from the noiseless run must too
        from momentct.fileio import read_moments

        cfg = write_config(tmp_path)
        tables = {}
        for sigma in (0.0, 0.01, 0.05):
            out = tmp_path / f"s{sigma}"
            assert main(["project", "-c", str(cfg), "-o", str(out),
                         "--sigma", str(sigma)]) == 0
            assert main(["moments", "-c", str(cfg), "-o", str(out),
                         str(out / "sinogram.csv")]) == 0
            tables[sigma] = read_moments(out / "moments.csv")

        def deviation(sigma):
            base = tables[0.0].values
            return max(abs(v - base[k]) for k, v in tables[sigma].values.items())

        assert 0.0 < deviation(0.01) < deviation(0.05)
