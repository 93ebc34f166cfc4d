"""
Tests for the command-line interface.
"""

import pandas as pd
import pytest

from resmem_cli import main


class TestCli:
    """Test CLI commands."""

    def test_presets(self, capsys):
        """Test the preset listing."""
        main(["presets"])
        out = capsys.readouterr().out
        assert "lorenz-grid" in out
        assert "narma-grid" in out

    def test_matrix_then_netstats(self, tmp_path, capsys):
        """Test writing a matrix and reading its statistics back."""
        path = tmp_path / "A.csv"
        main(["matrix", "--M", "20", "--eta-f", "0.3", "--seed", "1", "--out", str(path)])
        assert path.exists()
        main(["netstats", "--matrix", str(path), "--target-lw", "2.0"])
        out = capsys.readouterr().out
        assert "✓ Wrote 20x20 matrix" in out
        assert "Mean weighted path length" in out
        assert "<L_W> = 2.0" in out

    def test_run_toml(self, tmp_path, capsys):
        """Test running a sweep file writes CSV and JSON."""
        config = tmp_path / "tiny.toml"
        config.write_text(
            'experiment = "tiny"\n'
            'driver = "noise"\n'
            'metrics = ["memory_capacity"]\n'
            "M = 10\n"
            "washout = 200\n"
            "n_fit = 2000\n"
            "tau_max = 10\n"
            "\n"
            "[grid]\n"
            "g = [0.9]\n"
            "epsilon = [0.5]\n"
            "seeds = [0, 1]\n"
        )
        out_dir = tmp_path / "results"
        main(["run", str(config), "--out", str(out_dir), "--workers", "1"])
        df = pd.read_csv(out_dir / "tiny.csv")
        assert len(df) == 3
        assert (out_dir / "tiny.json").exists()
        assert "memory_capacity" in capsys.readouterr().out

    def test_seed_override(self, tmp_path):
        """Test --seeds replaces the sweep seeds."""
        config = tmp_path / "tiny.toml"
        config.write_text(
            'experiment = "seeded"\n'
            'driver = "none"\n'
            'metrics = ["path_length"]\n'
            "M = 10\n"
        )
        main(["run", str(config), "--out", str(tmp_path), "--seeds", "5,6,7"])
        df = pd.read_csv(tmp_path / "seeded.csv")
        assert set(df["seed"].dropna().astype(int)) == {5, 6, 7}

    def test_unknown_preset_exits(self, capsys):
        """Test unknown presets exit with status 1."""
        with pytest.raises(SystemExit) as exc_info:
            main(["run", "no-such-preset"])
        assert exc_info.value.code == 1
        assert "✗ Error" in capsys.readouterr().out

    def test_bad_seed_list(self):
        """Test malformed seed lists are rejected by argparse."""
        with pytest.raises(SystemExit):
            main(["run", "lorenz-grid", "--seeds", "a,b"])
