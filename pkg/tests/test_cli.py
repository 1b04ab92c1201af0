import subprocess
import sys

import numpy as np

from fwmconv import RadialProfile, write_profile_csv
from fwmconv.cli import main
from fwmconv.io import read_record
from synth import airy_profile


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "fwmconv", *map(str, args)], cwd=cwd,
                          capture_output=True, text=True)


def test_help_lists_config_keys():
    r = run("simulate", "--help")
    assert r.returncode == 0
    assert "grid.pitch_um" in r.stdout and "annulus-probe" in r.stdout


def test_simulate_small_config(tmp_path):
    cfg = tmp_path / "s.cfg"
    assert main(["simulate", str(cfg), "--dump-preset", "annulus-probe"]) == 0
    text = cfg.read_text().replace("grid.nx = 1024", "grid.nx = 256").replace("grid.ny = 1024", "grid.ny = 256")
    cfg.write_text(text.replace("grid.pitch_um = 3.0", "grid.pitch_um = 6.0"))
    r = run("simulate", cfg, "--out", tmp_path / "out")
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "out" / "manifest.txt").exists()
    assert main(["simulate", str(cfg)]) == 0
    assert (tmp_path / "s_out" / "focal.pgm").exists()


def test_simulate_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("grid.nope = 3\n")
    assert main(["simulate", str(bad)]) == 1
    assert "grid.nope" in capsys.readouterr().err
    assert main(["simulate"]) == 1
    assert main(["simulate", "--dump-preset", "nope"]) == 1
    assert main(["simulate", str(tmp_path / "missing.cfg")]) == 1
    assert main(["frobnicate"]) == 1
    ext = tmp_path / "ext.cfg"
    ext.write_text("grid.nx = 64\ngrid.ny = 64\ngain.dk_model = external\n"
                   f"gain.dk_csv = {tmp_path / 'none.csv'}\n"
                   "pipeline.stages = source,farfield,soft_aperture\n")
    assert main(["simulate", str(ext)]) == 2


def test_fit_round_trip(tmp_path):
    csv = write_profile_csv(airy_profile(0.55), tmp_path / "p.csv")
    r = run("fit", csv)
    assert r.returncode == 0, r.stderr
    assert "eps_ratio" in r.stdout
    rec = read_record(tmp_path / "p.fit.txt")
    assert abs(float(rec["eps_ratio"]) - 0.55) < 1e-4
    assert rec["converged"] == "true"
    assert main(["fit", str(csv), "--offset", "--eps0", "0.3", "--out", str(tmp_path / "f.txt")]) == 0
    assert abs(float(read_record(tmp_path / "f.txt")["eps_ratio"]) - 0.55) < 1e-3


def test_fit_errors(tmp_path):
    short = write_profile_csv(RadialProfile(np.arange(5.0), np.ones(5)), tmp_path / "s.csv")
    assert main(["fit", str(short)]) == 2
    bad = tmp_path / "b.csv"
    bad.write_text("1,2\nx,y\n")
    assert main(["fit", str(bad)]) == 1
    assert main(["fit", str(tmp_path / "missing.csv")]) == 1
    assert main(["fit", str(short), "--eps0", "1.5"]) == 1


def test_compare(tmp_path, capsys):
    prof = airy_profile(0.5)
    a = write_profile_csv(prof, tmp_path / "a.csv")
    b = write_profile_csv(RadialProfile(prof.positions / 2.0, prof.intensities, unit="px"), tmp_path / "b.csv")
    assert main(["compare", str(a), str(b), "--out", str(tmp_path / "c.txt")]) == 0
    assert "unit mismatch" in capsys.readouterr().err
    rec = read_record(tmp_path / "c.txt")
    assert "unit mismatch" in rec["warning.0"]
    assert float(rec["nrmse"]) > 0.05
    assert main(["compare", str(a), str(b), "--scale-b", "2.0"]) == 0
    out = capsys.readouterr().out
    assert "warning" not in out
    assert float(out.split("nrmse = ")[1].split()[0]) < 1e-12
    far = write_profile_csv(RadialProfile(prof.positions + 1e5, prof.intensities), tmp_path / "far.csv")
    assert main(["compare", str(a), str(far)]) == 1
