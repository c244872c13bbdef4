import numpy as np
import pytest

from catkick import cli
from catkick.csvio import UNITS_LINE


def read_csv(path):
    header = []
    with open(path) as fh:
        lines = fh.read().splitlines()
    i = 0
    while lines[i].startswith("#"):
        header.append(lines[i])
        i += 1
    names = lines[i].split(",")
    data = np.array([[float(x) for x in row.split(",")] for row in lines[i + 1 :]])
    return header, {name: data[:, k] for k, name in enumerate(names)}


def test_rate1_defaults_and_conservation(tmp_path):
    out = tmp_path / "rate1.csv"
    assert cli.main(["rate1", "--out", str(out)]) == 0
    header, cols = read_csv(out)
    assert header[0] == UNITS_LINE
    assert "gamma=2 g0=0.02 omega_m=0.02" in header[1]
    assert cols["t"][0] == 0.0
    assert cols["total"][0] == pytest.approx(2.0)
    assert cols["transmitted"][0] == 0.0
    integral = np.trapezoid(cols["total"], cols["t"])
    assert abs(integral - 1.0) < 2e-3


def test_rate1_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["rate1", "--steps", "101", "--t-max", "5"]
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_moments_series(tmp_path):
    out = tmp_path / "moments.csv"
    assert cli.main(["moments", "--out", str(out), "--steps", "161"]) == 0
    header, cols = read_csv(out)
    omegas = np.unique(cols["omega_m"])
    np.testing.assert_allclose(omegas, [0.02, 0.2, 0.5])
    for omega in omegas:
        sel = cols["omega_m"] == omega
        assert abs(cols["momentum"][sel][0]) == 0.0
    peak_slow = np.max(np.abs(cols["momentum"][cols["omega_m"] == 0.02]))
    peak_fast = np.max(np.abs(cols["momentum"][cols["omega_m"] == 0.5]))
    assert peak_slow > peak_fast


def test_mz_outputs(tmp_path):
    outdir = tmp_path / "mz"
    assert (
        cli.main(
            [
                "mz",
                "--out",
                str(outdir),
                "--steps",
                "17",
                "--delta-steps",
                "5",
                "--wigner-points",
                "41",
            ]
        )
        == 0
    )
    _, ent = read_csv(outdir / "mz_entropy.csv")
    assert ent["entropy"][0] < 1e-6
    _, fid = read_csv(outdir / "mz_fidelity.csv")
    mid = np.argmin(np.abs(fid["delta"]))
    assert fid["fidelity"][mid] == pytest.approx(1.0, abs=1e-9)
    header, wig = read_csv(outdir / "mz_wigner.csv")
    assert wig["w"].min() < 0
    assert any("slice:" in line for line in header)


def test_rate2_reflected_constant_and_normalization(tmp_path):
    out = tmp_path / "rate2.csv"
    assert cli.main(["rate2", "--t1", "2", "--steps", "11", "--out", str(out)]) == 0
    _, cols = read_csv(out)
    for tau in np.unique(cols["tau"]):
        sel = cols["tau"] == tau
        refl = cols["reflected"][sel]
        assert refl.max() - refl.min() < 1e-12
    out2 = tmp_path / "rate2n.csv"
    assert (
        cli.main(
            ["rate2", "--t1", "2", "--steps", "11", "--normalize-r2", "--out", str(out2)]
        )
        == 0
    )
    _, norm = read_csv(out2)
    from catkick import single_photon as sp
    from catkick.model import ModelParams

    r1 = sp.count_rate(2.0, ModelParams(gamma=2.0, g0=0.05, omega_m=0.02)).total
    np.testing.assert_allclose(norm["total"], cols["total"] / r1, rtol=1e-12)


def test_rate2_appendix_coupling(tmp_path):
    out = tmp_path / "rate2g.csv"
    assert (
        cli.main(["rate2", "--t1", "1", "--g0", "0.1", "--steps", "6", "--out", str(out)])
        == 0
    )
    header, _ = read_csv(out)
    assert "g0=0.1" in header[1]


def test_validate_exit_codes():
    assert cli.main(["validate"]) == 0
    assert cli.main(["validate", "--inject-fault"]) == 1
    assert cli.main(["validate", "--fock-dim", "8"]) == 1


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        cli.main(["rate2"])  # --t1 is required
    assert exc.value.code == 2
    assert cli.main(["rate1", "--steps", "1"]) == 2
    assert cli.main(["rate1", "--t-max", "-3"]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["unknown-subcommand"])
    assert exc.value.code == 2
