import json
import math

import numpy as np
import pytest

from schauder import cli
from schauder.exceptions import ValidationError
from schauder.generators import TakagiSpec, sample_F, takagi_expected_estimate
from schauder.io import samples_to_csv


def write_samples(tmp_path, samples, name="in.csv"):
    path = tmp_path / name
    path.write_text(samples_to_csv(samples), encoding="utf-8")
    return str(path)


class TestParseSpec:
    @pytest.mark.parametrize("text, kind", [("sin", "cos_pi"), ("cos:2", "cos_pi"), ("poly:0,1", "poly"), ("takagi:1,0.5", "takagi"), ("geometric:0.5,10", "takagi")])
    def test_kinds(self, text, kind):
        assert cli.parse_function_spec(text).kind == kind

    @pytest.mark.parametrize("text", ["spline", "poly:", "poly:a,b", "geometric:1,2,3"])
    def test_rejected(self, text):
        with pytest.raises(ValidationError):
            cli.parse_function_spec(text)


class TestEstimate:
    def test_takagi_json(self, tmp_path, capsys):
        spec = TakagiSpec((1.0, 0.5, 0.25, 0.125, 0.3))
        path = write_samples(tmp_path, sample_F(spec, 4))
        assert cli.main(["estimate", path, "--n", "3"]) == 0
        payload = json.loads(capsys.readouterr().out)
        got = [c["value"] for c in payload["coeffs"]]
        np.testing.assert_allclose(got, takagi_expected_estimate(spec, 3).values, atol=1e-12)
        assert payload["truncated"] is False

    def test_truncate_flag_idempotent(self, tmp_path, capsys):
        path = write_samples(tmp_path, sample_F(TakagiSpec((1.0, 0.5)), 3))
        assert cli.main(["estimate", path, "--truncate", "--truncate", "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert "# truncated=true" in out
        assert out.count("\n") == 4 + 4

    def test_out_file(self, tmp_path):
        path = write_samples(tmp_path, sample_F(TakagiSpec((1.0,)), 3))
        out = tmp_path / "coeffs.json"
        assert cli.main(["estimate", path, "--out", str(out)]) == 0
        assert json.loads(out.read_text())["n"] == 2

    def test_malformed_t(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("t,F\n0,0\n0.25,1\n0.6,2\n0.75,3\n1,4\n", encoding="utf-8")
        assert cli.main(["estimate", str(path)]) == 2
        assert "row 4" in capsys.readouterr().err

    def test_wrong_n(self, tmp_path):
        path = write_samples(tmp_path, sample_F(TakagiSpec((1.0,)), 3))
        assert cli.main(["estimate", path, "--n", "4"]) == 2

    def test_missing_file(self, tmp_path):
        assert cli.main(["estimate", str(tmp_path / "nope.csv")]) == 2

    def test_deterministic(self, tmp_path, capsys):
        path = write_samples(tmp_path, sample_F(TakagiSpec.geometric(0.7, 20), 6))
        cli.main(["estimate", path, "--f0", "0.3"])
        first = capsys.readouterr().out
        cli.main(["estimate", path, "--f0", "0.3"])
        assert capsys.readouterr().out == first


class TestRoughness:
    def test_takagi_half(self, tmp_path, capsys):
        path = write_samples(tmp_path, sample_F(TakagiSpec.geometric(2**-0.5, 40), 10))
        assert cli.main(["roughness", path, "--n", "8"]) == 0
        row = capsys.readouterr().out.splitlines()[1].split(",")
        assert row[0] == "8"
        assert float(row[1]) == pytest.approx(0.5, abs=1e-9)

    def test_f0_invariance(self, tmp_path, capsys):
        path = write_samples(tmp_path, sample_F(TakagiSpec.geometric(0.6, 30), 7))
        cli.main(["roughness", path])
        a = capsys.readouterr().out
        cli.main(["roughness", path, "--f0", "9"])
        assert capsys.readouterr().out == a

    def test_linear_is_undefined(self, tmp_path, capsys):
        t = np.arange(17) / 16
        from schauder.estimator import SampleVector

        path = write_samples(tmp_path, SampleVector(4, t**2 / 2))
        assert cli.main(["roughness", path]) == 2
        assert "undefined" in capsys.readouterr().err


class TestReports:
    def test_sample_command(self, tmp_path):
        out = tmp_path / "s.csv"
        assert cli.main(["sample", "--spec", "cos", "--level", "1", "--out", str(out)]) == 0
        t, F = out.read_text().splitlines()[2].split(",")
        assert t == "1/2^1"
        assert float(F) == pytest.approx(1.0)

    def test_demo_instability(self, tmp_path, capsys):
        png = tmp_path / "demo.png"
        assert cli.main(["demo-instability", "--n", "3", "--plot", str(png)]) == 0
        lines = capsys.readouterr().out.splitlines()
        gaps = [float(line.rsplit(":", 1)[1]) for line in lines if line.startswith("# max")]
        assert gaps[0] < 0.25
        assert gaps[1] > 4
        assert png.stat().st_size > 0

    def test_demo_traces_interpolate(self):
        traces = cli.instability_traces(3, [0.0, 4.0], extra_levels=3)
        knots = slice(None, None, 2**3)
        for key in ("F_hat_f0=0.0", "F_hat_f0=4.0"):
            np.testing.assert_allclose(traces[key][knots], traces["F"][knots], atol=1e-12)

    def test_verify_passes(self, capsys):
        assert cli.main(["verify", "--n-max", "4"]) == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_verify_range(self):
        assert cli.main(["verify", "--n-max", "9"]) == 2

    def test_dettable(self, tmp_path, capsys):
        png = tmp_path / "det.png"
        code = cli.main(["dettable", "--plot", str(png)])
        rows = capsys.readouterr().out.splitlines()
        assert rows[0] == "n,log10_abs_det,sign,reference,tol,status"
        assert len(rows) == 7
        statuses = [r.rsplit(",", 1)[1] for r in rows[2:]]
        assert code == (0 if all(s == "PASS" for s in statuses) else 1)
        assert png.exists()

    @pytest.mark.parametrize("p", [None, "1", "2", "inf"])
    def test_bounds_sin(self, capsys, p):
        argv = ["bounds", "--spec", "sin", "--n", "4"] + ([] if p is None else ["--p", p])
        assert cli.main(argv) == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_bounds_bad_p(self):
        with pytest.raises(SystemExit) as info:
            cli.main(["bounds", "--spec", "sin", "--n", "4", "--p", "3"])
        assert info.value.code == 2

    def test_bounds_small_n(self):
        assert cli.main(["bounds", "--spec", "sin", "--n", "1"]) == 2

    def test_reference_table_keys(self):
        assert sorted(cli.REFERENCE_LOG10_DET) == [2, 3, 4, 5, 6]
        assert all(math.isfinite(v) for v, _ in cli.REFERENCE_LOG10_DET.values())
