import json
import math

import numpy as np
import pytest

from heraldshape.cli import main
from heraldshape.errors import ConfigError
from heraldshape.figures import FIG3B_HERALDS, T_M as FIG_T_M, reproduce_figure
from heraldshape.filters import lorentzian, sample_filter, save_tabulated
from heraldshape.io import Units, read_table, write_table
from heraldshape.numerics import FrequencyGrid
from heraldshape.scenario import format_report, parse_config, run_scenario


def scenario(tmp_path, **overrides):
    doc = {
        "pair_model": {"type": "window", "t_c": 1, "t_u": 150},
        "filter": {"type": "lorentzian", "t_m": 10},
        "herald_instants": [75],
        "output": {"directory": str(tmp_path / "out"), "format": "csv"},
    }
    doc.update(overrides)
    return json.dumps(doc, indent=2)


class TestConfig:
    def test_unknown_key_reports_line(self, tmp_path):
        text = '{\n  "pair_model": {"type": "cw", "pair_rate": 0.01},\n  "filter": {"t_m": 10},\n  "colour": 3\n}'
        with pytest.raises(ConfigError, match=r"line 4, key 'colour'"):
            parse_config(text)

    def test_unknown_nested_key(self):
        text = '{"pair_model": {"type": "cw", "pair_rate": 0.01, "tc": 1}, "filter": {"t_m": 10}}'
        with pytest.raises(ConfigError, match="'tc'"):
            parse_config(text)

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="pair_model"):
            parse_config('{"filter": {"t_m": 10}}')

    def test_bad_types(self):
        with pytest.raises(ConfigError, match="expected a number"):
            parse_config('{"pair_model": {"type": "window", "t_u": "long"}, "filter": {"t_m": 10}}')
        with pytest.raises(ConfigError, match="list of numbers"):
            parse_config('{"pair_model": {"type": "cw", "pair_rate": 0.1}, "filter": {"t_m": 10},'
                         ' "herald_instants": 5}')

    def test_syntax_error_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config('{\n "pair_model": }')

    def test_model_requirements(self):
        with pytest.raises(ConfigError, match="t_u"):
            parse_config('{"pair_model": {"type": "window"}, "filter": {"t_m": 10}}')
        with pytest.raises(ConfigError, match="pair_model.type"):
            parse_config('{"pair_model": {"type": "pulsed"}, "filter": {"t_m": 10}}')

    def test_defaults(self, tmp_path):
        cfg = parse_config(scenario(tmp_path))
        assert cfg.atom is None
        assert cfg.imperfections.t_d == 0.0
        assert cfg.units.label == "t_c"


class TestRunScenario:
    def test_windowed(self, tmp_path):
        report = run_scenario(parse_config(scenario(tmp_path)))
        hp = report["heralding_probability"]
        assert hp["exact"] == pytest.approx(0.17, abs=0.01)
        assert abs(hp["exact"] - hp["time_domain_norm2"]) < 1e-8
        assert hp["estimate"] == pytest.approx(0.1)
        names = {r["condition"] for r in report["regime"]}
        assert {"t_c << t_m", "t_m << t_u"} <= names
        data = read_table(tmp_path / "out" / "shape_0.csv")
        assert list(data) == ["t", "re", "im", "intensity"]
        assert (tmp_path / "out" / "report.json").exists()
        assert (tmp_path / "out" / "report.txt").exists()

    def test_cw_with_atom(self, tmp_path):
        text = scenario(tmp_path, pair_model={"type": "cw", "t_c": 1, "pair_rate": 0.01},
                        herald_instants=[0], atom={"lifetime": 10})
        report = run_scenario(parse_config(text))
        assert report["atom"]["p_max"] == pytest.approx(0.95, abs=0.005)
        assert report["heralding_probability"]["exact"] == pytest.approx(21 / 121)
        assert report["g2"]["at_zero_delay"] == pytest.approx(1 + 50 / 21)
        assert report["g2"]["max_delay"] < 0
        g2 = read_table(tmp_path / "out" / "g2.csv")
        assert list(g2) == ["dt", "g2"]
        exc = read_table(tmp_path / "out" / "excitation.csv")
        assert list(exc) == ["t", "p"]

    def test_violation_leads_report(self, tmp_path):
        text = scenario(tmp_path, pair_model={"type": "cw", "t_c": 1, "pair_rate": 0.05},
                        herald_instants=[0])
        report = run_scenario(parse_config(text))
        first = format_report(report).splitlines()[0]
        assert first.startswith("WARNING: regime violation: t_m << 1/n")
        assert (tmp_path / "out" / "report.txt").read_text().startswith("WARNING")

    def test_jitter_column_and_json(self, tmp_path):
        text = scenario(tmp_path, imperfections={"t_d": 0.5, "drift": 0.0},
                        output={"directory": str(tmp_path / "out"), "format": "json"})
        run_scenario(parse_config(text))
        data = read_table(tmp_path / "out" / "shape_0.json")
        assert "intensity_jittered" in data

    def test_tabulated_filter_path(self, tmp_path):
        n = 2 ** 14
        dw = 2 * math.pi / 400.0
        save_tabulated(sample_filter(lorentzian(10.0), FrequencyGrid(-(n // 2) * dw, dw, n)),
                       tmp_path / "cavity.txt")
        text = scenario(tmp_path, filter={"type": "tabulated", "path": "cavity.txt"},
                        pair_model={"type": "window", "t_c": 1, "t_u": 60}, herald_instants=[40])
        report = run_scenario(parse_config(text), base_dir=tmp_path)
        assert 0 < report["heralding_probability"]["exact"] < 1
        assert any("skipped" in w for w in report["warnings"])

    def test_units(self, tmp_path):
        text = scenario(tmp_path, pair_model={"type": "cw", "t_c": 1, "pair_rate": 0.01},
                        herald_instants=[0], units={"label": "ns", "scale": 7})
        run_scenario(parse_config(text))
        data = read_table(tmp_path / "out" / "shape_0.csv")
        assert data["t"][-1] == pytest.approx(7 * 16 * 11)
        assert np.sum(data["intensity"]) * (data["t"][1] - data["t"][0]) == pytest.approx(1.0)


class TestCli:
    def test_validate(self, capsys):
        assert main(["validate", "--tm", "10", "--pair-rate", "0.05"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("WARNING")

    def test_validate_design_point_in_ns(self, capsys):
        code = main(["validate", "--unit", "ns", "--tc", "7", "--tm", "35", "--pair-rate",
                     "0.001", "--td", "0.1", "--json"])
        assert code == 0
        rows = {r["condition"]: r for r in json.loads(capsys.readouterr().out)}
        assert rows["t_c << t_m"]["margin"] == pytest.approx(0.2)
        assert rows["t_c << t_m"]["satisfied"]
        assert rows["t_m << 1/n"]["margin"] == pytest.approx(0.035)

    def test_herald_prob(self, capsys):
        assert main(["herald-prob", "--model", "cw", "--tm", "5"]) == 0
        assert "exact: 0.305556" in capsys.readouterr().out

    def test_shape_and_exit_codes(self, tmp_path, capsys):
        out = str(tmp_path / "o")
        assert main(["shape", "--tu", "150", "--tm", "10", "--herald", "75", "--out", out]) == 0
        assert main(["shape", "--tu", "150", "--tm", "10", "--step", "0.5", "--out", out]) == 3
        assert main(["shape", "--tm", "10", "--out", out]) == 2
        assert main(["shape", "--tu", "150", "--tm", "10", "--herald", "-40", "--out", out]) == 2

    def test_atom_in_ns(self, tmp_path, capsys):
        out = tmp_path / "a"
        code = main(["atom", "--unit", "ns", "--tc", "7", "--model", "cw", "--tm", "70",
                     "--pair-rate", "0.001", "--out", str(out)])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["atom"]["p_max"] == pytest.approx(20 / 21, abs=0.005)
        assert report["atom"]["lifetime"] == pytest.approx(70.0)
        assert report["units"] == {"label": "ns", "scale": 7.0}

    def test_g2(self, tmp_path, capsys):
        assert main(["g2", "--tm", "10", "--pair-rate", "0.01", "--out", str(tmp_path)]) == 0
        assert "g2 at zero delay: 3.38095" in capsys.readouterr().out
        data = read_table(tmp_path / "g2.csv")
        assert data["g2"][data["dt"] == 0][0] == pytest.approx(1 + 50 / 21)
        assert data["g2"].min() == pytest.approx(1.0, abs=1e-3)

    def test_run_bad_config(self, tmp_path, capsys):
        p = tmp_path / "c.json"
        p.write_text('{\n "pair_model": {"type": "cw", "pair_rate": 0.01},\n'
                     ' "filter": {"t_m": 10, "width": 3}\n}\n')
        assert main(["run", str(p)]) == 2
        assert "line 3, key 'width'" in capsys.readouterr().err

    def test_run_missing_file(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "nope.json")]) == 2

    def test_run_config(self, tmp_path, capsys):
        p = tmp_path / "c.json"
        p.write_text(scenario(tmp_path))
        assert main(["run", str(p), "--out", str(tmp_path / "r")]) == 0
        assert (tmp_path / "r" / "report.json").exists()


class TestFigures:
    def test_fig5_row(self, tmp_path):
        data = read_table(reproduce_figure("fig5", tmp_path))
        assert list(data) == ["epsilon", "R", "p_max"]
        k = int(np.nonzero(data["epsilon"] == 10)[0][0])
        assert data["R"][k] == pytest.approx(0.1736, abs=5e-5)
        assert data["p_max"][k] == pytest.approx(0.952, abs=5e-4)
        assert data["epsilon"].min() == 0.5 and data["epsilon"].max() == 100

    def test_fig4_peak(self, tmp_path):
        data = read_table(reproduce_figure("fig4", tmp_path))
        k = int(np.argmax(data["p"]))
        assert data["p"][k] == pytest.approx(0.95, abs=0.005)
        assert data["t"][k] == 0.0
        assert data["intensity"].max() == 1.0

    def test_fig3b_peaks_at_heralds(self, tmp_path):
        data = read_table(reproduce_figure("fig3b", tmp_path))
        assert set(data["herald"]) == set(FIG3B_HERALDS)
        for h in FIG3B_HERALDS:
            sel = data["herald"] == h
            t = data["t"][sel]
            assert data["intensity"][sel].max() == pytest.approx(1.0)
            assert data["unfiltered_intensity"][sel].max() == pytest.approx(1.0)
            # the heralded photon peaks within a fraction of t_m before its herald
            peak = t[np.argmax(data["intensity"][sel])]
            assert h - FIG_T_M / 2 <= peak <= h

    def test_fig3a_marginals(self, tmp_path):
        data = read_table(reproduce_figure("fig3a", tmp_path))
        assert list(data) == ["t", "before", "after"]
        assert data["before"].max() == 1.0 and data["after"].max() == 1.0
        assert np.all(data["before"][data["t"] > 150.2] == 0)
        assert data["after"][data["t"] > 160].max() > 0.01

    def test_units_scale_time_column(self, tmp_path):
        a = read_table(reproduce_figure("fig4", tmp_path / "a"))
        b = read_table(reproduce_figure("fig4", tmp_path / "b", units=Units("ns", 7.0)))
        assert np.allclose(b["t"], 7 * a["t"])

    def test_cli_figure_all(self, tmp_path, capsys):
        assert main(["figure", "all", "--out", str(tmp_path)]) == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == \
            ["fig3a.csv", "fig3b.csv", "fig4.csv", "fig5.csv"]


class TestIo:
    def test_round_trip(self, tmp_path):
        cols = [np.linspace(0, 1, 5), np.arange(5) ** 2 / 3]
        for fmt in ("csv", "json"):
            path = write_table(tmp_path / "t", ["a", "b"], cols, fmt)
            assert path.suffix == "." + fmt
            back = read_table(path)
            assert np.allclose(back["a"], cols[0], rtol=1e-11)
            assert np.allclose(back["b"], cols[1], rtol=1e-11)
        assert not [p for p in tmp_path.iterdir() if p.name.endswith(".tmp")]

    def test_length_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            write_table(tmp_path / "t", ["a", "b"], [np.zeros(3), np.zeros(4)])
