import math

from conftest import GROUP_FILE, SYSTOLE
from hypertrace.cli import run
from hypertrace.report import format_value, render_csv


class TestReportFormatting:
    def test_seventeen_significant_digits(self):
        assert format_value(1.0 / 3.0) == "0.33333333333333331"
        assert format_value(math.pi) == "3.1415926535897931"

    def test_complex_formatting(self):
        assert format_value(complex(1.5, -2.0)) == "1.5-2j"
        assert format_value(complex(2.0, 0.0)) == "2"

    def test_csv_is_stable(self):
        rows = [["x", 1.0 / 7.0, complex(0.1, 0.2)]]
        a = render_csv(["c1", "c2", "c3"], rows)
        b = render_csv(["c1", "c2", "c3"], rows)
        assert a == b
        assert a.splitlines()[0] == "c1,c2,c3"


class TestCheckCommands:
    def test_poisson_passes(self, capsys):
        code = run(["check", "poisson", "--beta", "1"])
        out = capsys.readouterr().out
        assert code == 0
        header, row = out.strip().splitlines()
        assert header == "formula,parameters,spectral,geometric,abs_diff,rel_diff,tail_bound"
        assert float(row.split(",")[4]) < 1e-10

    def test_poisson_impossible_tolerance_fails(self):
        assert run(["check", "poisson", "--beta", "1", "--tol", "1e-30"]) == 1

    def test_cot_passes(self):
        assert run(["check", "cot", "--rho", "0.3"]) == 0
        assert run(["check", "cot", "--rho", "2,1"]) == 0

    def test_sphere_passes(self):
        assert run(["check", "sphere", "--beta", "1"]) == 0

    def test_cylinder_passes(self):
        assert run(["check", "cylinder", "--ell", "2", "--beta", "1"]) == 0

    def test_transform_passes(self):
        assert run(["check", "transform", "--beta", "1"]) == 0

    def test_usage_error(self):
        assert run(["check", "nonsense"]) == 2
        assert run([]) == 2


class TestGroupCommands:
    def test_length_spectrum_row(self, tmp_path, capsys):
        out = tmp_path / "spec.csv"
        code = run(["length-spectrum", "--group", str(GROUP_FILE),
                    "--max-length", "3.1", "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "length,multiplicity"
        length, mult = lines[1].split(",")
        assert abs(float(length) - SYSTOLE) < 1e-9
        assert int(mult) == 24

    def test_missing_group_file_is_usage_error(self, capsys):
        code = run(["zeta", "--group", "groups/definitely_missing", "--s", "2"])
        assert code == 2
        assert "not found" in capsys.readouterr().err

    def test_zeta_emits_table(self, capsys):
        code = run(["zeta", "--group", str(GROUP_FILE), "--s", "2",
                    "--max-length", "5"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "s,re_z,im_z,tail_bound"

    def test_scattering_poles(self, capsys):
        code = run(["scattering-poles", "--ell", "2"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "nu,m,re_rho,im_rho,re_residue,im_residue"

    def test_trace_surface_two_routes(self, capsys):
        code = run(["trace-surface", "--group", str(GROUP_FILE),
                    "--max-length", "4", "--beta", "0.05"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[1].startswith("surface_geometric")

    def test_trace_surface_short_spectrum_rejected(self, capsys):
        # a beta = 1 pair needs classes well beyond cutoff 4
        code = run(["trace-surface", "--group", str(GROUP_FILE),
                    "--max-length", "4", "--beta", "1"])
        assert code == 2
        assert "longer length spectrum" in capsys.readouterr().err

    def test_weyl_slope_row(self, capsys):
        code = run(["weyl", "--group", str(GROUP_FILE), "--max-length", "4"])
        out = capsys.readouterr().out
        assert code == 0
        slope_row = [l for l in out.splitlines() if l.startswith("weyl_slope")][0]
        slope = float(slope_row.split(",")[2])
        assert abs(slope - 1.0) < 0.02

    def test_geodesic_count_emits_and_reports(self, capsys):
        # the window sits just above the systole; the regime is
        # pre-asymptotic there, so only the emission contract is checked
        code = run(["geodesic-count", "--group", str(GROUP_FILE),
                    "--max-length", "4", "--tol", "1000"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[1].startswith("geodesic_count")


class TestDeterminism:
    def test_threads_do_not_change_bytes(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert run(["check", "transform", "--beta", "1", "--threads", "1",
                    "--out", str(a), "--no-plot"]) == 0
        assert run(["check", "transform", "--beta", "1", "--threads", "4",
                    "--out", str(b), "--no-plot"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_repeat_runs_identical(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for path in (a, b):
            assert run(["check", "poisson", "--beta", "0.1",
                        "--out", str(path), "--no-plot"]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestFigures:
    def test_figure_rendered_next_to_csv(self, tmp_path):
        out = tmp_path / "poisson.csv"
        assert run(["check", "poisson", "--beta", "1", "--out", str(out)]) == 0
        assert out.exists()
        assert (tmp_path / "poisson.png").exists()

    def test_no_plot_flag(self, tmp_path):
        out = tmp_path / "poisson.csv"
        assert run(["check", "poisson", "--beta", "1", "--out", str(out),
                    "--no-plot"]) == 0
        assert not (tmp_path / "poisson.png").exists()

    def test_spectrum_figure(self, tmp_path):
        out = tmp_path / "spec.csv"
        assert run(["length-spectrum", "--group", str(GROUP_FILE),
                    "--max-length", "3.1", "--out", str(out)]) == 0
        assert (tmp_path / "spec.png").exists()


class TestTextFormat:
    def test_text_output(self, capsys):
        code = run(["check", "poisson", "--beta", "1", "--format", "text"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("formula")
        assert "," not in out.splitlines()[0]
