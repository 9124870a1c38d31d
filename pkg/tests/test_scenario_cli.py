"""Scenario files, the catalog, reports and the command line."""

import json

import pytest

from weyldirac.cli import main
from weyldirac.report import CheckResult, CheckStatus, Report, combine, from_equiv
from weyldirac.scenario import CATALOG, ScenarioError, catalog, catalog_names, load_scenario, parse_scenario
from weyldirac.symbolic import Equivalence, EquivResult, parse_expr
from weyldirac.verify import CHECK_ANCHORS, CHECK_IDS, verify_paper

from .conftest import run_cli

P = parse_expr

MINIMAL = """\
[chart]
dim = 2
coords = x, y
[metric]
g[0][0] = 1
g[1][1] = 1
"""


class TestScenarioParsing:
    def test_sphere_catalog_entry(self):
        s = load_scenario("sphere2")
        assert s.chart.dim == 2 and s.chart.coords == ("theta", "phi")
        assert s.metric[0, 0] == P("1") and s.metric[1, 1] == P("sin(theta)^2")
        assert s.metric[0, 1] == P("0")

    def test_load_from_path(self, tmp_path):
        f = tmp_path / "plane.scn"
        f.write_text(MINIMAL + "[flags]\nsign_flip_w = true\n", encoding="utf-8")
        s = load_scenario(f)
        assert s.name == "plane.scn" and s.flags == {"sign_flip_w": True}

    def test_missing_file(self):
        with pytest.raises(ScenarioError, match="no such scenario"):
            load_scenario("/nonexistent/x.scn")

    def test_asymmetric_metric(self):
        text = MINIMAL + "g[0][1] = x\ng[1][0] = y\n"
        with pytest.raises(ScenarioError, match="not symmetric") as info:
            parse_scenario(text)
        assert info.value.line in (7, 8)

    def test_single_off_diagonal_is_mirrored(self):
        s = parse_scenario(MINIMAL + "g[0][1] = 1/2\n")
        assert s.metric[1, 0] == P("1/2")

    def test_undeclared_symbol_named(self):
        with pytest.raises(ScenarioError, match="'q'") as info:
            parse_scenario(MINIMAL.replace("g[1][1] = 1", "g[1][1] = 1 + q^2"))
        assert info.value.line == 6

    def test_declared_field_and_params(self):
        s = parse_scenario(MINIMAL.replace("g[1][1] = 1", "g[1][1] = exp(2*psi) + k")
                           + "[fields]\npsi = depends_on(x)\n[params]\nk = 1/4\n")
        assert s.fields == {"psi": ("x",)}
        assert s.constants == {"k": 0.25}

    @pytest.mark.parametrize("bad,message", [
        ("[nonsense]\n", "unknown section"),
        ("[metric]\ng[0][2] = 1\n", "bad metric entry"),
        ("[metric]\ng[0][0] 1\n", "key = value"),
        ("[metric]\ng[0][0] = (1 +\n", "cannot parse"),
        ("[weyl]\nw[5] = 1\n", "bad weyl entry"),
        ("[fields]\nb = depends_on(z)\n", "bad field"),
        ("[flags]\nx = maybe\n", "true or false"),
        ("[loop]\nx[0] = t\n", "every coordinate"),
    ])
    def test_errors_carry_line_numbers(self, bad, message):
        with pytest.raises(ScenarioError, match=message):
            parse_scenario(MINIMAL + bad, "bad.scn")

    def test_dim_mismatch(self):
        with pytest.raises(ScenarioError, match="dim"):
            parse_scenario(MINIMAL.replace("dim = 2", "dim = 3"))

    def test_singular_metric(self):
        with pytest.raises(ScenarioError, match="invalid metric"):
            parse_scenario(MINIMAL.replace("g[1][1] = 1", "g[1][1] = 0"))

    def test_loop_needs_section(self):
        with pytest.raises(ScenarioError, match="no \\[loop\\]"):
            catalog("flat2").loop_path()

    def test_catalog(self):
        assert set(CATALOG) <= set(catalog_names())
        assert catalog("schw4").sample == {"r": 3.0}
        assert catalog("m4").fields == {"a": ("t",)}


class TestReport:
    def test_overall_and_lines(self):
        r = Report()
        r.add(CheckResult("A", CheckStatus.PASS, "fine"))
        r.add(CheckResult("B", CheckStatus.LIKELY_PASS, "numeric"))
        assert r.ok and r.to_text() == "CHECK A PASS fine\nCHECK B LIKELY_PASS numeric\nOVERALL PASS\n"
        r.add(CheckResult("C", CheckStatus.FAIL, "broken"))
        assert not r.ok and r.to_text().endswith("OVERALL FAIL\n")

    def test_likely_never_upgraded(self):
        res = from_equiv("X", EquivResult(Equivalence.LIKELY_EQUAL))
        assert res.status is CheckStatus.LIKELY_PASS
        assert combine("Y", [res, CheckResult("Z", CheckStatus.PASS)]).status is CheckStatus.LIKELY_PASS

    def test_fail_keeps_witness(self):
        res = from_equiv("X", EquivResult(Equivalence.UNEQUAL, {"x": 0.5}, 1.0, 2.0))
        assert res.payload["witness"] == {"x": 0.5}

    def test_json_mirrors_text(self):
        rep = verify_paper(only=["2L", "I2"])
        doc = json.loads(rep.to_json())
        lines = rep.to_text().splitlines()
        assert [f"CHECK {c['id']} {c['status']} {c['detail']}" for c in doc["checks"]] == lines[:-1]
        assert lines[-1] == f"OVERALL {doc['overall']}"

    def test_every_check_has_one_anchor(self):
        assert list(CHECK_ANCHORS) == list(CHECK_IDS)

    def test_unknown_only_id(self):
        with pytest.raises(ValueError, match="unknown check"):
            verify_paper(only=["nope"])


class TestSubcommands:
    def test_christoffel(self, capsys):
        assert main(["christoffel", "sphere2"]) == 0
        out = capsys.readouterr().out
        assert "Gamma^theta_{phi phi} = -cos(theta)*sin(theta)" in out
        assert out.index("Gamma^theta") < out.index("Gamma^phi")

    def test_christoffel_flat(self, capsys):
        assert main(["christoffel", "flat2"]) == 0
        assert "vanish" in capsys.readouterr().out

    def test_curvature(self, capsys):
        assert main(["curvature", "flat4"]) == 0
        assert capsys.readouterr().out.strip().endswith("R = 0")
        assert main(["curvature", "sphere2"]) == 0
        assert "R = 2" in capsys.readouterr().out

    def test_weyl(self, capsys):
        assert main(["weyl", "m4"]) == 0
        out = capsys.readouterr().out
        assert "W_{t x}" in out and "integrable: no" in out
        assert "CHECK 2D PASS" in out and "CHECK 2O PASS" in out

    def test_weyl_integrable(self, capsys):
        assert main(["weyl", "gradient_weyl"]) == 0
        assert "integrable: yes" in capsys.readouterr().out

    def test_gauge(self, capsys):
        assert main(["gauge", "conf4"]) == 0
        out = capsys.readouterr().out
        assert out.count("CHECK 2K PASS") == 3 and "OVERALL PASS" in out

    def test_gauge_explicit_lambda(self, capsys):
        assert main(["gauge", "flat4", "--lambda", "t*x"]) == 0
        assert "w~_t = x + w0" in capsys.readouterr().out.replace("w0 + x", "x + w0")

    def test_transport_sphere(self, capsys):
        assert main(["transport", "sphere2", "--steps", "1024"]) == 0
        out = capsys.readouterr().out
        assert "rotation angle: 3.14159" in out and "steps: 1024" in out

    def test_transport_weyl(self, capsys):
        assert main(["transport", "square_weyl"]) == 0
        assert "length ratio: 1.10517091807" in capsys.readouterr().out

    def test_transport_without_loop(self, capsys):
        assert main(["transport", "flat2"]) == 2
        assert "no [loop] section" in capsys.readouterr().err

    def test_bad_scenario_exit_code(self, tmp_path, capsys):
        f = tmp_path / "bad.scn"
        f.write_text(MINIMAL + "g[0][1] = q\n", encoding="utf-8")
        assert main(["curvature", str(f)]) == 2
        assert "'q'" in capsys.readouterr().err

    def test_bad_lambda(self, capsys):
        assert main(["gauge", "flat4", "--lambda", "1 +"]) == 2

    def test_only_subset(self, capsys):
        assert main(["verify-paper", "--only", "2L,I2"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert [l.split()[1] for l in out[:-1]] == ["2L", "I2"]

    def test_only_unknown(self, capsys):
        assert main(["verify-paper", "--only", "zz"]) == 2


class TestVerifyPaperProcess:
    def test_default_run_passes(self, verify_runs):
        r = verify_runs["text"]
        assert r.returncode == 0, r.stdout + r.stderr
        lines = r.stdout.splitlines()
        assert [l.split()[1] for l in lines[:-1]] == list(CHECK_IDS)
        assert all(l.split()[2] == "PASS" for l in lines[:-1])
        assert lines[-1] == "OVERALL PASS"

    def test_flipped_sign_fails_first_integral(self, verify_runs):
        r = verify_runs["flip"]
        assert r.returncode == 1
        assert "CHECK I1 FAIL" in r.stdout
        assert r.stdout.splitlines()[-1] == "OVERALL FAIL"

    def test_json_verdicts_match_text(self, verify_runs):
        doc = json.loads(verify_runs["json"].stdout)
        assert verify_runs["json"].returncode == 0
        text = {l.split()[1]: l.split()[2] for l in verify_runs["text"].stdout.splitlines()[:-1]}
        assert {c["id"]: c["status"] for c in doc["checks"]} == text
        assert doc["overall"] == "PASS"

    def test_byte_identical_runs(self, verify_runs):
        assert verify_runs["text"].stdout == verify_runs["text_again"].stdout

    def test_module_entry_point_help(self):
        r = run_cli("--help")
        assert r.returncode == 0 and "verify-paper" in r.stdout


def test_readme_example_scenario(tmp_path, capsys):
    import re
    from pathlib import Path
    readme = Path(__file__).resolve().parents[1] / "README.md"
    block = re.search(r"```ini\n(.*?)```", readme.read_text(encoding="utf-8"), re.S).group(1)
    f = tmp_path / "readme.scn"
    f.write_text(block, encoding="utf-8")
    assert main(["transport", str(f), "--steps", "1024"]) == 0
    assert "length ratio" in capsys.readouterr().out
