import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import random_law
from exmix import __version__
from exmix.cli import FIXTURES, fixture_dir, load_law, load_measure, run, save_json


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def result(*argv):
    code, out, _ = call(*argv)
    doc = json.loads(out)
    assert doc["header"] == {"tool": "exmix", "version": __version__}
    return code, doc["result"]


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


class TestFixtures:
    def test_list(self):
        code, res = result("fixtures", "--list")
        assert code == 0
        assert [f["name"] for f in res["fixtures"]] == [
            "ex1-uniform-permutation",
            "nonu-i",
            "nonu-ii",
            "nonu-iii",
            "lastex1",
            "lastex2",
        ]

    def test_list_table(self):
        code, out, _ = call("--format", "table", "fixtures", "--list")
        assert code == 0 and out.split()[0] == "ex1-uniform-permutation"

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_reproduce_commands(self, name):
        # every reproduce command runs; lastex1 and lastex2 are designed negatives
        code, _, err = call(*FIXTURES[name][1].split())
        assert code == (1 if name in ("lastex1", "lastex2") else 0), err

    def test_dump(self, tmp_path):
        code, _, _ = call("fixtures", "--dump", str(tmp_path))
        assert code == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == sorted(f for f, _ in FIXTURES.values())

    def test_nonu_iii_has_three_pieces(self):
        xi = load_measure(str(fixture_dir() / "nonu-iii.json"))
        assert len(xi.density) == 3
        assert [pc.poly for pc in xi.density] == [(Fraction(-7, 2),), (Fraction(10),), (Fraction(-7, 2),)]

    def test_unknown_show(self):
        assert call("fixtures", "--show", "nope")[0] == 2


class TestVerify:
    @pytest.mark.parametrize("measure", ["nonu-i", "nonu-ii", "nonu-iii"])
    def test_nonu_measures_pass(self, measure):
        code, res = result("verify", "--law", "fixtures/ex1.json", "--measure", f"fixtures/{measure}.json")
        assert code == 0 and res == {"pass": True}

    def test_failure_exit_code(self, tmp_path):
        m = write(tmp_path, "m.json", {"atoms": [{"p": ["1/2", "1/2"], "w": "1"}]})
        code, res = result("verify", "--law", "fixtures/ex1.json", "--measure", m)
        assert code == 1
        assert res["first_difference"]["reconstructed"] == "1/4"


class TestErrors:
    def test_bad_sum_reports_exact_total(self, tmp_path):
        law = write(
            tmp_path,
            "law.json",
            {
                "n": 2,
                "alphabet": {"symbols": ["1", "2"]},
                "weights": [{"type": {"counts": [1, 1], "n": 2}, "w": "99/100"}],
            },
        )
        code, out, err = call("mix", "--law", law)
        assert code == 2 and out == ""
        assert "99/100" in err

    def test_malformed_json_location(self, tmp_path):
        law = write(tmp_path, "law.json", '{\n  "n": 2,\n  "alphabet": \n}\n')
        code, _, err = call("mix", "--law", law)
        assert code == 2
        assert f"{law}:4:1" in err

    def test_float_weight_rejected_with_field(self, tmp_path):
        law = write(
            tmp_path,
            "law.json",
            {"n": 1, "alphabet": {"symbols": ["a"]}, "weights": [{"type": {"counts": [1], "n": 1}, "w": 1.0}]},
        )
        code, _, err = call("mix", "--law", law)
        assert code == 2 and "weights[0].w" in err

    def test_missing_file(self):
        assert call("mix", "--law", "/nonexistent/law.json")[0] == 2

    def test_usage(self):
        assert call()[0] == 2
        assert call("dyson", "--n", "2")[0] == 2

    def test_size_cap_env(self, monkeypatch):
        monkeypatch.setenv("EXMIX_SIZE_CAP", "4")
        code, _, err = call("dyson", "--n", "3", "--d", "3")
        assert code == 2 and "cap 4" in err


class TestCommands:
    def test_dyson(self):
        code, res = result("dyson", "--n", "2", "--d", "2", "--emit", "m", "--check")
        assert code == 0
        assert res["M"]["1,1"] == {"0,2": "-1/8", "1,1": "1/2", "2,0": "-1/8"}
        assert res["check"]["hompol"]["pass"] is True

    def test_mix_psi(self):
        code, res = result("mix", "--law", "fixtures/ex1.json", "--emit", "psi", "--type", "1,1", "--tv")
        assert code == 0
        atoms = {tuple(a["p"]): a["w"] for a in res["psi"]["atoms"]}
        assert atoms == {("0", "1"): "-1/2", ("1", "0"): "-1/2", ("1/2", "1/2"): "2"}
        assert res["tv"] == "3"

    def test_mix_cone(self, tmp_path):
        values = write(tmp_path, "v.json", {"values": {"1": "1", "2": "2"}})
        code, res = result("mix", "--law", "fixtures/ex1.json", "--cone", values)
        assert code == 0
        points = {tuple(p["theta"]): p["w"] for p in res["cone"]["points"]}
        assert points == {("1", "2"): "2", ("1", "1"): "-1/2", ("2", "2"): "-1/2"}

    def test_moments(self):
        code, res = result("moments", "--measure", "fixtures/nonu-i.json", "--event", '{"sets": [["1"], ["1"], ["1"]]}')
        assert code == 0 and res["value"] == "-1/4"

    def test_laplace(self, tmp_path):
        f = write(tmp_path, "f.json", {"values": {"1": 1.3862943611198906, "2": 0}})
        code, res = result("laplace", "--measure", "fixtures/nonu-i.json", "--f", f)
        assert code == 0
        assert abs(res["value"] - 0.375) < 1e-12
        assert res["tolerance"] == 1e-12

    def test_tv_sweep_table(self):
        code, out, _ = call("--format", "table", "tv-sweep", "--family", "uniform_permutation", "--n-max", "4")
        assert code == 0
        rows = {line.split()[0]: line.split()[1] for line in out.splitlines() if line.strip()[:1].isdigit()}
        assert rows["1"] == "1" and rows["2"] == "3"

    def test_tv_sweep_truncates(self, monkeypatch):
        monkeypatch.setenv("EXMIX_SIZE_CAP", "10")
        code, res = result("tv-sweep", "--n-max", "5")
        assert code == 0
        assert [r["n"] for r in res["rows"]] == [1, 2, 3]
        assert res["truncated_at"] == 4

    def test_extend(self):
        code, res = result("extend", "--law", "fixtures/lastex1.json")
        assert code == 1 and res["extendible"] is False
        assert res["certificate"]["bound"] == "-1"

    def test_extend_target_flag(self, tmp_path):
        law = write(
            tmp_path,
            "law.json",
            {
                "n": 2,
                "alphabet": {"symbols": ["H", "T"]},
                "weights": [
                    {"type": {"counts": [2, 0], "n": 2}, "w": "1/4"},
                    {"type": {"counts": [1, 1], "n": 2}, "w": "1/2"},
                    {"type": {"counts": [0, 2], "n": 2}, "w": "1/4"},
                ],
            },
        )
        code, res = result("extend", "--law", law, "--target", "4")
        assert code == 0 and res["extendible"] is True
        assert res["witness"]["alphabet"]["symbols"] == ["H", "T"]

    def test_gauss_check(self):
        code, res = result("gauss-check", "--from", "fixtures/lastex2.json", "--epsilon", "2")
        assert code == 1
        status = {c["epsilon"]: c["status"] for c in res["checks"]}
        assert status == {"2": "consistent", "1/4": "inconsistent", "1/2": "inconsistent", "3/4": "inconsistent"}
        assert result("gauss-check", "--epsilon", "2")[0] == 0
        assert result("gauss-check", "--epsilon", "1")[1]["checks"][0]["status"] == "degenerate"
        assert call("gauss-check", "--epsilon", "-1")[0] == 2

    def test_cone(self, tmp_path):
        values = write(tmp_path, "v.json", {"1": "0", "2": "5/2"})
        code, res = result("cone", "--measure", "fixtures/nonu-ii.json", "--values", values, "--n", "3")
        assert code == 0 and res["total_mass"] == "1"

    def test_byte_identical(self):
        argv = ("mix", "--law", "fixtures/ex1.json", "--tv")
        assert call(*argv)[1] == call(*argv)[1]
        argv = ("--format", "table", "dyson", "--n", "3", "--d", "2")
        assert call(*argv)[1] == call(*argv)[1]


def test_law_round_trip(tmp_path, rng):
    for i in range(20):
        law = random_law(rng, rng.randint(1, 4), rng.randint(1, 4))
        path = tmp_path / f"law{i}.json"
        save_json(law.to_json(), path)
        assert load_law(str(path)) == law


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "exmix", "verify", "--law", "fixtures/ex1.json", "--measure", "fixtures/nonu-ii.json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["result"] == {"pass": True}
