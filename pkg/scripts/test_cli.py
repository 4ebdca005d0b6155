"""
End-to-end tests for the theta-orbifold command line
Run: python scripts/test_cli.py
"""

import io
import json
import sys
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from orbifold_app import main
from src.algebra.series import parse_canonical
from src.services.data_service import DataService
from src.utils.errors import InputError

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / name)


def run(*argv: str):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue().strip(), err.getvalue()


def test_orbifold_point_normalized():
    code, out, _ = run("orbifold", fixture("point_z2.orb"), "--normalize")
    assert code == 0
    assert out == "2"


def test_orbifold_canonical_output():
    code, out, _ = run("orbifold", fixture("point_z2.orb"), "--order", "3", "--canonical")
    assert code == 0
    series = parse_canonical(out)
    assert series.prec == Fraction(3, 2)
    assert series == 4


def test_order_counts_fractional_powers_of_q():
    code, out, _ = run("orbifold", fixture("point_z2.orb"), "-N", "4", "--canonical")
    assert code == 0
    assert parse_canonical(out).prec == 2


def test_twisted_point():
    code, out, _ = run("twisted", fixture("point_z2xz2.orb"), fixture("z2xz2_cup.json"), "--normalize")
    assert code == 0
    assert out == "1"


def test_twisted_rejects_foreign_cocycle():
    code, _, err = run("twisted", fixture("point_z2.orb"), fixture("z2xz2_cup.json"))
    assert code == 2
    assert "error:" in err


def test_weil():
    code, out, _ = run("weil", "--n", "5", "--a", "1,0", "--b", "0,1")
    assert code == 0
    assert out == "z5^1"


def test_weil_needs_unit_root():
    code, _, err = run("weil", "--n", "4", "--a", "1,0", "--b", "0,1", "--primitive-root", "2")
    assert code == 2
    assert "primitive root" in err


def test_h2_with_brute_force():
    code, out, _ = run("h2", "--abelian", "2,2", "--brute-force")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "Z/2 + Z/2 + Z/2"
    assert "|H^2(Z/2 x Z/2; Z/2)| = 8" in lines
    assert any(line.startswith("✅") for line in lines)


def test_h2_needs_a_group():
    code, _, _ = run("h2")
    assert code == 2


def test_pairs():
    code, out, _ = run("pairs", fixture("s3.json"))
    assert code == 0
    assert out.splitlines()[0] == "18"
    assert out.splitlines()[1] == "group: name=S3, order=6, exponent=6, abelian=False, classes=3"
    code, out, _ = run("pairs", fixture("s3.json"), "--prime", "2")
    assert out.splitlines()[0] == "10"


def test_pairs_reads_group_of_a_cocycle_file():
    code, out, _ = run("pairs", fixture("d4_cocycle.json"))
    assert code == 0
    assert out.splitlines()[0] == "40"


def test_euler_and_height_one():
    assert run("euler", fixture("cp1_z2.orb"))[1] == "4"
    assert run("euler", fixture("cp1_z3.orb"))[1] == "6"
    assert run("height-one", fixture("cp1_z3.orb"))[1] == "3"


def test_witten_of_cp1():
    code, out, _ = run("witten", fixture("cp1_z2.orb"), "--order", "3")
    assert code == 0
    assert out == "0"


def test_verify_theta():
    assert run("verify-theta", "--order", "3")[0] == 0
    code, out, _ = run("verify-theta", "--order", "3", "--inject-fault")
    assert code == 1
    assert "❌" in out


def test_verify_theta_uses_the_seed():
    code, out, _ = run("verify-theta", "--order", "4", "--seed", "7")
    assert code == 0
    assert any("(seed 7)" in line for line in out.splitlines())


def test_verify_lifts():
    assert run("verify-lifts", fixture("cp1_z2.orb"), "-N", "4")[0] == 0
    assert run("verify-lifts", fixture("cp1_z2.orb"), "-N", "4", "--inject-fault")[0] == 1


def test_verify_lifts_without_normal_lines():
    code, out, _ = run("verify-lifts", fixture("point_z2.orb"))
    assert code == 0
    assert "nothing to shift" in out
    assert run("verify-lifts", fixture("point_z2.orb"), "--inject-fault")[0] == 1


def test_compare_analytic():
    assert run("compare-analytic", fixture("cp1_z2.orb"), "-N", "4")[0] == 0
    assert run("compare-analytic", fixture("cp1_z2.orb"), "-N", "4", "--inject-fault")[0] == 1


def test_pole_in_data_file(tmp_path):
    document = {
        "group": {"abelian": [2]},
        "sectors": [{"pair": [1, 0], "components": [{"normal_lines": [{"root": [], "a": 2, "b": 0}]}]}],
    }
    path = tmp_path / "pole.orb"
    path.write_text(json.dumps(document), encoding="utf-8")
    code, _, err = run("orbifold", str(path))
    assert code == 2
    assert "pole invariant" in err
    assert "sectors[0].components[0]" in err


def test_malformed_json(tmp_path):
    path = tmp_path / "broken.orb"
    path.write_text('{"group": {"abelian": [2]},\n  "ambient": [\n', encoding="utf-8")
    code, _, err = run("orbifold", str(path))
    assert code == 2
    assert f"{path}:" in err


def test_schema_errors_name_the_field(tmp_path):
    path = tmp_path / "extra.orb"
    path.write_text(json.dumps({"group": {"abelian": [2]}, "ambient": [{"dim": 1}]}), encoding="utf-8")
    with pytest.raises(InputError) as info:
        DataService().load_orbifold(str(path))
    assert "ambient[0]" in str(info.value)


def test_missing_file():
    code, _, err = run("euler", fixture("does_not_exist.orb"))
    assert code == 2
    assert "file not found" in err


def test_jet_order_guards():
    assert run("orbifold", fixture("cp1_z2.orb"), "--jet-order", "13")[0] == 2
    assert run("orbifold", fixture("cp1_z2.orb"), "--jet-order", "0")[0] == 2


def test_unknown_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        run("frobnicate")
    assert info.value.code == 2


if __name__ == "__main__":
    from runner import run_tests
    sys.exit(run_tests("COMMAND LINE", dict(globals())))
