import subprocess
import sys
from pathlib import Path

import pytest

from causaltasks.cli import main
from causaltasks.report import parse_machine


@pytest.fixture
def scenario(tmp_path):
    def write(text, name="s.txt"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


REFINED = "task = refined\npromise = {}\nD = 8\neps = 1\n"
ORIGINAL = "task = original\nD = 8\n"
FORK = "task = summoning\nmode = {}\nstart = 0,0\npair = 0,-1 -> 3,-2\npair = 0,1 -> 3,2\n"
BLIND = "task = summoning\nmode = single\nstart = 0,0\npair = 0,-3 -> 3,-3\npair = 0,3 -> 3,3\n"


def machine(capsys, argv):
    code = main(argv + ["--format", "machine"])
    out = capsys.readouterr()
    return code, dict(kv for rec in parse_machine(out.out) for kv in rec), out


class TestValidate:
    def test_refined(self, capsys, scenario):
        code, fields, _ = machine(capsys, ["validate", scenario(REFINED.format("at_least_one"))])
        assert code == 0 and fields["layout"] == "-1,0,8,9" and fields["deadline"] == "2"

    def test_original(self, capsys, scenario):
        code, fields, _ = machine(capsys, ["validate", scenario(ORIGINAL)])
        assert code == 0 and (fields["L"], fields["R"], fields["T"]) == ("0", "8", "8")

    def test_summoning_invalid_pair(self, capsys, scenario):
        path = scenario("task=summoning\nmode=single\nstart=0,0\npair=0,0 -> 1,5\npair=0,0 -> 2,0\n")
        code = main(["validate", path])
        out = capsys.readouterr().out
        assert code == 1 and "pair 1:" in out and "valid=false" in out

    def test_parse_error_goes_to_stderr(self, capsys, scenario):
        code = main(["validate", scenario(REFINED.format("at_least_one").replace("D = 8", "D = -3"))])
        out = capsys.readouterr()
        assert code == 2 and out.out == "" and "line 3: D must be ≥ 1" in out.err

    def test_missing_file(self, capsys, tmp_path):
        assert main(["validate", str(tmp_path / "nope.txt")]) == 2
        assert "cannot read" in capsys.readouterr().err


class TestRun:
    def test_echo_on_refined(self, capsys, scenario):
        code, fields, out = machine(capsys, ["run", scenario(REFINED.format("exactly_one")), "--pattern", "(0,1)"])
        assert code == 0 and fields["success"] == "true" and fields["deliveries"] == "2"
        assert "kind=deliver" in out.out

    def test_echo_fails_at_least_one(self, capsys, scenario):
        code, fields, _ = machine(capsys, ["run", scenario(REFINED.format("at_least_one")), "--pattern", "1,1"])
        assert code == 1 and fields["success"] == "false"

    def test_absorb(self, capsys, scenario):
        code, fields, _ = machine(capsys, ["run", scenario(ORIGINAL), "--pattern", "{1}", "--strategy", "absorb"])
        assert code == 1 and fields["deliveries"] == "0"

    @pytest.mark.parametrize("relay", [1, 3, 4, 7])
    def test_relay(self, capsys, scenario, relay):
        code, fields, _ = machine(capsys, ["run", scenario(ORIGINAL), "--pattern", "{1,2}", "--relay", str(relay)])
        assert code == 0 and fields["deliveries"] == "1" and fields["fulfilled"] in ("{1}", "{2}")

    def test_token_run(self, capsys, scenario):
        code, fields, out = machine(capsys, ["run", scenario(FORK.format("single")), "--pattern", "2"])
        assert code == 0 and fields["success"] == "true"
        assert "t=3 x=2 kind=deliver" in out.out

    def test_token_run_infeasible(self, capsys, scenario):
        assert main(["run", scenario(BLIND), "--pattern", "1"]) == 1

    @pytest.mark.parametrize("pattern", ["(0,0)", "{3}", "x"])
    def test_bad_pattern(self, capsys, scenario, pattern):
        path = scenario(REFINED.format("at_least_one")) if "(" in pattern else scenario(ORIGINAL)
        assert main(["run", path, "--pattern", pattern]) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_relay_outside_labs(self, capsys, scenario):
        assert main(["run", scenario(ORIGINAL), "--pattern", "1", "--relay", "9"]) == 2


class TestSearch:
    def test_local_exactly_one(self, capsys, scenario):
        code, fields, _ = machine(capsys, ["search", scenario(REFINED.format("exactly_one")), "--space", "local"])
        assert code == 0 and fields["verdict"] == "feasible" and fields["witness_name"] == "echo"

    def test_local_at_least_one(self, capsys, scenario):
        code, _, out = machine(capsys, ["search", scenario(REFINED.format("at_least_one")), "--space", "local"])
        records = parse_machine(out.out)
        assert code == 1 and ("certificates", "16") in records[1]
        assert sum(1 for r in records if r[0][0] == "strategy") == 16

    def test_certificate_truncation(self, capsys, scenario):
        path = scenario(REFINED.format("at_least_one") + "states = 2\n")
        code, fields, out = machine(capsys, ["search", path, "--max-certificates", "5"])
        assert code == 1 and fields["certificates_shown"] == "5"
        assert out.out.count("fails_on=") == 5

    def test_budget(self, capsys, scenario):
        code, fields, _ = machine(capsys, ["search", scenario(ORIGINAL), "--relay", "3", "--budget", "0"])
        assert code == 3 and fields["verdict"] == "exhausted"

    def test_state_cap(self, capsys, scenario):
        assert main(["search", scenario(REFINED.format("at_least_one") + "states = 3\n")]) == 3
        assert "error:" in capsys.readouterr().err

    def test_alphabet_mismatch(self, capsys, scenario):
        assert main(["search", scenario(REFINED.format("at_least_one") + "alphabet = 2\n")]) == 2

    def test_summoning_rejected(self, capsys, scenario):
        assert main(["search", scenario(FORK.format("single"))]) == 2


class TestToken:
    @pytest.mark.parametrize("mode", ["single", "multiple"])
    def test_feasible(self, capsys, scenario, mode):
        code, fields, _ = machine(capsys, ["token", scenario(FORK.format(mode))])
        assert code == 0 and fields["verdict"] == "feasible"

    def test_infeasible(self, capsys, scenario):
        code, fields, _ = machine(capsys, ["token", scenario(BLIND)])
        assert code == 1 and fields["verdict"] == "infeasible"

    def test_wrong_kind(self, capsys, scenario):
        assert main(["token", scenario(ORIGINAL)]) == 2


class TestDemo:
    def test_unknown(self, capsys):
        assert main(["demo", "nope"]) == 2
        assert "token-monotonicity" in capsys.readouterr().err

    def test_original(self, capsys):
        code, fields, _ = machine(capsys, ["demo", "finkelstein-original"])
        assert code == 0 and fields["invariant"] == "holds" and fields["claim"] == "holds"

    def test_exactly_one(self, capsys):
        code, fields, _ = machine(capsys, ["demo", "finkelstein-refined-exactly-one"])
        assert code == 0 and (fields["strategies"], fields["winners"], fields["witness"]) == ("16", "1", "echo")

    def test_at_least_one_one_state(self, capsys):
        code, fields, _ = machine(capsys, ["demo", "finkelstein-refined-at-least-one", "--states", "1"])
        assert code == 0 and fields["winners"] == "0" and fields["certificates_cover_all"] == "true"

    def test_small_sweep(self, capsys):
        code, fields, _ = machine(capsys, ["demo", "token-monotonicity", "--window=-2,2,3"])
        assert code == 0 and fields["counterexamples"] == "0" and fields["tasks"] == "29034"

    def test_human_has_summary_then_machine(self, capsys):
        assert main(["demo", "finkelstein-original"]) == 0
        text = capsys.readouterr().out
        head, _, tail = text.partition("\n\n")
        assert "relay" in head and "claim=holds" in tail


class TestArgs:
    def test_no_command(self, capsys):
        assert main([]) == 2

    def test_help(self, capsys):
        assert main(["--help"]) == 0
        assert "validate" in capsys.readouterr().out

    def test_parallel_positive(self, capsys):
        assert main(["demo", "finkelstein-original", "--parallel", "0"]) == 2

    def test_bad_window(self, capsys):
        assert main(["demo", "token-monotonicity", "--window", "1,2"]) == 2

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "causaltasks", "demo", "finkelstein-original",
                               "--format", "machine"], capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0 and proc.stdout.strip().endswith("claim=holds")


SAMPLES = sorted((Path(__file__).parent.parent / "scenarios").glob("*.txt"))


@pytest.mark.parametrize("path", SAMPLES, ids=lambda p: p.name)
def test_sample_scenarios_validate(capsys, path):
    assert main(["validate", str(path)]) == 0
