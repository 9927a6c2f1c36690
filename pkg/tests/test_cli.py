import io
import json
import subprocess
import sys

import pytest

from wellpointed.cli import run
from wellpointed.coalgebra import dumps_text, loads, wp
from wellpointed.functor import parse_functor
from wellpointed.gen import random_pointed
from wellpointed.rational import enumerate_wp


def cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_wp_lasso(capsys, samples):
    code, out, _ = cli(capsys, "wp", str(samples / "lasso.coalg"))
    assert code == 0
    assert out == (
        "functor: Id*{a,b}+{end}\nstates: 2\npoint: 0\n0: inj 0 (@1,a)\n1: inj 0 (@0,b)\n"
    )


def test_enum_matches_module(capsys):
    code, out, _ = cli(capsys, "enum", "--functor", "Id*Id+{leaf}", "--max-states", "2", "--mu")
    assert code == 0
    expected = [e.digest for e in enumerate_wp("Id*Id+{leaf}", 2, True)]
    assert out.splitlines() == expected == [
        "Id*Id+{leaf}|1|inj 1 leaf",
        "Id*Id+{leaf}|2|inj 0 (@1,@1);inj 1 leaf",
    ]


def test_hf_pipe():
    exe = [sys.executable, "-m", "wellpointed"]
    picture = subprocess.run(exe + ["hf-picture", "3"], capture_output=True, text=True, check=True)
    collapse = subprocess.run(
        exe + ["hf-collapse"], input=picture.stdout, capture_output=True, text=True, check=True
    )
    assert collapse.stdout == "{{},{{}},{{},{{}}}}\n"


def test_wf_report(capsys, samples):
    code, out, _ = cli(capsys, "wf", str(samples / "binary4.coalg"))
    assert code == 0
    assert out == "well-founded: false\nrounds: 1\npart: 3\n3: rank 0\n"
    code, out, _ = cli(capsys, "wf", "--format", "json", str(samples / "finite_tree.coalg"))
    data = json.loads(out)
    assert data["well_founded"] and data["rank"] == {"0": 2, "1": 1, "2": 0, "3": 0, "4": 0}


def test_fold_commands(capsys, samples):
    code, out, _ = cli(capsys, "fold", "--algebra", "size", str(samples / "finite_tree.coalg"))
    assert (code, out) == (0, "0: 5\n1: 3\n2: 1\n3: 1\n4: 1\n")
    code, out, _ = cli(capsys, "fold", "--algebra", "detector", str(samples / "two_cycle.coalg"))
    assert (code, out) == (0, "0: 1 2\n1: 1 2\n")
    code, out, _ = cli(capsys, "fold", "--algebra", "hfset", str(samples / "omega.coalg"))
    assert code == 1


def test_exit_codes(capsys, samples, tmp_path):
    assert cli(capsys, "fold", "--algebra", "size", str(samples / "omega.coalg"))[0] == 1
    code, _, err = cli(capsys, "canon", str(samples / "two_cycle.coalg"))
    assert code == 1 and "states 0 and 1" in err
    code, _, err = cli(capsys, "canon", str(tmp_path / "missing.coalg"))
    assert code == 2 and "missing.coalg" in err
    bad = tmp_path / "bad.coalg"
    bad.write_text("functor: P(Id)\nstates: 1\n0: {@4}\n")
    code, _, err = cli(capsys, "wp", str(bad))
    assert code == 2 and "line 3" in err and str(bad) in err
    assert cli(capsys, "enum", "--functor", "P(Id", "--max-states", "2")[0] == 2
    assert cli(capsys, "bogus")[0] == 2
    assert cli(capsys, "fold", str(samples / "omega.coalg"))[0] == 2
    assert cli(capsys, "fold", "--algebra", "detector", str(samples / "lasso.coalg"))[0] == 1
    assert cli(capsys, "moore-min", str(samples / "lasso.coalg"))[0] == 2
    assert cli(capsys, "expand", str(samples / "omega.coalg"))[0] == 1
    unpointed = tmp_path / "u.coalg"
    unpointed.write_text("functor: P(Id)\nstates: 1\n0: {}\n")
    assert cli(capsys, "wp", str(unpointed))[0] == 2
    assert cli(capsys, "enum", "--functor", "P({a,b}*Id)", "--max-states", "4")[0] == 1


def test_canon_round_trip_is_byte_identical(capsys, tmp_path, rng):
    for src in ["P({a,b}*Id)", "Id^{a,b}*{0,1}", "Id*Id+{leaf}"]:
        for _ in range(10):
            pc = wp(random_pointed(parse_functor(src), rng))
            path = tmp_path / "in.coalg"
            path.write_text(dumps_text(pc))
            code, first, _ = cli(capsys, "canon", str(path))
            assert code == 0
            path.write_text(first)
            _, second, _ = cli(capsys, "canon", str(path))
            assert first == second
            assert loads(first) == pc


def test_json_output_parses(capsys, samples):
    code, out, _ = cli(capsys, "wp", "--format", "json", str(samples / "lts.coalg"))
    assert code == 0 and loads(out).n == 3
    code, out, _ = cli(capsys, "aplus", "--format", "json", str(samples / "lts.coalg"))
    rows = json.loads(out)
    assert rows[1]["digest"] == rows[2]["digest"]
    code, out, _ = cli(capsys, "rho-step", "--format", "json", str(samples / "omega.coalg"))
    assert json.loads(out)["term"] == {"set": [{"state": 0}]}


def test_misc_commands(capsys, samples):
    assert cli(capsys, "stream-norm", "ab(ab)^w")[1] == "(ab)^w\n"
    assert cli(capsys, "stream-norm", "--format", "json", "aab(ab)^w")[1].count("prefix") == 1
    code, out, _ = cli(capsys, "moore-min", str(samples / "parity.moore"))
    assert out == "inputs: a\noutputs: even,odd\ninitial: 0\n0: even | 1\n1: odd | 0\n"
    assert cli(capsys, "rho-step", str(samples / "omega.coalg"))[1] == "{<P(Id)|1|{@0}>}\n"
    omega = str(samples / "omega.coalg")
    assert cli(capsys, "iso", omega, omega)[1] == "true\n"
    assert cli(capsys, "iso", omega, str(samples / "finite_tree.coalg"))[0] == 1
    code, out, _ = cli(capsys, "expand", "--depth", "2", str(samples / "binary4.coalg"))
    assert out == "inj 0 (_,_)(inj 0 (_,_)(…,…),inj 0 (_,_)(inj 1 leaf,…))\n"
    code, out, _ = cli(capsys, "reach", str(samples / "lts.coalg"))
    assert loads(out).n == 4
    code, out, _ = cli(capsys, "minimize", str(samples / "lts.coalg"))
    assert loads(out).n == 3


def test_dot_output(capsys, samples, tmp_path):
    code, out, _ = cli(capsys, "export-dot", str(samples / "omega.coalg"))
    assert code == 0
    assert 's0 [label="0: {@0}", peripheries=2];' in out and "s0 -> s0;" in out
    code, out, _ = cli(capsys, "expand", "--format", "dot", str(samples / "finite_tree.coalg"))
    assert out.startswith("digraph tree {") and out.count("->") == 4
    assert cli(capsys, "wf", "--format", "dot", str(samples / "omega.coalg"))[0] == 2
    target = tmp_path / "o.dot"
    assert cli(capsys, "wp", "--format", "dot", "-o", str(target), str(samples / "omega.coalg")) == (0, "", "")
    assert target.read_text().startswith("digraph")


def test_output_is_deterministic(capsys, samples):
    first = cli(capsys, "aplus", str(samples / "lts.coalg"))[1]
    assert all(cli(capsys, "aplus", str(samples / "lts.coalg"))[1] == first for _ in range(3))


@pytest.mark.parametrize("cmd", ["wp", "canon", "aplus", "wf", "export-dot"])
def test_stdin_input(cmd, monkeypatch, capsys, samples):
    monkeypatch.setattr(sys, "stdin", io.StringIO((samples / "omega.coalg").read_text()))
    assert cli(capsys, cmd, "-")[0] == 0
