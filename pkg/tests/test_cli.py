"""Tests for the command-line tool: exit codes and frozen machine output."""

from pathlib import Path

import pytest

from hornsets.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
B6 = str(FIXTURES / "beispiel6.hn")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def machine_dict(out):
    entries = {}
    for line in out.strip().splitlines():
        key, _, value = line.partition("=")
        entries[key] = value
    return entries


@pytest.fixture()
def pq_file(tmp_path, capsys):
    target = tmp_path / "beispiel6_pq.hn"
    code, _ = run(capsys, "intersect", B6, "--left", "p", "--right", "q", "--out", str(target))
    assert code == 0
    return str(target)


class TestValidate:
    def test_clean(self, capsys):
        code, out = run(capsys, "validate", B6, "--format", "machine")
        assert code == 0
        assert out.splitlines()[0] == "ok=true"

    def test_diagnostics_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.hn"
        bad.write_text("constructors s/1, 0/0.\np(X) <- p(s(X)).\n")
        code, out = run(capsys, "validate", str(bad), "--format", "machine")
        assert code == 2
        entries = machine_dict(out)
        assert entries["ok"] == "false"
        assert entries["diagnostic.1.code"] == "body-order"

    def test_syntax_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.hn"
        bad.write_text("constructors s/1\n")
        code, out = run(capsys, "validate", str(bad), "--format", "machine")
        assert code == 2
        assert machine_dict(out)["diagnostic.1.code"] == "syntax"


class TestIntersect:
    def test_machine_output(self, capsys):
        code, out = run(capsys, "intersect", B6, "--left", "p", "--right", "q", "--format", "machine")
        assert code == 0
        entries = machine_dict(out)
        assert entries["pred"] == "pq"
        assert entries["clauses.n"] == "2"
        assert entries["clause.1"] == "pq(s(s(X1)):s(s(X1))) <- pq(s(X1):s(X1))."
        assert entries["clause.2"] == "pq(0:0)."

    def test_output_file_reparses(self, pq_file, capsys):
        code, _ = run(capsys, "validate", pq_file)
        assert code == 0


class TestSat:
    def test_false_goal_trace(self, pq_file, capsys):
        code, out = run(
            capsys,
            "sat",
            pq_file,
            "--goal",
            "pq(s(s(X)):s(s(X)))",
            "--trace",
            "--format",
            "machine",
        )
        assert code == 1
        entries = machine_dict(out)
        assert entries["result"] == "false"
        assert entries["trace.n"] == "4"
        assert [entries[f"trace.{i}.rule"] for i in range(1, 5)] == ["1", "3", "1", "2"]
        assert entries["trace.1.exp"] == "s(s(X1)):s(s(X1))"
        assert entries["trace.2.exp"] == "s(X1):s(X1)"

    def test_true_goal_witness(self, pq_file, capsys):
        code, out = run(
            capsys, "sat", pq_file, "--goal", "pq(X:Y)", "--witness", "--format", "machine"
        )
        assert code == 0
        entries = machine_dict(out)
        assert entries["result"] == "true"
        assert entries["witness"] == "0:0"

    def test_resource_exhausted(self, pq_file, capsys):
        code, out = run(
            capsys,
            "sat",
            pq_file,
            "--goal",
            "pq(X:Y)",
            "--max-states",
            "1",
            "--format",
            "machine",
        )
        assert code == 3
        assert machine_dict(out)["result"] == "resource-exhausted"


class TestOrder:
    def test_beispiel_witness(self, capsys):
        code, out = run(
            capsys,
            "order",
            "s(X):Y",
            "s(s(X)):s(Y)",
            "--global",
            B6,
            "--format",
            "machine",
        )
        assert code == 0
        entries = machine_dict(out)
        assert entries["star"] == "true"
        assert entries["witness.star"] == ":.1 <- :.1.s.1, :.2 <- :.2.s.1"

    def test_restricted_blocks_asymmetry(self, capsys):
        code, out = run(
            capsys, "order", "X:Y", "s(s(X)):s(Y)", "--global", B6, "--format", "machine"
        )
        assert code == 1
        entries = machine_dict(out)
        assert entries["plain"] == "true"
        assert entries["star"] == "false"

    def test_without_global(self, capsys):
        code, out = run(capsys, "order", "s(X)", "s(s(X))", "--format", "machine")
        assert code == 0
        assert machine_dict(out)["star"] == "true"


class TestReprCommand:
    def test_shared_variable_classes(self, capsys):
        code, out = run(capsys, "repr", "s(X):s(X)", "--format", "machine")
        assert code == 0
        entries = machine_dict(out)
        assert entries["paths.n"] == "5"
        assert entries["classes.n"] == "2"
        assert entries["class.1"] == "{:.1, :.2}"
        assert entries["class.2"] == "{:.1.s.1, :.2.s.1}"
        assert entries["valid"] == "true"

    def test_pretty_lists_class(self, capsys):
        code, out = run(capsys, "repr", "s(X):s(X)")
        assert code == 0
        assert "{:.1, :.2}" in out


class TestBoundAndEnum:
    def test_bound_contains_trace_exponents(self, pq_file, capsys):
        code, out = run(
            capsys, "bound", pq_file, "--goal", "pq(s(s(X)):s(s(X)))", "--format", "machine"
        )
        assert code == 0
        entries = machine_dict(out)
        terms = [entries[f"term.{i}"] for i in range(1, int(entries["terms.n"]) + 1)]
        assert "s(s(X1)):s(s(X1))" in terms
        assert "s(X1):s(X1)" in terms

    def test_enum(self, pq_file, capsys):
        code, out = run(
            capsys, "enum", pq_file, "--pred", "pq", "--depth", "4", "--format", "machine"
        )
        assert code == 0
        entries = machine_dict(out)
        assert entries["terms.n"] == "1"
        assert entries["term.1"] == "0:0"

    def test_enum_pretty(self, capsys):
        code, out = run(capsys, "enum", B6, "--pred", "q", "--depth", "2")
        assert code == 0
        assert "0:0" in out
