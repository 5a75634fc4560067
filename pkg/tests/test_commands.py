import io
import json

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from model_elicitation.experiments import CSV_COLUMNS, DOMAINS_DIR

FETCH_TRUTH = str(DOMAINS_DIR / "fetch" / "truth-crouch.txt")


def run(*args, **kwargs):
    out = io.StringIO()
    call_command("elicit", *args, stdout=out, stderr=io.StringIO(), **kwargs)
    return out.getvalue()


def test_check():
    out = run("check", "fetch")
    assert "domain: fetch" in out
    assert "possible conditions: 2" in out
    assert "  move:pre:(is_crouch) (" in out
    assert "most relaxed: cost 1" in out


def test_queries_text(tmp_path):
    output = tmp_path / "queries.txt"
    run("queries", "fetch", "--output", str(output))
    text = output.read_text()
    assert text.startswith("queries: 2 for 2 condition(s)\n")
    assert "kind: validation" in text


def test_queries_json():
    lines = run("queries", "fetch", "--format", "json").splitlines()
    records = [json.loads(line) for line in lines]
    assert [r["targets"] for r in records] == [
        ["move:pre:(hand_tucked)"],
        ["move:pre:(is_crouch)"],
    ]
    assert records[1]["plan"] == ["(move roomA roomB)"]


def test_queries_without_conditions():
    assert run("queries", "blocksworld") == "queries: 0 for 0 condition(s)\n"


def test_simulated_session(tmp_path):
    output = tmp_path / "session.txt"
    log = tmp_path / "session.jsonl"
    run(
        "elicit",
        "fetch",
        "--oracle",
        "simulated:" + FETCH_TRUTH,
        "--log",
        str(log),
        "--output",
        str(output),
    )
    assert output.read_text().endswith(
        "final:\n  absent move:pre:(hand_tucked)\n  present move:pre:(is_crouch)\n"
    )
    assert len(log.read_text().splitlines()) == 2


def test_interactive_session_matches_simulated(tmp_path):
    simulated = tmp_path / "simulated.txt"
    interactive = tmp_path / "interactive.txt"
    run("elicit", "fetch", "--oracle", "simulated:" + FETCH_TRUTH, "-o", str(simulated))
    out = run(
        "elicit",
        "fetch",
        "--oracle",
        "interactive",
        "-o",
        str(interactive),
        stdin=io.StringIO("(crouch)\n(move roomA roomB)\n\nno\n"),
    )
    assert "Does this plan reach the goal?" in out
    assert interactive.read_text() == simulated.read_text()


def test_annotate_then_elicit(tmp_path):
    domain = tmp_path / "domain.pddl"
    truth = tmp_path / "truth.txt"
    output = tmp_path / "session.txt"
    run(
        "annotate",
        "blocksworld",
        "-k",
        "2",
        "--seed",
        "3",
        "--truth",
        str(truth),
        "-o",
        str(domain),
    )
    assert ":possible-" in domain.read_text()
    run(
        "elicit",
        str(domain),
        "--problem",
        str(DOMAINS_DIR / "blocksworld" / "problem.pddl"),
        "--oracle",
        "simulated:" + str(truth),
        "-o",
        str(output),
    )
    final = output.read_text().split("final:\n")[1]
    expected = []
    for line in truth.read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        label, schema, slot, atom = line.split(" ", 3)
        expected.append("{} {}:{}:{}".format(label, schema, slot, atom))
    assert sorted(final.splitlines()) == sorted("  " + e for e in expected)


def test_eval(tmp_path):
    output = tmp_path / "results.csv"
    run("eval", "blocksworld", "-k", "1", "-k", "2", "--seeds", "2", "-o", str(output))
    header, *rows = output.read_text().splitlines()
    assert header == ",".join(CSV_COLUMNS)
    assert [row.split(",")[:2] for row in rows] == [
        ["blocksworld", "1"],
        ["blocksworld", "2"],
    ]


@pytest.mark.parametrize(
    "args",
    [
        (),
        ("check", "no-such-domain"),
        ("check", "fetch", "--problem", "missing.pddl"),
        ("elicit", "fetch", "--oracle", "psychic"),
        ("elicit", "fetch", "--oracle", "simulated"),
        ("eval", "blocksworld", "-k", "0"),
        ("eval", "blocksworld", "--seeds", "0"),
        ("annotate", "fetch", "-k", "1"),
    ],
)
def test_usage_errors(args):
    with pytest.raises(CommandError) as excinfo:
        run(*args)
    assert excinfo.value.returncode == 1


def test_syntax_error(tmp_path):
    domain = tmp_path / "domain.pddl"
    domain.write_text("(define (domain broken)")
    (tmp_path / "problem.pddl").write_text("(define (problem p))")
    with pytest.raises(CommandError) as excinfo:
        run("check", str(domain))
    assert excinfo.value.returncode == 1
    assert "line" in str(excinfo.value)


def test_inconsistent_answers():
    with pytest.raises(CommandError) as excinfo:
        run("elicit", "fetch", "--oracle", "interactive", stdin=io.StringIO("no\n"))
    assert excinfo.value.returncode == 2
