import json

import pytest

from amalgrank import automaton as am
from amalgrank import cli

DOC = {
    "groups": [
        {"name": "Z2", "kind": "cyclic", "args": [2]},
        {"name": "Z3", "kind": "cyclic", "args": [3]},
    ],
    "free_products": [{"name": "F", "factors": ["Z2", "Z3"]}],
    "amalgams": [{"name": "A", "builtin": "z4-z2cube"}],
    "subgroups": {
        "H": {"ambient": "F", "generators": ["ab"]},
        "N": {"ambient": "F", "generators": ["ab^2ab"]},
        "K": {"ambient": "F", "generators": ["(ab)^6"], "normal_closure": True},
        "P": {"ambient": "F", "generators": ["ab^2", "bab^2a"]},
        "L1": {"ambient": "A", "generators": ["ab", "cabc"]},
        "L2": {"ambient": "A", "generators": ["ac", "bacb"], "twists": {"0": 1}},
    },
}


@pytest.fixture
def doc(tmp_path):
    path = tmp_path / "doc.json"
    path.write_text(json.dumps(DOC))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.startswith("{") else None
    return code, report, out


def test_rank(doc, capsys):
    code, r, _ = run(capsys, "rank", "-i", doc, "--subgroup", "H")
    assert code == cli.EXIT_OK
    assert r["schema"] == cli.SCHEMA
    assert r["rank"] == 1 and r["basis"] == ["ab"] and r["index"] == "inf"
    assert r["chi"] == r["vertices"] - r["edges"] == 0


def test_member(doc, capsys):
    code, r, _ = run(capsys, "member", "-i", doc, "--subgroup", "H", "--word", "abab")
    assert code == 0 and r["member"] and r["basis_word"] == [[0, 1], [0, 1]]
    code, r, _ = run(capsys, "member", "-i", doc, "--subgroup", "H", "--word", "ba")
    assert code == 0 and not r["member"]


def test_intersect(doc, capsys):
    code, r, _ = run(capsys, "intersect", "-i", doc, "--subgroups", "H", "N")
    assert code == 0 and r["states"] >= 1 and r["factor_free"]


def test_verify_bound(doc, capsys):
    code, r, _ = run(capsys, "verify-bound", "-i", doc, "--subgroups", "H", "N")
    assert code == 0 and r["holds"] and r["q_star"] == 3 and r["coefficient"] == "6"


def test_verify_theorem2(doc, capsys):
    code, r, _ = run(capsys, "verify-theorem2", "-i", doc, "--amalgam", "A",
                     "--subgroups", "L1", "L2")
    assert code == 0 and r["holds"] and r["T_order"] == 2


def test_export_dot_matches_euler_data(doc, tmp_path, capsys):
    out = tmp_path / "h.dot"
    code, r, _ = run(capsys, "export-dot", "-i", doc, "--subgroup", "H", "-o", str(out))
    assert code == 0
    text = out.read_text()
    assert text.count("shape=box") == 2 and text.count("shape=circle") == 2
    assert text.count(" -- ") == 4
    assert text.count("peripheries=2") == 1
    assert (r["vertices"], r["edges"]) == (4, 4)


def test_input_errors(doc, tmp_path, capsys):
    code, _, out = run(capsys, "rank", "-i", doc, "--subgroup", "missing")
    assert code == cli.EXIT_INPUT and "unknown subgroup" in out.err
    code, _, _ = run(capsys, "rank", "-i", str(tmp_path / "nope.json"), "--subgroup", "H")
    assert code == cli.EXIT_INPUT
    code, _, _ = run(capsys, "member", "-i", doc, "--subgroup", "H", "--word", "a(b")
    assert code == cli.EXIT_INPUT
    code, _, out = run(capsys, "verify-bound", "-i", doc, "--subgroups", "H", "P")
    assert code == cli.EXIT_INPUT and "factor-free" in out.err


def test_indeterminate(doc, capsys):
    code, r, _ = run(capsys, "--max-states", "10", "rank", "-i", doc, "--subgroup", "K")
    assert code == cli.EXIT_INDETERMINATE and "exceeded" in r["indeterminate"]


def test_violation_exit_code(doc, capsys, monkeypatch):
    real = am.check_eq2_bound

    def broken(A1, A2):
        return {**real(A1, A2), "holds": False}

    monkeypatch.setattr(am, "check_eq2_bound", broken)
    code, r, _ = run(capsys, "verify-bound", "-i", doc, "--subgroups", "H", "N")
    assert code == cli.EXIT_VIOLATION and r["holds"] is False


def test_paper_case_single(capsys):
    code, r, _ = run(capsys, "paper-case", "--case", "3", "--n", "2", "--amalgam", "z4-z2cube")
    assert code == 0 and r["equality"]
    assert r["quotient"]["rbar_intersection"] == 60
    assert r["amalgam"]["lhs"] == 120


def test_paper_case_unknown_amalgam(capsys):
    code, _, _ = run(capsys, "paper-case", "--case", "3", "--amalgam", "nope")
    assert code == cli.EXIT_INPUT


def test_paper_case_deterministic(capsys):
    argv = ["paper-case", "--case", "4", "--n", "2"]
    code1, _, out1 = run(capsys, *argv)
    code2, _, out2 = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1.out == out2.out
