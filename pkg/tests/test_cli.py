import json

import pytest

from klkostant import cli, hecke


@pytest.fixture(autouse=True)
def _restore_settings(monkeypatch, tmp_path):
    s = hecke.settings()
    cap, cache = s.rank_cap, s.cache_dir
    monkeypatch.delenv(cli.ENV_RANK_CAP, raising=False)
    monkeypatch.setenv(cli.ENV_CACHE_DIR, str(tmp_path / "cache"))
    yield
    hecke.configure(rank_cap=cap, cache_dir=cache)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kostant(capsys):
    code, out, _ = run(capsys, "kostant", "1,4,3,2,5")
    assert code == 0
    assert out.splitlines()[0] == "Negative, witness 14325@1, citation Thm 4.11"
    code, out, _ = run(capsys, "kostant", "--format", "json", "w:2,1,3,2,1,4,3,2", "-n", "5")
    data = json.loads(out)
    assert set(data) == {"input", "shape", "type", "status", "witness", "citation", "report"}
    assert data["type"]["tag"] == "1" and data["status"] == "Positive"


def test_rsk(capsys):
    code, out, _ = run(capsys, "rsk", "5,2,3,4,1,6,7")
    assert code == 0
    assert "P = [[1,3,4,6,7],[2],[5]]" in out and "Q = [[1,3,4,6,7],[2],[5]]" in out


def test_algebra_commands(capsys):
    assert run(capsys, "klpoly", "3412", "1324")[1].strip().endswith("v^3 + v")
    assert run(capsys, "mu", "4231", "1324")[1].strip() == "0"
    assert run(capsys, "cmul", "w:2", "w:1,2", "-n", "3")[1].strip() == "C_132 + C_321"
    code, out, _ = run(capsys, "dprod", "4231", "2143", "--algorithm", "A")
    assert code == 0 and "at v=1" in out
    code, out, _ = run(capsys, "--format", "json", "dprod", "4231", "2143")
    assert json.loads(out)["product"]["basis"] == "D"


def test_leq(capsys):
    code, out, _ = run(capsys, "leq", "--left", "w:5,4,6,5", "269731854", "-n", "9")
    assert code == 0
    assert ": True" in out.splitlines()[0] and "window 4..7" in out
    code, out, _ = run(capsys, "leq", "--right", "2143", "4231")
    assert "right preorder" in out


def test_cells(capsys):
    code, out, _ = run(capsys, "cells", "-n", "4", "--highlight", "3412")
    assert code == 0 and out.startswith("digraph") and "<U>3412</U>" in out
    code, out, _ = run(capsys, "cells", "-n", "3", "--format", "json")
    assert len(json.loads(out)["cells"]) == 4


def test_classify_kahrstrom_count(capsys):
    assert run(capsys, "classify", "4,2,5,1,3")[1].startswith("type 2: n=5 i=2")
    code, out, _ = run(capsys, "--format", "json", "kahrstrom", "14325")
    assert code == 0 and json.loads(out)["holds"] is False
    code, out, _ = run(capsys, "count", "--family", "11", "--n", "3")
    assert out.strip() == "formula 6, enumerated 6, ratio 1/6"


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--only", "V7")
    assert code == 0 and "1/1 claims passed" in out and "does not prove" in out
    code, out, _ = run(capsys, "--format", "json", "verify", "--only", "V4")
    assert json.loads(out)["all_passed"]


def test_verify_failure_exit_code(capsys, monkeypatch):
    from klkostant import claims

    bad = claims.Claim("V7", "c", "s", lambda r: claims.Outcome(False, ["FAIL forced"]))
    monkeypatch.setitem(claims.CLAIMS, "V7", bad)
    assert run(capsys, "verify", "--only", "V7")[0] == 1


def test_cache_commands(capsys, tmp_path):
    cache = tmp_path / "c2"
    code, out, _ = run(capsys, "cache", "warm", "-n", "4", "--cache-dir", str(cache))
    assert code == 0 and (cache / "kl-rank4.txt").exists()
    code, out, _ = run(capsys, "--format", "json", "cache", "stats", "--cache-dir", str(cache))
    assert any(f["file"].endswith("kl-rank4.txt") for f in json.loads(out)["files"])
    assert run(capsys, "cache", "clear", "--cache-dir", str(cache))[0] == 0
    assert not (cache / "kl-rank4.txt").exists()
    hecke.clear_tables()


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["kostant", "1,1,2"],
        ["kostant", "w:1,2"],
        ["klpoly", "123", "1234"],
        ["classify", "231"],
        ["--rank-cap", "12", "rsk", "21"],
        ["rsk", "21", "--format", "dot"],
        ["verify", "--only", "X"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_rank_cap_flag_beats_environment(capsys, monkeypatch):
    monkeypatch.setenv(cli.ENV_RANK_CAP, "3")
    code, _, err = run(capsys, "klpoly", "2134", "1234")
    assert code == 2 and "rank cap" in err
    assert run(capsys, "--rank-cap", "4", "klpoly", "2134", "1234")[0] == 0
    assert run(capsys, "klpoly", "2134", "1234", "--rank-cap", "4")[0] == 0


def test_cache_dir_from_environment(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv(cli.ENV_CACHE_DIR, str(tmp_path / "envcache"))
    code, out, _ = run(capsys, "--format", "json", "cache", "stats")
    assert json.loads(out)["cache_dir"] == str(tmp_path / "envcache")
    code, out, _ = run(capsys, "--format", "json", "cache", "stats", "--no-cache")
    assert json.loads(out)["cache_dir"] is None


def test_json_is_stable(capsys):
    a = run(capsys, "--format", "json", "kahrstrom", "14325")[1]
    b = run(capsys, "--format", "json", "kahrstrom", "14325")[1]
    assert a == b
