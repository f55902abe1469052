import json

import pytest

from branchlab import generate_random, load_metis
from branchlab.cli import CSV_COLUMNS, main, read_samples, strip_timing

PATH4 = "4 3\n2\n1 3\n2 4\n3\n"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def path_file(tmp_path):
    p = tmp_path / "path.graph"
    p.write_text(PATH4)
    return str(p)


def test_gen_k4(capsys):
    code, out, _ = run_cli(capsys, "gen", "4", "6", "1")
    assert code == 0
    assert out.splitlines()[0] == "4 6"
    assert load_metis(out).degrees().tolist() == [3, 3, 3, 3]


def test_gen_empty(capsys):
    code, out, _ = run_cli(capsys, "gen", "10", "0", "1")
    assert code == 0
    assert out == "10 0\n" + "\n" * 10


def test_gen_round_trip(tmp_path, capsys):
    out = tmp_path / "g.graph"
    assert run_cli(capsys, "gen", "80", "200", "9", "--out", str(out))[0] == 0
    assert load_metis(out.read_text()) == generate_random(80, 200, 9)


def test_gen_capacity_error(capsys):
    code, _, err = run_cli(capsys, "gen", "4", "7", "0")
    assert code == 2 and "capacity" in err


def test_seed_from_env(monkeypatch, capsys):
    monkeypatch.setenv("BRANCHLAB_SEED", "9")
    _, out, _ = run_cli(capsys, "gen", "80", "200")
    assert load_metis(out) == generate_random(80, 200, 9)
    monkeypatch.setenv("BRANCHLAB_SEED", "nine")
    assert run_cli(capsys, "gen", "80", "200")[0] == 2


def test_run_cc_both_on_path(path_file, capsys):
    code, out, _ = run_cli(capsys, "run", "--graph", path_file, "--algo", "cc",
                           "--variant", "both", "--repeats", "1")
    doc = json.loads(out)
    assert code == 0
    assert [b["variant"] for b in doc["results"]] == ["based", "avoiding"]
    assert doc["results"][0]["labels_sha256"] == doc["results"][1]["labels_sha256"]
    assert doc["equivalent"] is True
    assert doc["results"][0]["components"] == 1


def test_run_bfs_both_csv(capsys):
    code, out, _ = run_cli(capsys, "run", "--gen", "300,900,4", "--algo", "bfs", "--root", "0",
                           "--format", "csv", "--repeats", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# branchlab-run v1")
    header = lines[1].split(",")
    assert tuple(header) == CSV_COLUMNS and "store_ratio" in header
    assert "# equivalent=true" in lines
    rows = [ln.split(",") for ln in lines[2:] if not ln.startswith("#")]
    ratios = [float(r[header.index("store_ratio")]) for r in rows if r[1] == "based" and r[-1]]
    assert ratios and all(r >= 1 for r in ratios)


def test_run_cc_avoiding_has_no_if_site(path_file, capsys):
    _, out, _ = run_cli(capsys, "run", "--graph", path_file, "--algo", "cc",
                        "--variant", "avoiding", "--repeats", "1")
    doc = json.loads(out)
    assert "sv.if" not in doc["results"][0]["counters"]["sites"]
    assert "equivalent" not in doc


def test_run_edge_list_format(tmp_path, capsys):
    p = tmp_path / "g.txt"
    p.write_text("# path\n0 1\n1 2\n")
    code, out, _ = run_cli(capsys, "run", "--graph", str(p), "--graph-format", "edges",
                           "--algo", "bfs", "--root", "2", "--repeats", "1")
    assert code == 0 and json.loads(out)["results"][0]["reached"] == 3


@pytest.mark.parametrize("argv, needle", [
    (["--gen", "10,20,1", "--algo", "bfs", "--root", "10"], "out of range"),
    (["--gen", "10,20,1", "--algo", "bfs"], "--root"),
    (["--gen", "10,x", "--algo", "cc"], "--gen"),
    (["--graph", "/nonexistent/file", "--algo", "cc"], "cannot read"),
])
def test_run_errors(capsys, argv, needle):
    code, _, err = run_cli(capsys, "run", *argv)
    assert code == 2 and needle in err


def test_run_bad_graph_file(tmp_path, capsys):
    p = tmp_path / "bad.graph"
    p.write_text("3 2\n2\n1 4\n2\n")
    code, _, err = run_cli(capsys, "run", "--graph", str(p), "--algo", "cc")
    assert code == 2 and "line 3" in err


@pytest.mark.parametrize("fmt", ["json", "csv"])
@pytest.mark.parametrize("algo", ["cc", "bfs"])
def test_run_deterministic(tmp_path, capsys, fmt, algo):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.{fmt}"
        assert run_cli(capsys, "run", "--gen", "200,500,3", "--algo", algo, "--root", "1",
                       "--init-state", "st", "--format", fmt, "--out", str(out),
                       "--repeats", "1")[0] == 0
        outs.append(out.read_text())
    if fmt == "json":
        a, b = (json.dumps(strip_timing(json.loads(t)), sort_keys=True) for t in outs)
    else:
        a, b = (drop_csv_timing(t) for t in outs)
    assert a == b


def drop_csv_timing(text):
    keep = [i for i, c in enumerate(CSV_COLUMNS) if c not in ("wall_time", "time_ratio")]
    lines = []
    for ln in text.splitlines():
        if ln.startswith("# speedup="):
            continue
        if not ln.startswith("#"):
            ln = ",".join(ln.split(",")[i] for i in keep)
        lines.append(ln)
    return "\n".join(lines)


def test_verify_lemmas(capsys):
    code, out, _ = run_cli(capsys, "verify-lemmas")
    assert code == 0
    assert "FAIL" not in out
    assert "0.5" in out and "1.25" in out and "1.75" in out
    nested = next(ln for ln in out.splitlines() if "1000" in ln and "nested" in ln)
    observed = nested.split("totals in [")[1].split("]")[0]
    lo, hi = (int(x) for x in observed.split(","))
    assert 1000 <= lo <= hi <= 1002


@pytest.fixture(scope="module")
def reports(tmp_path_factory):
    d = tmp_path_factory.mktemp("reports")
    paths = []
    for seed, fmt in [(0, "json"), (1, "csv"), (2, "json")]:
        p = d / f"r{seed}.{fmt}"
        assert main(["run", "--gen", f"400,600,{seed}", "--algo", "cc", "--format", fmt,
                     "--out", str(p), "--repeats", "1"]) == 0
        paths.append(str(p))
    return paths


def test_read_samples_json_and_csv_agree(tmp_path, reports):
    j = tmp_path / "a.json"
    c = tmp_path / "a.csv"
    for p, fmt in ((j, "json"), (c, "csv")):
        main(["run", "--gen", "300,500,5", "--algo", "cc", "--format", fmt, "--out", str(p),
              "--repeats", "1"])
    strip = lambda ss: [(s.index, s.ops, s.branches, s.mispredictions, s.stores) for s in ss]
    assert strip(read_samples(str(j))) == strip(read_samples(str(c)))
    assert read_samples(str(j), variant="avoiding", algo="bfs") == []


def test_correlate_reports(capsys, reports):
    code, out, _ = run_cli(capsys, "correlate", *reports, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["labels"] == ["T", "I", "B", "M", "L", "S"]
    assert doc["matrix"][0][0] == pytest.approx(1.0)
    code, out, _ = run_cli(capsys, "correlate", *reports, "--variant", "all")
    assert code == 0 and out.splitlines()[0].split(",")[1:] == doc["labels"]


def test_correlate_too_few_samples(tmp_path, capsys):
    p = tmp_path / "one.json"
    main(["run", "--gen", "2,1,0", "--algo", "cc", "--variant", "based", "--out", str(p),
          "--repeats", "1"])
    code, _, err = run_cli(capsys, "correlate", str(p))
    assert code == 2 and "3" in err


def test_correlate_rejects_foreign_json(tmp_path, capsys):
    p = tmp_path / "x.json"
    p.write_text('{"format": "other"}')
    code, _, err = run_cli(capsys, "correlate", str(p))
    assert code == 2
