import json

import pytest

from _util import two_triangles
from modmax import cli
from modmax.graph import barabasi_albert, parse_edge_list, read_partition, write_edge_list


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def k3(tmp_path):
    p = tmp_path / "k3.txt"
    p.write_text("a b\nb c\na c\n")
    return p


@pytest.fixture
def tt(tmp_path):
    p = tmp_path / "tt.txt"
    write_edge_list(two_triangles(), p)
    return p


def test_solve_k3(capsys, k3, tmp_path):
    code, out, _ = run(capsys, "solve", k3, "--out", tmp_path / "o")
    assert code == cli.EXIT_OK
    assert out.splitlines()[0] == "Q* = 0 (exact 0/36), k = 1, status OPTIMAL"
    kv = dict(tok.split("=", 1) for tok in out.splitlines()[1].split())
    assert kv["status"] == "OPTIMAL" and kv["q_exact"] == "0/36"
    cert = json.loads((tmp_path / "o" / "certificate.json").read_text())
    assert cert["best_numerator"] == cert["bound_numerator"] == "0"
    g = parse_edge_list(k3.read_text())
    assert read_partition(g, tmp_path / "o" / "partition.tsv") == [0, 0, 0]


def test_solve_is_idempotent(capsys, tt, tmp_path):
    run(capsys, "solve", tt, "--out", tmp_path / "a")
    run(capsys, "solve", tt, "--out", tmp_path / "b")
    for name in ("certificate.json", "partition.tsv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "certificate.meta.json").exists()


def test_solve_time_limit(capsys, tmp_path):
    path = tmp_path / "ba.txt"
    write_edge_list(barabasi_albert(60, 4, seed=1), path)
    code, out, _ = run(capsys, "solve", path, "--time-limit", "0.001")
    assert code == cli.EXIT_TIME_LIMIT
    assert "status TIME_LIMIT" in out and "bound = " in out


def test_solve_node_limit(capsys, tmp_path):
    path = tmp_path / "ba.txt"
    write_edge_list(barabasi_albert(60, 4, seed=1), path)
    code, out, _ = run(capsys, "solve", path, "--node-limit", "1")
    assert code == cli.EXIT_NODE_LIMIT and "status=NODE_LIMIT" in out


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("a b\nb\n")
    code, _, err = run(capsys, "solve", bad)
    assert code == cli.EXIT_PARSE and "line 2" in err


@pytest.mark.parametrize("argv", [
    ["solve", "{k3}", "--gamma", "0"],
    ["solve", "{k3}", "--bogus"],
    ["heuristic", "spinglass", "{k3}"],
    ["heuristic", "belief", "{k3}"],
    [],
])
def test_usage_errors(capsys, k3, argv):
    code, _, _ = run(capsys, *[a.format(k3=k3) for a in argv])
    assert code == cli.EXIT_USAGE


def test_enumerate(capsys, tmp_path, tt):
    k2 = tmp_path / "k2.txt"
    k2.write_text("x y\n")
    code, out, _ = run(capsys, "enumerate", k2)
    assert code == 0 and out.startswith("multiplicity = 1, ")
    code, out, _ = run(capsys, "enumerate", tt, "--out", tmp_path / "e")
    assert "multiplicity=1" in out
    assert (tmp_path / "e" / "optimum_000.tsv").exists()


def test_heuristic_two_triangles(capsys, tt, tmp_path):
    code, out, _ = run(capsys, "heuristic", "louvain", tt, "--seed", "5", "--out", tmp_path / "p.tsv")
    assert code == 0 and "q_exact=72/144" in out and "k=2" in out
    code, again, _ = run(capsys, "heuristic", "louvain", tt, "--seed", "5")
    assert again == out


def test_compare(capsys, tt, tmp_path):
    code, out, _ = run(capsys, "compare", tt)
    rows = [line for line in out.splitlines() if line.startswith("algorithm=")]
    assert code == 0 and len(rows) == 6
    assert all("gop=1.000000" in r and "max_ami=1.000000" in r for r in rows)
    part = tmp_path / "belief.tsv"
    part.write_text("".join(f"{i}\t{i % 2}\n" for i in range(6)))
    code, out, _ = run(capsys, "compare", tt, "--algorithms", "louvain", "--external", f"belief={part}")
    belief = [line for line in out.splitlines() if line.startswith("algorithm=belief")]
    assert belief and "gop=0.000000" in belief[0]


def test_compare_timeout_shows_upper_bound(capsys, tmp_path):
    path = tmp_path / "ba.txt"
    write_edge_list(barabasi_albert(60, 4, seed=1), path)
    code, out, _ = run(capsys, "compare", path, "--algorithms", "louvain", "--node-limit", "1")
    assert code == cli.EXIT_NODE_LIMIT
    assert "gop<=" in out and "max_ami=n/a" in out


def test_generate_round_trip(capsys, tmp_path):
    out_file = tmp_path / "er.txt"
    code, out, _ = run(capsys, "generate", "er", "--n", 40, "--m", 140, "--seed", 7, "--out", out_file)
    assert code == 0
    assert parse_edge_list(out_file.read_text()).m == 140
    code, _, _ = run(capsys, "generate", "er", "--n", 4, "--seed", 1, "--out", out_file)
    assert code == cli.EXIT_USAGE


def test_bench_and_report(capsys, tmp_path, tt):
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({"instances": [
        {"name": "triangles", "path": str(tt)},
        {"name": "karate", "builtin": "karate"},
        {"name": "er1", "generator": "er", "n": 16, "m": 32, "seed": 1},
    ]}))
    code, out, _ = run(capsys, "bench", manifest, "--out", tmp_path / "b",
                       "--algorithms", "louvain,cnm", "--jobs", 2)
    assert code == 0 and out.startswith("records=6 ")
    code, out, _ = run(capsys, "bench", manifest, "--out", tmp_path / "b",
                       "--algorithms", "louvain,cnm")
    assert "exact_cached=3" in out
    code, out, _ = run(capsys, "report", tmp_path / "b" / "records.jsonl", "--out", tmp_path / "r")
    assert code == 0 and out.startswith("records=6")
    svg = (tmp_path / "r" / "scatter_louvain.svg").read_text()
    assert 'id="diagonal"' in svg


def test_config_file_presets_flags(capsys, tmp_path, k3):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gamma": "1/2"}))
    code, out, _ = run(capsys, "--config", cfg, "solve", k3)
    # gamma = 1/2 makes the single community worth 1 - gamma = 1/2
    assert code == 0 and "q=0.5 " in out
