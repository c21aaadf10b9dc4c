import json

import pytest

from linkhide import generate_scale_free
from linkhide.cli import main
from linkhide.experiment import read_csv
from linkhide.graph import read_edge_list_file


@pytest.fixture
def network(tmp_path):
    path = tmp_path / "g.txt"
    assert main(["generate", "--n", "150", "--gamma", "2.0", "--seed", "2", "--out", str(path)]) == 0
    return path


def test_generate_matches_library(network):
    assert read_edge_list_file(network) == generate_scale_free(150, 2.0, 2)


def test_attack_writes_json(tmp_path, network):
    out = tmp_path / "r.json"
    rc = main(["attack", "--network", str(network), "--metric", "RA", "--algorithm", "approx_local",
               "--k", "4", "--target-size", "5", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert len(payload["deleted_edges"]) <= 4
    assert len(payload["targets"]) == 5
    assert payload["objective_trace"][-1] <= payload["objective_trace"][0]


def test_attack_generated_network_to_stdout(capsys):
    rc = main(["attack", "--n", "120", "--graph-seed", "1", "--metric", "katz",
               "--algorithm", "greedy_katz", "--k", "2", "--target-size", "3"])
    assert rc == 0
    assert len(json.loads(capsys.readouterr().out)["deleted_edges"]) == 2


def test_sweep_writes_csv_and_figure(tmp_path, network):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        "metric = ra\n"
        "algorithms = approx_local, random_del\n"
        "budgets = 0:6:2\n"
        "network = g.txt\n"
        "target_size = 5\n"
        "output = out/ra.csv\n"
    )
    assert main(["sweep", str(cfg), "--plot", "--no-timing"]) == 0
    with open(tmp_path / "out" / "ra.csv") as fh:
        rows, prov = read_csv(fh)
    assert len(rows) == 8 and prov["metric"] == "ra"
    assert (tmp_path / "out" / "ra.png").stat().st_size > 0


def test_sweep_to_stdout(tmp_path, network, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(f"metric = cn\nalgorithms = greedy_base\nbudgets = 0,1\nnetwork = {network}\n"
                   "target_size = 3\ntiming = false\n")
    assert main(["sweep", str(cfg)]) == 0
    assert "algorithm,metric,budget" in capsys.readouterr().out


def test_oracle(tmp_path):
    path = tmp_path / "sq.txt"
    path.write_text("0 2\n0 3\n1 2\n1 3\n")
    out = tmp_path / "o.json"
    assert main(["oracle", "--network", str(path), "--metric", "cn", "--targets", "0 1",
                 "--k", "2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["final_objective"] == 0.0


def test_bad_config_exits_2(tmp_path, network, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["attack", "--network", str(network), "--metric", "pagerank", "--algorithm",
              "approx_local", "--k", "1"])
    assert exc.value.code == 2
    assert "unknown metric" in capsys.readouterr().err


def test_incompatible_algorithm_exits_2(network):
    with pytest.raises(SystemExit) as exc:
        main(["attack", "--network", str(network), "--metric", "ra", "--algorithm",
              "greedy_katz", "--k", "1"])
    assert exc.value.code == 2


def test_missing_file_exits_1(tmp_path, capsys):
    rc = main(["oracle", "--network", str(tmp_path / "nope.txt"), "--metric", "cn",
               "--targets", "0 1", "--k", "1"])
    assert rc == 1
    assert "nope.txt" in capsys.readouterr().err
