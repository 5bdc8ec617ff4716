import csv
import io
import json

import pytest

from treedisc.cli import main
from treedisc.experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    default_eps,
    family_tree,
    mean_ratios,
    point_rng,
    r_a_values,
    run_experiment,
    strictly_decreasing,
    thread_count,
    to_csv,
)
from treedisc.sphere import certified_net, lower_bound
from treedisc.tree_core import InputError, Tree, num_leaves


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestConfig:
    @pytest.mark.parametrize("grid", [[], [5, 5], [8, 4]])
    def test_bad_grid(self, grid):
        with pytest.raises(InputError):
            run_experiment(ExperimentConfig("star-scaling", grid=grid))

    def test_bad_scenario(self):
        with pytest.raises(InputError):
            ExperimentConfig("nope", grid=[4]).validate()

    def test_needs_seeds(self):
        with pytest.raises(InputError):
            ExperimentConfig("star-scaling", grid=[4], seeds=[]).validate()

    def test_from_dict_ignores_unknown(self):
        cfg = ExperimentConfig.from_dict({"scenario": "concentration", "grid": [8], "bogus": 1})
        assert cfg.scenario == "concentration" and cfg.grid == [8]


class TestScenarios:
    def test_star_scaling_d1(self):
        recs = run_experiment(ExperimentConfig("star-scaling", d=1, grid=[256, 1024, 4096], seeds=[1]))
        assert [r.ell for r in recs] == [256, 1024, 4096]
        for r in recs:
            assert r.value_lo == r.value_hi  # circle sweep is exact
            assert r.value_hi <= r.trace_bound
            assert r.lower_bound == pytest.approx(lower_bound(r.ell, 1))
        assert strictly_decreasing(r.ratio for r in recs)

    def test_star_scaling_d2(self):
        recs = run_experiment(ExperimentConfig("star-scaling", d=2, grid=[512, 2048], seeds=[1, 2]))
        for r in recs:
            assert r.value_lo <= r.value_hi <= 1.02 * r.value_lo + 1e-9
            assert r.value_hi <= r.trace_bound

    def test_concentration(self):
        recs = run_experiment(ExperimentConfig("concentration", d=2, grid=[10_000], seeds=[1]))
        (r,) = recs
        assert abs(r.value_lo - r.lower_bound) <= 10_000 ** 0.75

    def test_r_a_mean(self):
        net = certified_net(2, 0.3, 1, trials=20_000)
        R = r_a_values(10_000, 2, point_rng(1, 10_000, 2), net)
        assert R.mean() == pytest.approx(2500, rel=0.01)
        assert r_a_values(2, 2, point_rng(1, 2, 2), net).max() <= 1.0

    def test_lower_bound_column(self):
        (r,) = run_experiment(ExperimentConfig("star-scaling", d=2, grid=[4096], seeds=[1]))
        assert rows(to_csv([r]))[0]["lower_bound"] == "1024.0"

    def test_tree_and_oriented(self):
        for scen in ("tree-scaling", "oriented-scaling"):
            recs = run_experiment(ExperimentConfig(scen, d=1, grid=[50, 100], seeds=[1, 2], family="caterpillar"))
            assert len(recs) == 4
            for r in recs:
                assert r.value_hi <= r.trace_bound

    def test_families(self):
        for fam in ("random", "caterpillar", "spider", "star"):
            t = family_tree(fam, 100, 3)
            assert isinstance(t, Tree) and 50 <= num_leaves(t) <= 150
        with pytest.raises(InputError):
            family_tree("blob", 10, 0)

    def test_default_eps(self):
        assert default_eps(1, 100.0, 50) == 0.005
        assert 0.14 < default_eps(2, 100.0, 10_000) < 0.15


class TestCsv:
    def test_columns_and_blank_timing(self):
        text = to_csv(run_experiment(ExperimentConfig("oriented-scaling", grid=[20], seeds=[3])))
        assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
        assert rows(text)[0]["wall_ms"] == ""

    def test_timing_column(self):
        recs = run_experiment(ExperimentConfig("oriented-scaling", grid=[20], seeds=[3], timing=True))
        assert float(rows(to_csv(recs))[0]["wall_ms"]) >= 0

    def test_thread_count_env(self, monkeypatch):
        monkeypatch.setenv("TREEDISC_THREADS", "2")
        assert thread_count(8) == 2 and thread_count(None) == 2
        monkeypatch.delenv("TREEDISC_THREADS")
        assert thread_count(None) == 1 and thread_count(3) == 3

    def test_byte_identical_across_workers(self):
        cfg = dict(scenario="tree-scaling", d=2, grid=[30, 60], seeds=[1, 2, 3])
        one = to_csv(run_experiment(ExperimentConfig(**cfg, threads=1)))
        two = to_csv(run_experiment(ExperimentConfig(**cfg, threads=2)))
        assert one == two

    def test_mean_ratios(self):
        recs = run_experiment(ExperimentConfig("oriented-scaling", grid=[20, 40], seeds=[1, 2]))
        means = mean_ratios(recs)
        assert [t for t, _ in means] == [20, 40]


class TestCli:
    @pytest.fixture
    def star5(self, tmp_path):
        p = tmp_path / "star.json"
        assert main(["gen", "--kind", "star", "--l", "5", "--out", str(p)]) == 0
        return p

    def test_gen_label_eval(self, tmp_path, star5):
        lab, trace, res = tmp_path / "f.json", tmp_path / "t.json", tmp_path / "r.json"
        assert main(["label", "--tree", str(star5), "--d", "1", "--seed", "4",
                     "--out", str(lab), "--trace", str(trace)]) == 0
        assert json.loads(trace.read_text())["bound"] == 5
        assert main(["eval", "--tree", str(star5), "--labeling", str(lab), "--out", str(res)]) == 0
        out = json.loads(res.read_text())
        assert out["method"] == "bruteforce" and out["lower"] == out["upper"]
        for method in ("certified", "circle", "local"):
            assert main(["eval", "--tree", str(star5), "--labeling", str(lab),
                         "--method", method, "--out", str(res)]) == 0

    def test_orient_oeval_oracle(self, tmp_path, star5, capsys):
        o = tmp_path / "o.json"
        assert main(["orient", "--tree", str(star5), "--out", str(o)]) == 0
        capsys.readouterr()
        assert main(["oeval", "--tree", str(star5), "--orientation", str(o)]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == 4
        assert main(["oracle", "oriented", "--tree", str(star5)]) == 0
        assert capsys.readouterr().out.strip() == "4"
        assert main(["oracle", "orientation", "--tree", str(star5), "--orientation", str(o)]) == 0
        assert capsys.readouterr().out.strip() == "4"

    def test_net(self, tmp_path):
        p = tmp_path / "net.json"
        assert main(["net", "--d", "2", "--eps", "0.5", "--trials", "1000", "--out", str(p)]) == 0
        data = json.loads(p.read_text())
        assert data["d"] == 2 and "certificate" in data

    def test_experiment_csv(self, tmp_path):
        p = tmp_path / "x.csv"
        assert main(["experiment", "oriented-scaling", "--grid", "20,40", "--seed", "1",
                     "--reps", "2", "--csv", str(p)]) == 0
        assert len(rows(p.read_text())) == 4

    def test_experiment_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"scenario": "star-scaling", "grid": [64], "seeds": [2]}))
        assert main(["experiment", "--config", str(cfg)]) == 0
        assert len(rows(capsys.readouterr().out)) == 1

    @pytest.mark.parametrize("argv", [
        ["experiment", "star-scaling", "--grid", "8,4", "--seed", "1"],
        ["experiment", "star-scaling", "--grid", "x"],
        ["experiment"],
        ["frobnicate"],
        ["eval", "--tree", "/nonexistent.json", "--labeling", "/nonexistent.json"],
        ["gen", "--kind", "star"],
    ])
    def test_exit_two(self, argv):
        assert main(argv) == 2

    def test_bad_tree_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n": 3, "edges": [[0, 1], [0, 1]]}))
        assert main(["orient", "--tree", str(bad)]) == 2
        bad.write_text("{not json")
        assert main(["orient", "--tree", str(bad)]) == 2

    def test_oracle_size_cap(self, tmp_path):
        p = tmp_path / "big.json"
        assert main(["gen", "--kind", "path", "--n", "40", "--out", str(p)]) == 0
        assert main(["oracle", "oriented", "--tree", str(p)]) == 2
