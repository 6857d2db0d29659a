import json

import pytest
from click.testing import CliRunner

from dpnibble import cover_from_json, girth, graph_from_text
from dpnibble.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args, **kw):
    return runner.invoke(main, args, catch_exceptions=False, **kw)


class TestGenerate:
    def test_girth5_file_verifies(self, runner, tmp_path):
        out = tmp_path / "g.txt"
        r = invoke(runner, ["generate", "--kind", "girth5_regular",
                            "--n", "10", "--d", "3", "--seed", "7",
                            "--out", str(out)])
        assert r.exit_code == 0, r.output
        assert "sha256:" in r.output
        g = graph_from_text(out.read_text())
        assert girth(g) >= 5

    def test_dp_cover_rho_zero(self, runner, tmp_path):
        out = tmp_path / "c.json"
        r = invoke(runner, ["generate", "--kind", "dp_cover", "--n", "8",
                            "--d", "3", "--ell", "4", "--rho", "0.0",
                            "--seed", "3", "--out", str(out)])
        assert r.exit_code == 0, r.output
        cov = cover_from_json(out.read_text())
        assert cov.cover.num_edges == 0

    def test_list_cover_on_girth5_base(self, runner, tmp_path):
        out = tmp_path / "lc.json"
        r = invoke(runner, ["generate", "--kind", "list_cover", "--n", "10",
                            "--d", "3", "--girth5", "--ell", "5",
                            "--seed", "2", "--out", str(out)])
        assert r.exit_code == 0, r.output
        cov = cover_from_json(out.read_text())
        assert list(cov.list_sizes()) == [5] * 10
        assert girth(cov.base) >= 5

    def test_same_spec_twice_is_byte_identical(self, runner, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        args = ["generate", "--kind", "regular", "--n", "20", "--d", "3",
                "--seed", "11"]
        invoke(runner, args + ["--out", str(a)])
        invoke(runner, args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_seed_mandatory(self, runner):
        r = invoke(runner, ["generate", "--kind", "regular", "--n", "10", "--d", "2"])
        assert r.exit_code == 2
        assert "seed" in r.output

    def test_config_file_with_flag_precedence(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"kind": "regular", "n": 10, "d": 2, "seed": 1}))
        out1 = tmp_path / "o1.txt"
        r = invoke(runner, ["generate", "--config", str(cfg), "--out", str(out1)])
        assert r.exit_code == 0
        out2 = tmp_path / "o2.txt"
        r = invoke(runner, ["generate", "--config", str(cfg), "--n", "12",
                            "--out", str(out2)])
        assert r.exit_code == 0
        assert graph_from_text(out2.read_text()).vertex_count == 12

    def test_usage_error_on_bad_params(self, runner):
        r = invoke(runner, ["generate", "--kind", "regular", "--n", "5",
                            "--d", "3", "--seed", "1"])
        assert r.exit_code == 2


class TestSchedule:
    def test_emits_terminal_line(self, runner):
        r = invoke(runner, ["schedule", "--d", "1000000", "--epsilon", "0.1",
                            "--t", "2"])
        assert r.exit_code == 0
        assert "# i_star=" in r.output

    def test_out_of_range_epsilon(self, runner):
        r = invoke(runner, ["schedule", "--d", "100", "--epsilon", "0"])
        assert r.exit_code == 2

    def test_repeat_identical(self, runner, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["schedule", "--d", "100000", "--epsilon", "0.05"]
        invoke(runner, args + ["--out", str(a)])
        invoke(runner, args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestColor:
    def write_cover(self, tmp_path, cov):
        from dpnibble import cover_to_json
        p = tmp_path / "cover.json"
        p.write_text(cover_to_json(cov))
        return p

    def test_edgeless_cover_exits_zero(self, runner, tmp_path):
        from dpnibble import Graph, from_list_assignment
        cov = from_list_assignment(Graph.empty(5), [range(2)] * 5)
        path = self.write_cover(tmp_path, cov)
        out = tmp_path / "res.json"
        r = invoke(runner, ["color", str(path), "--seed", "1", "--out", str(out)])
        assert r.exit_code == 0, r.output
        doc = json.loads(out.read_text())
        assert doc["ok"] is True
        assert doc["verified"] is True

    def test_infeasible_instance_nonzero_exit_writes_result(self, runner, tmp_path):
        from dpnibble import Graph, from_list_assignment
        cov = from_list_assignment(Graph.from_edges(2, [(0, 1)]), [[0], [0]])
        path = self.write_cover(tmp_path, cov)
        out = tmp_path / "res.json"
        result = runner.invoke(main, ["color", str(path), "--seed", "1",
                                      "--max-retries", "1", "--max-resamples", "1",
                                      "--out", str(out)])
        assert result.exit_code != 0
        doc = json.loads(out.read_text())
        assert doc["ok"] is False

    def test_small_real_instance(self, runner, tmp_path):
        from dpnibble import uniform_list_cover
        from dpnibble.generators import incidence_graph
        cov = uniform_list_cover(incidence_graph(3, seed=0), 12)
        path = self.write_cover(tmp_path, cov)
        out = tmp_path / "res.json"
        r = invoke(runner, ["color", str(path), "--seed", "9", "--out", str(out)])
        assert r.exit_code == 0, r.output
        doc = json.loads(out.read_text())
        assert doc["ok"] and len(doc["rounds"]) > 0

    def test_bad_cover_file_usage_error(self, runner, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"base": {"vertex_count": 2, "edges": []}, '
                     '"lists": [[0], [1]], "cover_edges": [[0, 1]]}')
        result = runner.invoke(main, ["color", str(p), "--seed", "1"])
        assert result.exit_code == 2


class TestStats:
    def make_cover_file(self, tmp_path):
        from dpnibble import cover_to_json
        from conftest import regular_cover
        cov = regular_cover(10, 3, 4, seed=2)
        p = tmp_path / "cover.json"
        p.write_text(cover_to_json(cov))
        return p

    def test_single_trial_rows(self, runner, tmp_path):
        path = self.make_cover_file(tmp_path)
        out = tmp_path / "stats.csv"
        r = invoke(runner, ["stats", str(path), "--seed", "5", "--trials", "1",
                            "--eta", "0.4", "--out", str(out)])
        assert r.exit_code == 0, r.output
        lines = out.read_text().splitlines()
        assert lines[1] == "kind,id,mean,variance,tail_freq"
        assert sum(1 for ln in lines if ln.startswith("vertex,")) == 10

    def test_anchor_identity_rows(self, runner, tmp_path):
        path = self.make_cover_file(tmp_path)
        out = tmp_path / "stats.csv"
        r = invoke(runner, ["stats", str(path), "--seed", "5", "--trials", "50",
                            "--eta", "0.4", "--anchor", "3", "--out", str(out)])
        assert r.exit_code == 0
        for line in out.read_text().splitlines():
            if line.startswith("anchor,"):
                _, _, u, umk, res = line.split(",")
                assert int(res) == int(u) - int(umk)

    def test_jobs_do_not_change_output(self, runner, tmp_path):
        path = self.make_cover_file(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["stats", str(path), "--seed", "5", "--trials", "60", "--eta", "0.4"]
        invoke(runner, base + ["--jobs", "1", "--out", str(a)])
        invoke(runner, base + ["--jobs", "3", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_summary_json(self, runner, tmp_path):
        path = self.make_cover_file(tmp_path)
        out = tmp_path / "stats.csv"
        summ = tmp_path / "summary.json"
        r = invoke(runner, ["stats", str(path), "--seed", "5", "--trials", "30",
                            "--eta", "0.4", "--anchor", "0",
                            "--out", str(out), "--summary", str(summ)])
        assert r.exit_code == 0
        doc = json.loads(summ.read_text())
        assert doc["anchor"]["identity_holds"] is True
