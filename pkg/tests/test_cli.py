import json
import os
import subprocess
import sys

import numpy as np
import pytest

import percolab as pl
from percolab.cli import main, resolve_graph


def run_cli(*argv):
    return main(list(argv))


class TestGraphSpecs:
    def test_gen_complete(self):
        g = resolve_graph("gen:complete,m=5,weight=0.5", seed=0)
        assert g.vertex_count == 5
        assert np.allclose(g.w, 0.5)

    def test_gen_complete_default_weight(self):
        g = resolve_graph("gen:complete,m=10", seed=0)
        assert np.allclose(g.w, 0.1)

    def test_gen_coupled(self):
        g = resolve_graph("gen:coupled,m=3,mode=transitive", seed=0)
        assert g.vertex_count == 6

    def test_gen_regular_deterministic(self):
        a = resolve_graph("gen:regular,n=10,r=3", seed=5)
        b = resolve_graph("gen:regular,n=10,r=3", seed=5)
        assert a.same_edges(b)

    def test_file_roundtrip(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text(pl.serialize_edge_list(pl.make_line_exp(4)))
        g = resolve_graph(f"file:{path}", seed=0)
        assert g.same_edges(pl.make_line_exp(4))

    def test_bad_spec(self):
        from percolab.cli import UsageError

        with pytest.raises(UsageError):
            resolve_graph("complete,m=3", seed=0)
        with pytest.raises(UsageError):
            resolve_graph("gen:nosuch,m=3", seed=0)


class TestGenerate:
    def test_writes_parseable_edge_list(self, tmp_path):
        out = tmp_path / "line.edges"
        assert run_cli("generate", "--graph", "gen:line_exp,n=5", "--out", str(out)) == 0
        g = pl.parse_edge_list(out.read_text())
        assert g.same_edges(pl.make_line_exp(5))

    def test_missing_out_is_usage_error(self):
        assert run_cli("generate", "--graph", "gen:line_exp,n=5") == 2


class TestPercolate:
    def test_summary_csv(self, tmp_path, capsys):
        out = tmp_path / "res.csv"
        code = run_cli(
            "percolate", "--graph", "gen:complete,m=4", "--s", "0.5",
            "--replicates", "200", "--seed", "3", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        header = [l for l in lines if l.startswith("#")]
        assert any("seed" in l and "3" in l for l in header)
        assert any(l.startswith("# percolab") for l in header)
        cols = [l for l in lines if not l.startswith("#")]
        assert cols[0] == "param,count,mean,variance,se,min,max"
        row = cols[1].split(",")
        assert float(row[0]) == 0.5
        assert int(row[1]) == 200

    def test_exactly_one_threshold_flag(self, tmp_path):
        assert run_cli("percolate", "--graph", "gen:complete,m=4") == 2
        assert (
            run_cli(
                "percolate", "--graph", "gen:complete,m=4",
                "--s", "0.5", "--omega", "2.0",
            )
            == 2
        )

    def test_runtime_error_exit_one(self):
        # threshold beyond n: spec validation fails at run time
        assert (
            run_cli(
                "percolate", "--graph", "gen:complete,m=4", "--threshold", "9",
                "--replicates", "10",
            )
            == 1
        )

    def test_values_out_and_thread_independence(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        common = [
            "percolate", "--graph", "gen:complete,m=6", "--s", "0.5",
            "--replicates", "64", "--seed", "11",
        ]
        assert run_cli(*common, "--threads", "1", "--out", str(tmp_path / "oa.csv"),
                       "--values-out", str(a)) == 0
        assert run_cli(*common, "--threads", "3", "--out", str(tmp_path / "ob.csv"),
                       "--values-out", str(b)) == 0
        va = [l for l in a.read_text().splitlines() if not l.startswith("#")]
        vb = [l for l in b.read_text().splitlines() if not l.startswith("#")]
        assert va == vb

    def test_json_format(self, tmp_path):
        out = tmp_path / "res.json"
        run_cli(
            "percolate", "--graph", "gen:complete,m=4", "--omega", "2",
            "--replicates", "50", "--out", str(out), "--format", "json",
        )
        payload = json.loads(out.read_text())
        assert payload["command"] == "percolate"
        assert payload["config"]["seed"] == 0
        assert payload["rows"][0]["count"] == 50

    def test_max_jump_statistic(self, tmp_path):
        out = tmp_path / "mj.csv"
        code = run_cli(
            "percolate", "--graph", "gen:complete,m=10", "--statistic", "max_jump",
            "--replicates", "30", "--out", str(out),
        )
        assert code == 0
        row = [l for l in out.read_text().splitlines() if not l.startswith("#")][1]
        assert row.startswith("max_jump,30,")


class TestCurveScanOracleFpp:
    def test_curve(self, tmp_path):
        out = tmp_path / "curve.csv"
        code = run_cli(
            "curve", "--graph", "gen:complete,m=100", "--grid", "0.5,2.0",
            "--replicates", "40", "--out", str(out),
        )
        assert code == 0
        rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert len(rows) == 3
        t2 = rows[2].split(",")
        assert float(t2[0]) == 2.0
        assert 0.5 < float(t2[2]) < 1.0  # mean fraction near the limit value

    def test_scan(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = run_cli(
            "scan", "--family", "line_exp", "--sizes", "6,8", "--s", "0.5",
            "--replicates", "50", "--out", str(out),
        )
        assert code == 0
        rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert [r.split(",")[0] for r in rows[1:]] == ["6", "8"]

    def test_scan_validation(self):
        assert run_cli("scan", "--family", "line_exp", "--sizes", "6,8") == 2
        assert run_cli("scan", "--family", "nosuch", "--sizes", "6,8", "--s", "0.5") == 2

    def test_oracle_graph_mode(self, tmp_path):
        out = tmp_path / "oracle.json"
        code = run_cli(
            "oracle", "--graph", "gen:complete,m=4", "--out", str(out),
            "--format", "json",
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["kind"] == "reports"
        assert all(r["pass"] for r in payload["rows"])
        checks = {r["check"] for r in payload["rows"]}
        assert checks == {"monotone_hitting_times", "coupling_bound"}

    def test_fpp_variance(self, tmp_path):
        out = tmp_path / "fpp.json"
        code = run_cli(
            "fpp", "--graph", "gen:complete,m=2,weight=1", "--target", "1",
            "--replicates", "2000", "--out", str(out), "--format", "json",
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["rows"][0]["check"] == "fpp_variance_bound"
        assert payload["rows"][0]["pass"]

    def test_fpp_needs_a_task(self):
        assert run_cli("fpp", "--graph", "gen:complete,m=3") == 2

    def test_fpp_curve_out(self, tmp_path):
        curve = tmp_path / "infection.csv"
        code = run_cli(
            "fpp", "--graph", "gen:torus,L=3", "--curve-out", str(curve),
            "--out", str(tmp_path / "fpp.csv"),
        )
        assert code == 0
        assert curve.read_text().startswith("t,fraction\n")


class TestPreset:
    def test_list(self, capsys):
        assert run_cli("preset", "--list") == 0
        out = capsys.readouterr().out
        assert "er-theta" in out
        assert "oracle-verify" in out

    def test_unknown(self):
        assert run_cli("preset", "nosuch") == 2

    def test_runs_with_override(self, tmp_path):
        out = tmp_path / "blowup.csv"
        code = run_cli(
            "preset", "line-blowup", "--replicates", "40", "--out", str(out),
        )
        assert code == 0
        rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert [r.split(",")[0] for r in rows[1:]] == ["10", "12", "14"]


class TestConfigFile:
    def test_config_supplies_defaults(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# experiment\ncommand = percolate\ngraph = gen:complete,m=4\n"
            "s = 0.5\nreplicates = 30\nseed = 9\n"
        )
        out = tmp_path / "res.csv"
        code = run_cli("percolate", "--config", str(cfg), "--out", str(out))
        assert code == 0
        text = out.read_text()
        assert "# seed = 9" in text

    def test_cli_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("graph = gen:complete,m=4\ns = 0.5\nseed = 9\n")
        out = tmp_path / "res.csv"
        run_cli("percolate", "--config", str(cfg), "--seed", "1",
                "--replicates", "20", "--out", str(out))
        assert "# seed = 1" in out.read_text()

    def test_malformed_config_exits_two_without_output(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("graph = gen:complete,m=4\nnot a kv line\n")
        out = tmp_path / "never.csv"
        assert run_cli("percolate", "--config", str(cfg), "--out", str(out)) == 2
        assert not out.exists()

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("graph = gen:complete,m=4\nbananas = 7\n")
        assert run_cli("percolate", "--config", str(cfg)) == 2

    def test_command_mismatch_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("command = curve\ngraph = gen:complete,m=4\ns = 0.5\n")
        assert run_cli("percolate", "--config", str(cfg)) == 2


class TestAtomicity:
    def test_no_partial_file_on_failure(self, tmp_path):
        out = tmp_path / "res.csv"
        code = run_cli(
            "percolate", "--graph", "gen:complete,m=4", "--threshold", "99",
            "--replicates", "10", "--out", str(out),
        )
        assert code == 1
        assert not out.exists()
        assert not any(p.name.startswith("res.csv.tmp") for p in tmp_path.iterdir())


def test_module_entry_point(tmp_path):
    out = tmp_path / "v.txt"
    proc = subprocess.run(
        [sys.executable, "-m", "percolab", "--version"],
        capture_output=True, text=True,
        env={**os.environ},
    )
    assert proc.returncode == 0
    assert "percolab" in proc.stdout
