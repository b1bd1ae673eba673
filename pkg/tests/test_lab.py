import json
import math

import pytest

from chromalab.errors import DomainError
from chromalab.lab import experiments, manifest
from chromalab.lab.cli import (
    EXIT_BUDGET,
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_USAGE,
    main,
)

try:
    import jsonschema
    HAVE_JSONSCHEMA = True
except ImportError:  # pragma: no cover
    HAVE_JSONSCHEMA = False


def load_schema(name: str) -> dict:
    import importlib.resources as res
    with res.files("chromalab").joinpath(f"schemas/{name}").open() as fh:
        return json.load(fh)


class TestManifest:
    def test_roundtrip(self, tmp_path):
        out = tmp_path / "data.txt"
        out.write_text("payload\n")
        m = manifest.Manifest(experiment="demo", parameters={"n": 3},
                              master_seed=9).start()
        m.finish([str(out)])
        path = m.write(str(tmp_path / "m.json"))
        back = manifest.Manifest.load(path)
        assert back.experiment == "demo"
        assert back.outputs == m.outputs
        assert all(manifest.verify_outputs(back).values())

    def test_tamper_detected(self, tmp_path):
        out = tmp_path / "data.txt"
        out.write_text("payload\n")
        m = manifest.Manifest(experiment="demo", parameters={},
                              master_seed=0).start()
        m.finish([str(out)])
        out.write_text("tampered\n")
        assert not all(manifest.verify_outputs(m).values())

    @pytest.mark.skipif(not HAVE_JSONSCHEMA, reason="jsonschema missing")
    def test_schema_valid(self, tmp_path):
        out = tmp_path / "d.txt"
        out.write_text("x")
        m = manifest.Manifest(experiment="demo", parameters={},
                              master_seed=1).start()
        m.finish([str(out)]).write(str(tmp_path / "m.json"))
        jsonschema.validate(json.loads((tmp_path / "m.json").read_text()),
                            load_schema("manifest.schema.json"))


class TestXkDistribution:
    def test_nonedge_count_case(self, tmp_path):
        # k=2 counts non-edges: mean must sit within 3 sigma of C(n,2)/2
        n, samples = 40, 200
        rep = experiments.xk_distribution_experiment(n, 2, samples, seed=3,
                                                     out_dir=str(tmp_path))
        m = n * (n - 1) // 2
        mean = sum(v * c for v, c in rep.counts.items()) / samples
        sigma = math.sqrt(m / 4 / samples)
        assert abs(mean - m / 2) < 3 * sigma
        assert len(rep.block_tvs) == 5

    def test_report_files_and_manifest(self, tmp_path):
        rep = experiments.xk_distribution_experiment(30, 10, 100, seed=1,
                                                     out_dir=str(tmp_path))
        man = manifest.Manifest.load(rep.manifest_path)
        assert all(manifest.verify_outputs(man).values())
        with open(rep.csv_path) as fh:
            header = fh.readline()
        assert "k_set_count" in header and "[" in header  # units named

    @pytest.mark.skipif(not HAVE_JSONSCHEMA, reason="jsonschema missing")
    def test_report_schema(self, tmp_path):
        rep = experiments.xk_distribution_experiment(30, 10, 100, seed=1,
                                                     out_dir=str(tmp_path))
        jsonschema.validate(json.loads(open(rep.json_path).read()),
                            load_schema("xk_report.schema.json"))

    def test_replay_is_byte_identical(self, tmp_path):
        rep = experiments.xk_distribution_experiment(30, 10, 100, seed=2,
                                                     out_dir=str(tmp_path / "a"))
        result = experiments.replay(rep.manifest_path, str(tmp_path / "b"))
        assert result and all(result.values())

    def test_rejects_small_samples(self, tmp_path):
        with pytest.raises(DomainError):
            experiments.xk_distribution_experiment(30, 10, 50, seed=0,
                                                   out_dir=str(tmp_path))

    def test_rejects_huge_mu(self, tmp_path):
        with pytest.raises(DomainError):
            experiments.xk_distribution_experiment(500, 5, 100, seed=0,
                                                   out_dir=str(tmp_path))


class TestChiInterval:
    def test_small_run(self, tmp_path):
        rep = experiments.chi_interval_experiment(20, 60, seed=4,
                                                  out_dir=str(tmp_path))
        assert rep.incomplete == 0 and not rep.unreliable
        # trivial envelope: n/alpha_max <= chi <= n
        assert rep.minimum >= 1 and rep.maximum <= 20
        assert rep.shortest_90_interval[0] >= rep.minimum
        assert rep.shortest_90_interval[1] <= rep.maximum
        assert rep.quantiles[0.5] >= rep.quantiles[0.05]

    def test_replay_is_byte_identical(self, tmp_path):
        rep = experiments.chi_interval_experiment(18, 50, seed=5,
                                                  out_dir=str(tmp_path / "a"))
        result = experiments.replay(rep.manifest_path, str(tmp_path / "b"))
        assert result and all(result.values())

    @pytest.mark.skipif(not HAVE_JSONSCHEMA, reason="jsonschema missing")
    def test_report_schema(self, tmp_path):
        rep = experiments.chi_interval_experiment(18, 50, seed=5,
                                                  out_dir=str(tmp_path))
        jsonschema.validate(json.loads(open(rep.json_path).read()),
                            load_schema("chi_interval_report.schema.json"))

    def test_rejects_large_n(self, tmp_path):
        with pytest.raises(DomainError):
            experiments.chi_interval_experiment(100, 50, seed=0,
                                                out_dir=str(tmp_path))


class TestCLI:
    def test_profile(self, capsys):
        assert main(["profile", "1000"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["a"] == 15

    def test_domain_error_exit(self):
        assert main(["profile", "2"]) == EXIT_DOMAIN

    def test_budget_exit(self):
        # x(n) stays above 0.01 for any n the search budget can reach
        assert main(["find-band", "0.001", "0.01", "1000"]) == EXIT_BUDGET

    def test_usage_exit(self):
        assert main(["no-such-command"]) == EXIT_USAGE
        assert main(["profile", "1000", "--no-such-flag"]) == EXIT_USAGE

    def test_fgap_and_ybound(self, capsys):
        assert main(["fgap", "1000000"]) == EXIT_OK
        capsys.readouterr()
        assert main(["ybound", "1000000", "50"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert "sigma_max" in out

    def test_poisson_shift_tail_syntax(self, capsys):
        assert main(["poisson-shift", "1000", "0.1", "tail:6"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["conclusion_ok"] is True

    def test_poisson_shift_interval_syntax(self, capsys):
        assert main(["poisson-shift", "100", "0.2", "150-inf"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["r"] == 10

    def test_sample_writes_graph(self, tmp_path, capsys):
        path = str(tmp_path / "g.bin")
        assert main(["--out", path, "sample", "25", "7"]) == EXIT_OK
        from chromalab.graphcore import Graph, sample_gnp_half
        with open(path, "rb") as fh:
            G = Graph.from_bytes(fh.read())
        assert G == sample_gnp_half(25, 7)

    def test_couple_and_gap(self, capsys):
        assert main(["couple", "12", "6", "1", "1", "5"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["chi_gap"]["gap_ok"] is True

    def test_ledger_command(self, capsys):
        assert main(["ledger", "0.2", "3000"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["telescoping_ok"] is True

    def test_config_file_and_env_override(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "cfg.json"
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        cfg.write_text(json.dumps({"out": str(out_a)}))
        assert main(["--config", str(cfg), "profile", "1000"]) == EXIT_OK
        assert out_a.exists()
        monkeypatch.setenv("CHROMALAB_OUT", str(out_b))
        assert main(["--config", str(cfg), "profile", "1000"]) == EXIT_OK
        assert out_b.exists()  # environment beats config file
