import json
from pathlib import Path

import numpy as np
import pytest

from zigzagtda import cli, metric, pipelines, zigzag
from zigzagtda.pipelines import ConfigError, ExperimentConfig, load_config

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def _write(tmp_path, text, name="cfg.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestConfigParsing:
    def test_bootstrap_config_fields(self, tmp_path):
        path = _write(tmp_path, """
[input]
shape = figure8
n = 100
seed = 7

[bootstrap]
stages = 3
sample_size = 30
epsilon = 1.0
max_dim = 2
dims = 0, 1
sequence = union
""")
        cfg = load_config(path, "bootstrap")
        assert cfg.shape == "figure8"
        assert cfg.n_points == 100
        assert cfg.seed == 7
        assert cfg.stages == 3
        assert cfg.sample_size == 30
        assert cfg.epsilon == 1.0
        assert cfg.dims == (0, 1)

    def test_size_range_syntax(self, tmp_path):
        path = _write(tmp_path, "[witness]\nsizes = 2:8:2\n")
        cfg = load_config(path, "witness")
        assert cfg.sizes == (2, 4, 6)
        path = _write(tmp_path, "[witness]\nsizes = 3, 5, 9\n", "b.ini")
        assert load_config(path, "witness").sizes == (3, 5, 9)

    def test_criterion_intervals(self, tmp_path):
        path = _write(tmp_path,
                      "[pairwise]\ncriterion_dim1 = 0:1, 1:1\n")
        cfg = load_config(path, "pairwise")
        assert cfg.criterion == {
            1: [zigzag.interval(0, 1), zigzag.interval(1, 1)]}

    def test_unknown_kind(self, tmp_path):
        path = _write(tmp_path, "[input]\nshape = circle\n")
        with pytest.raises(ConfigError):
            load_config(path, "frobnicate")

    def test_unknown_key(self, tmp_path):
        path = _write(tmp_path, "[input]\nshpae = circle\n")
        with pytest.raises(ConfigError):
            load_config(path, "bootstrap")

    def test_bad_value(self, tmp_path):
        path = _write(tmp_path, "[bootstrap]\nepsilon = wide\n")
        with pytest.raises(ConfigError):
            load_config(path, "bootstrap")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.ini", "bootstrap")


class TestRunners:
    def test_bootstrap_runs_and_is_consistent(self):
        cfg = ExperimentConfig(kind="bootstrap", shape="circle", n_points=60,
                               seed=3, stages=3, sample_size=40, epsilon=0.8)
        report = pipelines.run_bootstrap(cfg)
        assert report.stage_sizes == [40, 40, 40]
        assert len(report.betti) == 3
        for b, p in ((report.betti[j], j) for j in range(3)):
            assert report.barcodes[0].covering_count(0, p) == b[0]
            assert report.barcodes[1].covering_count(1, p) == b[1]

    def test_bootstrap_oversized_sample(self):
        cfg = ExperimentConfig(kind="bootstrap", shape="circle", n_points=10,
                               stages=2, sample_size=11, epsilon=0.5)
        with pytest.raises(ConfigError):
            pipelines.run_bootstrap(cfg)

    def test_bootstrap_needs_epsilon(self):
        cfg = ExperimentConfig(kind="bootstrap", shape="circle", n_points=30,
                               stages=2, sample_size=10)
        with pytest.raises(ConfigError):
            pipelines.run_bootstrap(cfg)

    def test_input_sources_exclusive(self):
        cfg = ExperimentConfig(kind="bootstrap", shape="circle",
                               input_path="x.txt", stages=2, sample_size=5,
                               epsilon=0.5)
        with pytest.raises(ConfigError):
            pipelines.run_bootstrap(cfg)

    def test_threshold_codensity(self):
        cfg = ExperimentConfig(kind="threshold", shape="circle", n_points=120,
                               seed=5, filter_name="codensity",
                               schedule=(5.0, 15.0), percent=90.0,
                               epsilon=0.6, dims=(0, 1))
        report = pipelines.run_threshold(cfg)
        assert report.stage_sizes == [108, 108]
        assert report.barcodes[1].intervals(1)  # the circle loop shows up

    def test_threshold_subsample_cap(self):
        cfg = ExperimentConfig(kind="threshold", shape="circle", n_points=40,
                               filter_name="codensity", schedule=(3.0, 5.0),
                               percent=25.0, subsample=30, epsilon=0.6)
        with pytest.raises(ConfigError):
            pipelines.run_threshold(cfg)

    def test_witness_with_accept_filter(self):
        cfg = ExperimentConfig(kind="witness", shape="circle", n_points=150,
                               seed=4, stages=3, landmark_size=10, max_dim=2,
                               dims=(0, 1), accept_betti=(1, 1))
        report = pipelines.run_witness(cfg)
        assert all(b == (1, 1) for b in report.betti)
        assert report.stage_sizes == [10, 10, 10]

    def test_witness_retry_cap_exhausted(self, monkeypatch):
        monkeypatch.setattr(pipelines, "_RETRY_CAP", 5)
        cfg = ExperimentConfig(kind="witness", shape="circle", n_points=60,
                               seed=4, stages=2, landmark_size=4,
                               accept_betti=(9, 9))
        with pytest.raises(RuntimeError):
            pipelines.run_witness(cfg)

    def test_pairwise_produces_graph(self):
        cfg = ExperimentConfig(
            kind="pairwise", shape="circle", n_points=150, seed=9, stages=4,
            landmark_size=10, max_dim=2, accept_betti=(1, 1),
            criterion={0: [zigzag.interval(0, 1)],
                       1: [zigzag.interval(0, 1)]})
        report = pipelines.run_pairwise(cfg)
        assert report.edges is not None
        for i, j in report.edges:
            assert 0 <= i < j < 4

    def test_pairwise_needs_criterion(self):
        cfg = ExperimentConfig(kind="pairwise", shape="circle", n_points=60,
                               stages=2, landmark_size=5)
        with pytest.raises(ConfigError):
            pipelines.run_pairwise(cfg)


class TestReportSerialization:
    def _report(self):
        cfg = ExperimentConfig(kind="bootstrap", shape="circle", n_points=60,
                               seed=3, stages=3, sample_size=40, epsilon=0.8)
        return pipelines.run_bootstrap(cfg)

    def test_replay_is_byte_identical(self):
        assert self._report().json_bytes() == self._report().json_bytes()

    def test_timings_excluded(self):
        report = self._report()
        assert report.timings  # measured...
        assert b"timing" not in report.json_bytes()  # ...but not serialized

    def test_schema(self):
        obj = json.loads(self._report().json_bytes())
        assert obj["kind"] == "bootstrap"
        assert obj["seed"] == 3
        assert obj["stage_sizes"] == [40, 40, 40]
        for entry in obj["barcodes"]:
            assert set(entry) == {"dimension", "intervals"}
            for iv in entry["intervals"]:
                assert set(iv) == {"start", "end", "half_open"}
                assert iv["half_open"] is False


class TestRendering:
    def test_barcode_svg_structure_and_determinism(self):
        b = zigzag.Barcode.build({0: [zigzag.interval(0, 2)],
                                  1: [zigzag.interval(1, 1),
                                      zigzag.interval(0.5, 1.5)]})
        svg = pipelines.render_barcode(b, title="t")
        assert svg == pipelines.render_barcode(b, title="t")
        assert svg.startswith("<svg ")
        assert svg.rstrip().endswith("</svg>")
        assert svg.count("<circle") == 1  # the point bar
        assert "dim 0" in svg and "dim 1" in svg

    def test_graph_svg(self):
        svg = pipelines.render_graph(4, [(0, 1), (2, 3)], title="g")
        assert svg.count("<circle") == 4
        assert svg.count("<line") == 2

    def test_render_report_dispatch(self):
        graph_obj = {"kind": "pairwise", "seed": 0, "stage_sizes": [3, 3],
                     "edges": [[0, 1]]}
        assert "<circle" in pipelines.render_report(graph_obj)
        bar_obj = {"kind": "bootstrap", "seed": 0, "barcodes": [
            {"dimension": 0, "intervals": [
                {"start": 0, "end": 1, "half_open": False}]}]}
        assert "<line" in pipelines.render_report(bar_obj)


class TestCli:
    def test_generate_roundtrip(self, tmp_path):
        out = tmp_path / "cloud.txt"
        rc = cli.main(["generate", "--shape", "circle", "--n", "25",
                       "--seed", "4", "--out", str(out)])
        assert rc == 0
        cloud = metric.load_point_cloud(out)
        assert cloud.n == 25
        assert np.array_equal(cloud.points, metric.generate("circle", 25, 4).points)

    def test_bootstrap_with_overrides(self, tmp_path):
        cfg = _write(tmp_path, """
[input]
shape = circle
n = 60
seed = 3

[bootstrap]
stages = 3
sample_size = 40
epsilon = 0.8
""")
        out_json = tmp_path / "r.json"
        out_svg = tmp_path / "r.svg"
        rc = cli.main(["bootstrap", "--config", str(cfg), "--dim", "1",
                       "--seed", "12", "--out-json", str(out_json),
                       "--out-svg", str(out_svg)])
        assert rc == 0
        obj = json.loads(out_json.read_text())
        assert obj["seed"] == 12
        assert {e["dimension"] for e in obj["barcodes"]} == {1}
        assert out_svg.read_text().startswith("<svg ")

    def test_input_file_overrides_shape(self, tmp_path):
        cloud_file = tmp_path / "c.txt"
        metric.save_point_cloud(cloud_file, metric.generate("circle", 50, 2))
        cfg = _write(tmp_path, """
[input]
shape = torus4d
n = 999

[bootstrap]
stages = 2
sample_size = 30
epsilon = 0.8
dims = 0
""")
        out_json = tmp_path / "r.json"
        rc = cli.main(["bootstrap", "--config", str(cfg),
                       "--input", str(cloud_file),
                       "--out-json", str(out_json)])
        assert rc == 0
        assert json.loads(out_json.read_text())["config"]["input_path"] == \
            str(cloud_file)

    def test_render_subcommand(self, tmp_path):
        report = {"kind": "bootstrap", "seed": 0, "barcodes": [
            {"dimension": 0, "intervals": [
                {"start": 0, "end": 2, "half_open": False}]}]}
        src = tmp_path / "r.json"
        src.write_text(json.dumps(report))
        out = tmp_path / "r.svg"
        assert cli.main(["render", "--input", str(src),
                         "--out-svg", str(out)]) == 0
        assert out.read_text().startswith("<svg ")

    def test_config_error_exit_2(self, tmp_path, capsys):
        cfg = _write(tmp_path, "[bootstrap]\nepsilon = wide\n")
        assert cli.main(["bootstrap", "--config", str(cfg)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_input_exit_2(self):
        assert cli.main(["bootstrap", "--seed", "1"]) == 2

    def test_runtime_error_exit_3(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        out = tmp_path / "o.svg"
        assert cli.main(["render", "--input", str(bad),
                         "--out-svg", str(out)]) == 3

    def test_missing_file_exit_3(self, tmp_path):
        out = tmp_path / "o.svg"
        assert cli.main(["render", "--input", str(tmp_path / "nope.json"),
                         "--out-svg", str(out)]) == 3


class TestShippedConfigs:
    @pytest.mark.parametrize("name,kind", [
        ("bootstrap_figure8.ini", "bootstrap"),
        ("threshold_codensity.ini", "threshold"),
        ("witness_circle.ini", "witness"),
        ("pairwise_circle.ini", "pairwise"),
    ])
    def test_config_loads_and_runs(self, name, kind):
        cfg = load_config(CONFIG_DIR / name, kind)
        report = pipelines.run(cfg)
        assert report.kind == kind
        assert report.json_bytes() == pipelines.run(cfg).json_bytes()
