import json

import numpy as np
import pytest
from PIL import Image

from iftrec.cli import main

from .conftest import MINI_CORPUS


@pytest.fixture()
def store_dir(tmp_path):
    out = tmp_path / "store"
    code = main(["ingest", "--manifest", str(MINI_CORPUS / "manifest.json"), "--store", str(out)])
    assert code == 0
    return out


class TestIngest:
    def test_ingest_builds_store_layout(self, store_dir):
        assert (store_dir / "manifest.json").exists()
        assert (store_dir / "features.bin").exists()
        assert (store_dir / "vocab.txt").exists()

    def test_missing_manifest_exits_one(self, tmp_path, capsys):
        code = main(["ingest", "--manifest", str(tmp_path / "nope.json"), "--store", str(tmp_path / "s")])
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"]["code"] in ("error", "invalid_input")

    def test_ingest_wikiart_with_interested_flag(self, tmp_path):
        root = tmp_path / "art"
        for cat in ("landscape", "still_life"):
            (root / cat).mkdir(parents=True)
            for i in range(2):
                Image.fromarray(np.full((10, 12, 3), 90, dtype=np.uint8)).save(
                    root / cat / f"{cat}{i}.png"
                )
        out = tmp_path / "store"
        code = main(
            [
                "ingest-wikiart", "--dir", str(root), "--store", str(out),
                "--subclasses", "landscape,still_life", "--interested", "still_life",
            ]
        )
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        labels = {img["id"]: img["label"] for img in manifest["images"]}
        assert all(v == 1 for k, v in labels.items() if k.startswith("still_life"))
        assert all(v == 0 for k, v in labels.items() if k.startswith("landscape"))


class TestEval:
    def test_report_schema_and_both_classes(self, store_dir, tmp_path, capsys):
        report_path = tmp_path / "report.json"
        code = main(
            [
                "eval", "--store", str(store_dir), "--model", "rf",
                "--train-frac", "0.67", "--seed", "42", "--report", str(report_path),
            ]
        )
        assert code == 0
        report = json.loads(report_path.read_text())
        assert set(report) >= {"model", "classes", "auc", "confusion", "seed", "hyperparameters"}
        assert set(report["classes"]) == {"0", "1"}
        for row in report["classes"].values():
            assert set(row) == {"precision", "recall", "f1", "support"}
        assert report["model"] == "random-forest"
        assert report["seed"] == 42
        assert len(report["confusion"]) == 2
        out = capsys.readouterr().out
        assert "auc=" in out

    def test_same_seed_byte_identical_reports(self, store_dir, tmp_path):
        paths = [tmp_path / "r1.json", tmp_path / "r2.json"]
        for path in paths:
            assert (
                main(
                    ["eval", "--store", str(store_dir), "--model", "rf", "--seed", "42",
                     "--report", str(path)]
                )
                == 0
            )
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_grid_search_prefixes_model_name(self, store_dir, tmp_path):
        report_path = tmp_path / "report.json"
        code = main(
            ["eval", "--store", str(store_dir), "--model", "nb", "--seed", "1",
             "--grid", "default", "--report", str(report_path)]
        )
        assert code == 0
        assert json.loads(report_path.read_text())["model"] == "gs-naive-bayes"

    def test_unknown_model_rejected(self, store_dir, capsys):
        code = main(["eval", "--store", str(store_dir), "--model", "cnn"])
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip())
        assert "cnn" in err["error"]["message"]


class TestSimulate:
    def test_same_seed_identical_report_files(self, store_dir, tmp_path):
        paths = [tmp_path / "s1.json", tmp_path / "s2.json"]
        for path in paths:
            code = main(
                ["simulate", "--store", str(store_dir), "--policy", "scent",
                 "--runs", "1", "--max-iters", "10", "--target", "zoodles",
                 "--seed", "7", "--report", str(path)]
            )
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_report_schema(self, store_dir, tmp_path):
        path = tmp_path / "sim.json"
        code = main(
            ["simulate", "--store", str(store_dir), "--policy", "random",
             "--runs", "3", "--target", "bolognese", "--query", "pasta recipe",
             "--seed", "3", "--report", str(path)]
        )
        assert code == 0
        report = json.loads(path.read_text())
        assert set(report) >= {"policy", "tasks", "interesting", "uninteresting", "seed"}
        assert report["policy"] == "random"
        assert report["tasks"][0]["target"] == "bolognese"

    def test_unknown_target_exits_one(self, store_dir, capsys):
        code = main(
            ["simulate", "--store", str(store_dir), "--policy", "scent",
             "--runs", "1", "--target", "watercolors"]
        )
        assert code == 1


class TestFlagHandling:
    def test_unknown_flag_exits_one_naming_it(self, capsys):
        code = main(["eval", "--store", "x", "--model", "rf", "--frobnicate", "9"])
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip())
        assert "--frobnicate" in err["error"]["message"]

    def test_unknown_command_exits_one(self, capsys):
        assert main(["transmogrify"]) == 1

    def test_every_command_accepts_seed(self):
        from iftrec.cli import build_parser

        parser = build_parser()
        for argv in (
            ["ingest", "--manifest", "m", "--store", "s", "--seed", "3"],
            ["ingest-wikiart", "--dir", "d", "--store", "s", "--seed", "3"],
            ["eval", "--store", "s", "--model", "rf", "--seed", "3"],
            ["serve", "--store", "s", "--seed", "3"],
            ["simulate", "--store", "s", "--policy", "scent", "--target", "t", "--seed", "3"],
        ):
            args = parser.parse_args(argv)
            assert args.seed == 3

    def test_env_var_supplies_store_default(self, monkeypatch, capsys):
        monkeypatch.setenv("IFT_STORE", "/tmp/absent-store")
        code = main(["eval", "--model", "rf"])
        assert code == 1  # store missing is a validation error, not a crash
        err = json.loads(capsys.readouterr().err.strip())
        assert "absent-store" in err["error"]["message"]

    def test_bad_config_key_rejected(self, store_dir, capsys):
        code = main(
            ["simulate", "--store", str(store_dir), "--policy", "scent",
             "--runs", "1", "--target", "zoodles", "--config", "scent.nope=1"]
        )
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip())
        assert "scent.nope" in err["error"]["message"]

    def test_scent_config_override_accepted(self, store_dir, tmp_path):
        path = tmp_path / "sim.json"
        code = main(
            ["simulate", "--store", str(store_dir), "--policy", "scent",
             "--runs", "1", "--target", "zoodles", "--seed", "1",
             "--config", "scent.gamma=0.9", "--report", str(path)]
        )
        assert code == 0
        assert json.loads(path.read_text())["config"]["scent.gamma"] == 0.9
