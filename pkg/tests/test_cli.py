import io
import json
import subprocess
import sys

import numpy as np
import pytest
from conftest import save_png

from phishvis.cli import main
from phishvis.corpus import read_feature_cache


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def scd_cache(color_corpus, tmp_path):
    path = tmp_path / "scd.csv"
    assert run("extract", "--descriptor", "scd", "--in", color_corpus, "--out", path, "--workers", 1)[0] == 0
    return path


@pytest.fixture
def rf_model(scd_cache, tmp_path):
    path = tmp_path / "m.bin"
    assert run("train", "--in", scd_cache, "--out", path, "--trees", 10)[0] == 0
    return path


class TestExtract:
    def test_pyramid_dim(self, color_corpus, tmp_path):
        code, out, _ = run("extract", "--descriptor", "scd", "--pyramid", "1+4",
                           "--in", color_corpus, "--out", tmp_path / "f.csv", "--workers", 2)
        assert code == 0 and "dim 1280" in out
        t = read_feature_cache(tmp_path / "f.csv")
        assert (len(t), t.dim, t.config) == (60, 1280, "1+4")

    def test_hog(self, tmp_path):
        save_png(tmp_path / "c" / "a" / "x.png", np.zeros((50, 70, 3)))
        code, _, _ = run("extract", "--descriptor", "hog", "--hog-params", "32-16-8",
                         "--resize", "64x48", "--in", tmp_path / "c", "--out", tmp_path / "h.csv")
        assert code == 0
        t = read_feature_cache(tmp_path / "h.csv")
        assert t.config == "32-16-8-9@64x48" and t.dim == 3 * 2 * 16 * 9

    @pytest.mark.parametrize(
        "argv",
        [
            ["extract", "--descriptor", "xyz", "--in", "d", "--out", "f"],
            ["extract", "--descriptor", "scd", "--pyramid", "1+5", "--in", "d", "--out", "f"],
            ["extract", "--descriptor", "scd", "--out", "f"],
            ["frobnicate"],
            [],
            ["train", "--in", "x", "--out", "y", "--classifier", "knn"],
            ["evaluate", "--test", "t.csv"],
        ],
    )
    def test_usage_errors(self, argv):
        assert run(*argv)[0] == 2

    def test_missing_corpus_is_runtime_error(self, tmp_path):
        code, _, err = run("extract", "--descriptor", "scd", "--in", tmp_path / "nope", "--out", tmp_path / "f")
        assert code == 1 and "does not exist" in err

    def test_too_small_listed_on_stderr(self, tmp_path):
        save_png(tmp_path / "c" / "a" / "ok.png", np.zeros((200, 200, 3)))
        save_png(tmp_path / "c" / "a" / "tiny.png", np.zeros((150, 150, 3)))
        code, out, err = run("extract", "--descriptor", "cedd", "--pyramid", "1+4",
                             "--in", tmp_path / "c", "--out", tmp_path / "f.csv", "--workers", 1)
        assert code == 0 and "skipped 1" in out
        assert "tiny.png" in err and "75x75" in err and "ok.png" not in err


class TestPipeline:
    def test_predict_lines(self, rf_model, color_corpus):
        imgs = [color_corpus / "red" / "000.png", color_corpus / "blue" / "005.png"]
        code, out, _ = run("predict", "--model", rf_model, "--image", imgs[0], "--image", imgs[1])
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 2
        for line, img, label in zip(lines, imgs, ("red", "blue")):
            path, got, score = line.rsplit(" ", 2)
            assert path == str(img) and got == label and 0.0 <= float(score) <= 1.0

    def test_predict_small_image_fails(self, tmp_path, color_corpus):
        cache, model = tmp_path / "c.csv", tmp_path / "m.bin"
        run("extract", "--descriptor", "cld", "--pyramid", "16", "--in", color_corpus, "--out", cache)
        run("train", "--in", cache, "--out", model, "--classifier", "svm")
        save_png(tmp_path / "small.png", np.zeros((20, 20, 3)))
        code, _, err = run("predict", "--model", model, "--image", tmp_path / "small.png")
        assert code == 1 and "below" in err

    def test_evaluate_reports_reproducible(self, rf_model, scd_cache, tmp_path):
        for prefix in ("r1", "r2"):
            code, out, _ = run("evaluate", "--model", rf_model, "--test", scd_cache, "--out", tmp_path / prefix)
            assert code == 0 and "weighted" in out
        for ext in ("txt", "json"):
            assert (tmp_path / f"r1.{ext}").read_bytes() == (tmp_path / f"r2.{ext}").read_bytes()
        doc = json.loads((tmp_path / "r1.json").read_text())
        assert doc["summary"]["f1"] == 1.0 and doc["metadata"]["seed"] == 0

    def test_evaluate_train_test_pair(self, scd_cache):
        code, out, _ = run("evaluate", "--train", scd_cache, "--test", scd_cache, "--classifier", "svm")
        assert code == 0 and '"family": "svm_rbf"' in out

    def test_evaluate_schema_mismatch(self, scd_cache, color_corpus, tmp_path):
        other = tmp_path / "cld.csv"
        run("extract", "--descriptor", "cld", "--in", color_corpus, "--out", other)
        assert run("evaluate", "--train", scd_cache, "--test", other)[0] == 1

    def test_cross_validate(self, scd_cache):
        code, out, _ = run("cross-validate", "--in", scd_cache, "--folds", 5, "--trees", 10, "--seed", 5)
        assert code == 0 and "# folds: 5" in out and "# seed: 5" in out

    def test_stats(self, color_corpus, tmp_path):
        save_png(tmp_path / "other" / "red" / "a.png", np.zeros((4, 4, 3)))
        code, out, _ = run("stats", "--in", color_corpus, "--in", tmp_path / "other")
        assert code == 0
        rows = {line.split()[0]: line.split()[1:] for line in out.splitlines()[1:]}
        assert rows["red"] == ["20", "1"] and rows["blue"] == ["20", "0"] and rows["total"] == ["60", "1"]
        code, out, _ = run("stats", "--in", color_corpus, "--json")
        assert json.loads(out)[str(color_corpus)]["total"] == 60

    def test_export(self, scd_cache, tmp_path):
        code, _, _ = run("export", "--in", scd_cache, "--out", tmp_path / "m.tsv")
        assert code == 0
        rows = [line.split("\t") for line in (tmp_path / "m.tsv").read_text().splitlines()]
        t = read_feature_cache(scd_cache)
        assert len(rows) == 60 and all(len(r) == 257 for r in rows)
        assert [r[0] for r in rows] == t.labels
        assert np.array_equal(np.array([[float(v) for v in r[1:]] for r in rows]), t.X)


class TestConfigFile:
    def test_file_values_and_flag_override(self, color_corpus, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"# toy run\ndescriptor = cld\npyramid = 1+4\nin = {color_corpus}\n"
                       f"out = {tmp_path / 'f.csv'}\nworkers = 1\n")
        assert run("extract", "--config", cfg)[0] == 0
        assert read_feature_cache(tmp_path / "f.csv").dim == 60
        assert run("extract", "--config", cfg, "--pyramid", "4")[0] == 0
        assert read_feature_cache(tmp_path / "f.csv").dim == 48

    def test_repeatable_keys(self, color_corpus, tmp_path):
        cfg = tmp_path / "s.cfg"
        save_png(tmp_path / "second" / "red" / "a.png", np.zeros((4, 4, 3)))
        cfg.write_text(f"in = {color_corpus}\nin = {tmp_path / 'second'}\n")
        code, out, _ = run("stats", "--config", cfg)
        assert code == 0 and out.splitlines()[-1].split() == ["total", "60", "1"]

    @pytest.mark.parametrize("text", ["bogus = 1\n", "descriptor = xyz\n", "just words\n", "trees = -3\n"])
    def test_bad_config(self, tmp_path, text):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(text)
        cmd = "train" if "trees" in text else "extract"
        assert run(cmd, "--config", cfg)[0] == 2

    def test_missing_config_file(self, tmp_path):
        assert run("stats", "--config", tmp_path / "none.cfg")[0] == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "phishvis", "extract", "--descriptor", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "unknown descriptor" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "phishvis", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "cross-validate" in proc.stdout
