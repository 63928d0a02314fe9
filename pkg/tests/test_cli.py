import json

import numpy as np
import pytest

from kmseg import GrayImage, kmeans, read_image, write_image
from kmseg.cli import EXIT_INPUT, EXIT_OK, EXIT_ORACLE, main


@pytest.fixture
def bimodal(tmp_path):
    path = tmp_path / "bimodal.pgm"
    assert main(["synth", str(path), "--width", "16", "--height", "12",
                 "--region", "3,2,8,6,200", "--region", "0,0,2,2,200"]) == EXIT_OK
    img = read_image(path)
    bg = img.pixels.copy()
    img.pixels[:] = np.where(bg == 200, 200, 50)
    write_image(img, path)
    return path


def test_convert_round_trip(tmp_path, capsys):
    rng = np.random.default_rng(3)
    img = GrayImage(rng.integers(0, 256, size=(5, 7)))
    write_image(img, tmp_path / "img.pgm")
    assert main(["convert", str(tmp_path / "img.pgm"), str(tmp_path / "dataset.txt")]) == 0
    assert main(["convert", str(tmp_path / "dataset.txt"), str(tmp_path / "data.csv")]) == 0
    assert main(["convert", str(tmp_path / "data.csv"), str(tmp_path / "out.pgm")]) == 0
    assert read_image(tmp_path / "out.pgm") == img
    assert "5 x 7" in capsys.readouterr().out


def test_convert_prints_dimensions(tmp_path, capsys):
    (tmp_path / "d.csv").write_bytes(b"1,2\n3,4\n")
    assert main(["convert", str(tmp_path / "d.csv"), str(tmp_path / "d.pgm")]) == 0
    assert "2 x 2" in capsys.readouterr().out


def test_convert_ascii_pgm(tmp_path):
    (tmp_path / "d.txt").write_bytes(b"1 2\n3 4\n")
    assert main(["convert", str(tmp_path / "d.txt"), str(tmp_path / "d.pgm"), "--ascii"]) == 0
    assert (tmp_path / "d.pgm").read_bytes() == b"P2\n2 2\n255\n1 2\n3 4\n"


def test_convert_jagged_csv_fails(tmp_path, capsys):
    (tmp_path / "j.csv").write_bytes(b"1,2\n3\n")
    assert main(["convert", str(tmp_path / "j.csv"), str(tmp_path / "j.pgm")]) == EXIT_INPUT
    assert "line 2" in capsys.readouterr().err
    assert not (tmp_path / "j.pgm").exists()


def test_convert_unknown_extension(tmp_path):
    (tmp_path / "a.dat").write_bytes(b"")
    assert main(["convert", str(tmp_path / "a.dat"), str(tmp_path / "b.csv")]) == EXIT_INPUT


def test_segment_bimodal(bimodal, tmp_path):
    prefix = str(tmp_path / "run")
    assert main(["segment", str(bimodal), "--k", "2", "--out", prefix, "--oracle"]) == EXIT_OK
    report = json.loads((tmp_path / "run_report.json").read_text())
    assert report["centroids"] == [50.0, 200.0]
    assert report["converged"] is True
    assert report["oracle"]["agree"] is True
    img = read_image(bimodal)
    labels = read_image(tmp_path / "run_labels.pgm")
    assert np.array_equal(labels.pixels, (img.pixels == 200).astype(np.int64))
    assert read_image(tmp_path / "run_seg.pgm") == img


def test_segment_default_k_is_five(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "noise.pgm"
    write_image(GrayImage(rng.integers(0, 256, size=(20, 20))), path)
    assert main(["segment", str(path)]) == EXIT_OK
    report = json.loads((tmp_path / "noise_report.json").read_text())
    assert report["k"] == 5 and len(report["centroids"]) == 5


def test_segment_not_converged_still_writes(bimodal, tmp_path):
    rng = np.random.default_rng(4)
    path = tmp_path / "n.pgm"
    write_image(GrayImage(rng.integers(0, 256, size=(30, 30))), path)
    assert main(["segment", str(path), "--max-iters", "1"]) == EXIT_OK
    report = json.loads((tmp_path / "n_report.json").read_text())
    assert report["converged"] is False and report["iterations"] == 1
    assert (tmp_path / "n_seg.pgm").exists()


def test_segment_oracle_mismatch_exit_code(bimodal, tmp_path, monkeypatch):
    real = kmeans.lloyd_oracle

    def broken(*args, **kwargs):
        c, labels, it, conv = real(*args, **kwargs)
        return kmeans.CentroidSet(c.values + 1.0), labels, it, conv

    monkeypatch.setattr(kmeans, "lloyd_oracle", broken)
    assert main(["segment", str(bimodal), "--k", "2", "--oracle"]) == EXIT_ORACLE


def test_segment_rejects_bad_k(bimodal):
    with pytest.raises(SystemExit):
        main(["segment", str(bimodal), "--k", "0"])


def test_segment_then_stats(bimodal, tmp_path, capsys):
    prefix = str(tmp_path / "run")
    main(["segment", str(bimodal), "--k", "2", "--out", prefix])
    capsys.readouterr()
    assert main(["stats", str(bimodal), "--mask", prefix + "_labels.pgm", "--region", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"region_id": 1, "n": 52, "average": 200.0, "std_dev": 0.0,
                   "coeff_var": 0.0, "std_mode": "population"}


def test_stats_textbook(tmp_path, capsys):
    path = tmp_path / "t.pgm"
    write_image(GrayImage([[2, 4, 4, 4, 5, 5, 7, 9]]), path)
    assert main(["stats", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["average"] == 5.0 and doc["std_dev"] == 2.0


def test_stats_constant_and_out_file(tmp_path, capsys):
    path = tmp_path / "c.pgm"
    write_image(GrayImage(np.full((4, 4), 9)), path)
    assert main(["stats", str(path), "--out", str(tmp_path / "s.json")]) == 0
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["std_dev"] == 0 and doc["coeff_var"] == 0
    assert "coeff_var=0.0000" in capsys.readouterr().out


def test_stats_empty_region(bimodal, tmp_path):
    prefix = str(tmp_path / "run")
    main(["segment", str(bimodal), "--k", "2", "--out", prefix])
    assert main(["stats", str(bimodal), "--mask", prefix + "_labels.pgm", "--region", "5"]) == EXIT_INPUT
    assert main(["stats", str(bimodal), "--region", "0"]) == EXIT_INPUT


def write_stats(path, average, std_dev, cv):
    path.write_text(json.dumps({"region_id": "whole-image", "n": 1, "average": average,
                                "std_dev": std_dev, "coeff_var": cv,
                                "std_mode": "population"}))
    return str(path)


def test_compare_paper(tmp_path, capsys):
    left = write_stats(tmp_path / "matlab.json", 86.0916, 92.0758, 106.951)
    right = write_stats(tmp_path / "dotnet.json", 79.2168, 65.3007, 82.433)
    chart = tmp_path / "fig2.csv"
    assert main(["compare", left, right, "--labels", "MATLAB", ".NET", "--chart", "csv",
                 "--chart-out", str(chart), "--out", str(tmp_path / "cmp.json")]) == 0
    assert ".NET has the lower" in capsys.readouterr().out
    assert chart.read_bytes() == (b"statistic,MATLAB,.NET\naverage,86.0916,79.2168\n"
                                  b"std_dev,92.0758,65.3007\ncoeff_var,106.951,82.433\n")
    assert json.loads((tmp_path / "cmp.json").read_text())["verdict"] == "right"


def test_compare_identical(tmp_path, capsys):
    left = write_stats(tmp_path / "a.json", 5.0, 2.0, 40.0)
    right = write_stats(tmp_path / "b.json", 5.0, 2.0, 40.0)
    assert main(["compare", left, right, "--chart", "svg", "--chart-out",
                 str(tmp_path / "c.svg")]) == 0
    assert "verdict: equal" in capsys.readouterr().out
    assert (tmp_path / "c.svg").read_bytes().startswith(b"<svg")


def test_compare_bad_json(tmp_path):
    (tmp_path / "bad.json").write_text("{")
    good = write_stats(tmp_path / "g.json", 1.0, 1.0, 100.0)
    assert main(["compare", str(tmp_path / "bad.json"), good]) == EXIT_INPUT


def test_synth_deterministic(tmp_path):
    args = ["--width", "20", "--height", "10", "--region", "2,2,5,5,180",
            "--noise", "12", "--seed", "9"]
    main(["synth", str(tmp_path / "a.pgm"), *args])
    main(["synth", str(tmp_path / "b.pgm"), *args])
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()


def test_synth_bad_region(tmp_path):
    assert main(["synth", str(tmp_path / "a.pgm"), "--width", "4", "--height", "4",
                 "--region", "3,3,4,4,10"]) == EXIT_INPUT
