import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import random_image
from morphnoise.cli import main
from morphnoise.diagrams import export_csv, render_si, si_diagram
from morphnoise.image import load_pgm, sample_image, save_pgm
from morphnoise.morphology import FilterSpec, apply_filter, center
from morphnoise.noise import NoiseSpec, add_salt_pepper
from morphnoise.optimizer import GAConfig, evolve
from morphnoise.selection import report_to_json, select_filter


@pytest.fixture
def img_path(tmp_path, rng):
    path = tmp_path / "in.pgm"
    path.write_bytes(save_pgm(random_image(rng, (32, 40))))
    return path


@pytest.fixture
def noisy_path(tmp_path):
    path = tmp_path / "noisy.pgm"
    path.write_bytes(save_pgm(add_salt_pepper(sample_image(), NoiseSpec(0.1, 42))))
    return path


def read(path):
    return load_pgm(path.read_bytes())


def test_add_noise(tmp_path, img_path):
    out = tmp_path / "out.pgm"
    assert main(["add-noise", "--p", "0.1", "--seed", "42", str(img_path), str(out)]) == 0
    first = out.read_bytes()
    assert first == save_pgm(add_salt_pepper(read(img_path), NoiseSpec(0.1, 42)))
    assert main(["add-noise", "--p", "0.1", "--seed", "42", str(img_path), str(out)]) == 0
    assert out.read_bytes() == first


def test_add_noise_requires_seed(img_path, tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["add-noise", "--p", "0.1", str(img_path), str(tmp_path / "o.pgm")])
    assert exc.value.code != 0


def test_filter_and_center(tmp_path, img_path):
    out = tmp_path / "f.pgm"
    assert main(["filter", "--spec", "seq:open@1,close@2", "--shape", "disk", str(img_path), str(out)]) == 0
    expected = apply_filter(read(img_path), FilterSpec.parse("seq:open@1,close@2", "disk"))
    assert out.read_bytes() == save_pgm(expected)
    assert main(["center", "--size", "2", "--ascii", str(img_path), str(out)]) == 0
    assert out.read_bytes() == save_pgm(center(read(img_path), 2), ascii=True)


def test_si_render_and_csv(tmp_path, img_path):
    render, csv = tmp_path / "si.pgm", tmp_path / "si.csv"
    args = ["si", "--rmax", "15", "--cumulative", "--render", str(render), "--csv", str(csv), str(img_path)]
    assert main(args) == 0
    d = si_diagram(read(img_path), 15, cumulative=True)
    assert read(render).shape == (256 * 2, 16 * 5)
    assert render.read_bytes() == save_pgm(render_si(d))
    assert csv.read_bytes() == export_csv(d)


def test_si_zoom_stdout(tmp_path, img_path, capsys):
    zoom = tmp_path / "z.pgm"
    assert main(["si", "--render", str(zoom), "--r-crop", "5", "--k-crop", "50", str(img_path)]) == 0
    assert read(zoom).shape == (100, 25)
    assert main(["si", "--rmax", "1", str(img_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# cumulative=false\nr,k,count\n")


def test_measure(tmp_path, rng, capsys):
    a, b, c = (random_image(rng, (12, 12)) for _ in range(3))
    paths = []
    for name, im in zip("abc", (a, b, c)):
        p = tmp_path / f"{name}.pgm"
        p.write_bytes(save_pgm(im))
        paths.append(str(p))
    assert main(["measure", "--rmax", "3", paths[0]]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["m"] == int(a.astype(np.int64).sum()) and len(doc["m_per_r"]) == 4
    assert main(["measure", "--rmax", "3", *paths[:2]]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["m"] == int(np.abs(a.astype(int) - b).sum())
    out = tmp_path / "m.json"
    assert main(["measure", "--rmax", "3", "--out", str(out), *paths]) == 0
    doc = json.loads(out.read_text())
    assert doc["m_scalar"] == doc["m_per_r"][0] and doc["mstar"] >= 0


def test_select_report(tmp_path, noisy_path, capsys):
    report = tmp_path / "report.json"
    args = ["select", "--ft1", "center:2", "--ft2", "center:5", "--rmax", "15", str(noisy_path), "--report", str(report)]
    assert main(args) == 0
    doc = json.loads(report.read_text())
    assert doc["winner"] == 1
    expected = select_filter(read(noisy_path), FilterSpec("center", 2), FilterSpec("center", 5), 15)
    assert report.read_bytes() == report_to_json(expected)
    assert "winner=ft1" in capsys.readouterr().out


def test_select_dump(tmp_path, img_path):
    dump = tmp_path / "dump"
    assert main(["select", "--ft1", "center:1", "--ft2", "asf-co:2", "--rmax", "3", "--dump", str(dump), str(img_path)]) == 0
    assert (dump / "cross.pgm").exists() and (dump / "report.json").exists()


def test_optimize(tmp_path, rng):
    n = add_salt_pepper(sample_image()[:48, :48], NoiseSpec(0.1, 1))
    path = tmp_path / "n.pgm"
    path.write_bytes(save_pgm(n))
    cfg_file = tmp_path / "ga.cfg"
    cfg_file.write_text("population_size=6\ngenerations=3\nmax_stages=2\nmax_se_size=2\nr_max=3\n")
    hist, best = tmp_path / "h.csv", tmp_path / "best.pgm"
    args = ["optimize", "--seed", "9", "--config", str(cfg_file), "--generations", "4",
            "--history", str(hist), "--output", str(best), str(path)]
    assert main(args) == 0
    cfg = GAConfig(population_size=6, generations=4, max_stages=2, max_se_size=2, r_max=3, seed=9)
    genome, history = evolve(n, cfg)
    assert hist.read_bytes() == history.to_csv()
    assert best.read_bytes() == save_pgm(apply_filter(n, genome.to_spec()))


def test_optimize_requires_seed(tmp_path, img_path):
    with pytest.raises(SystemExit):
        main(["optimize", str(img_path)])


def test_reproduce(tmp_path):
    out = tmp_path / "repro"
    assert main(["reproduce", "--seed", "42", "--outdir", str(out), "--rmax", "5", "--levels", "0.1"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["levels"][0]["winner"] == 1
    assert read(out / "original_hist.pgm").shape == (512, 30)
    for name in ("noisy_p10.pgm", "noisy_p10_si.csv", "p10/cross.pgm", "p10/si_n_ft1_zoom.pgm", "p10/report.json"):
        assert (out / name).exists(), name


@pytest.mark.parametrize(
    "argv",
    [
        ["filter", "--spec", "bogus:1", "IN", "OUT"],
        ["filter", "--spec", "center:2", "MISSING", "OUT"],
        ["si", "--r-crop", "99", "--render", "OUT", "IN"],
    ],
)
def test_errors_exit_nonzero(tmp_path, img_path, capsys, argv):
    argv = [str(img_path) if a == "IN" else str(tmp_path / "out.pgm") if a == "OUT" else a for a in argv]
    argv = [str(tmp_path / "nope.pgm") if a == "MISSING" else a for a in argv]
    assert main(argv) == 1
    err = capsys.readouterr().err.strip()
    assert err.startswith("morphnoise: error:") and "\n" not in err


def test_bad_pgm_message(tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5 4 4 255 \x00")
    assert main(["center", "--size", "1", str(bad), str(tmp_path / "o.pgm")]) == 1
    assert "byte offset" in capsys.readouterr().err


def test_dimension_mismatch(tmp_path, capsys):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    a.write_bytes(save_pgm(np.zeros((4, 4), np.uint8)))
    b.write_bytes(save_pgm(np.zeros((4, 5), np.uint8)))
    assert main(["measure", str(a), str(b)]) == 1
    assert "dimension mismatch" in capsys.readouterr().err


def test_unknown_flag():
    with pytest.raises(SystemExit) as exc:
        main(["center", "--bogus"])
    assert exc.value.code == 2


def test_console_entry_point_help():
    out = subprocess.run([sys.executable, "-m", "morphnoise.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "seq:open@1,close@2" in out.stdout
