import json
import subprocess
import sys

import pytest

from orbithom.cli import main
from orbithom.partitions import from_labels, write_partition


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def label_dir(tmp_path):
    d = tmp_path / "parts"
    d.mkdir()
    write_partition(from_labels([0, 0, 1], 2), d / "a.csv")
    write_partition(from_labels([0, 1, 1], 2), d / "b.csv")
    return d


def test_generate_stdout(capsys):
    code, out, _ = run(["generate", "--kind", "G9", "--m-c", "3", "--sigma", "0"], capsys)
    assert code == 0
    assert len(out.splitlines()) == 27


def test_generate_from_config(tmp_path, capsys):
    cfg = tmp_path / "g.cfg"
    cfg.write_text("kind = U2  # two arcs\nsigma = 0.0\nm_c = 4\nseed = 3\n")
    code, out, _ = run(["generate", "--config", cfg], capsys)
    assert code == 0
    assert len(out.splitlines()) == 8


def test_cluster_writes_label_files(tmp_path, capsys):
    code, _, _ = run(["cluster", "-k", "3", "-n", "12", "--m-c", "10", "--out", tmp_path], capsys)
    assert code == 0
    files = sorted(tmp_path.glob("run_*.csv"))
    assert [f.name for f in files[:2]] == ["run_00.csv", "run_01.csv"]
    assert len(files) == 12


def test_cluster_then_homogeneity(tmp_path, capsys):
    run(["cluster", "-k", "4", "-n", "5", "--sigma", "0.02", "--n-init", "5", "--out", tmp_path], capsys)
    code, out, _ = run(["homogeneity", tmp_path], capsys)
    assert code == 0
    assert json.loads(out)["h_star"] == 1.0


def test_homogeneity_csv(label_dir, capsys):
    code, out, _ = run(["homogeneity", label_dir, "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "index,alpha,h,in_best_ball"
    assert len(out.splitlines()) == 3


def test_mean_json_and_exact(label_dir, capsys):
    code, out, _ = run(["mean", label_dir], capsys)
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.5)
    code, out, _ = run(["mean", label_dir, "--exact"], capsys)
    assert code == 0
    assert len(json.loads(out)["minimizers"]) == 1


def test_mean_guard_exit_code(tmp_path, capsys):
    for i in range(6):
        write_partition(from_labels([i % 5, 0, 1, 2, 3, 4], 5), tmp_path / f"p{i}.csv")
    code, _, err = run(["mean", tmp_path, "--exact", "--max-tuples", "1000"], capsys)
    assert code == 1
    assert "guard" in err


def test_missing_file_exit_code(tmp_path, capsys):
    code, _, err = run(["homogeneity", tmp_path / "absent.csv"], capsys)
    assert code == 2
    assert "absent.csv" in err


def test_malformed_partition_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,0\n0.5,0.4\n")
    code, _, err = run(["mean", bad], capsys)
    assert code == 2
    assert "column" in err


def test_bad_data_file(tmp_path, capsys):
    p = tmp_path / "d.csv"
    p.write_text("1,2\nx,3\n")
    code, _, err = run(["cluster", "--data", p, "-n", "2"], capsys)
    assert code == 2
    assert ":2:" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["protocol", "--sweep", "nope"])
    assert exc.value.code == 2


def test_sigma_sweep_needs_values(capsys):
    code, _, err = run(["protocol", "--sweep", "sigma"], capsys)
    assert code == 2
    assert "--values" in err


def test_single_trial_single_run_is_homogeneous(capsys):
    code, out, _ = run(["protocol", "--values", "2,3", "--trials", "1", "-n", "1", "--format", "csv"], capsys)
    assert code == 0
    rows = [line.split(",") for line in out.splitlines() if not line.startswith("#")][1:]
    assert [float(r[2]) for r in rows] == [1.0, 1.0]


def test_protocol_files(tmp_path, capsys):
    code, _, _ = run(["protocol", "--sweep", "sigma", "--values", "0.05,1.0", "--trials", "2", "-n", "4",
                      "--out", tmp_path], capsys)
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["status"] == "ok"
    assert [r["value"] for r in report["rows"]] == [0.05, 1.0]
    assert (tmp_path / "report.svg").read_text().startswith("<svg")
    assert (tmp_path / "report.csv").read_text().startswith("# columns: sweep,value,mean_h_star")


def test_select_files(tmp_path, capsys):
    code, _, _ = run(["select", "--ks", "2..4", "-n", "6", "--m-c", "10", "--out", tmp_path], capsys)
    assert code == 0
    stab = json.loads((tmp_path / "stability.json").read_text())
    assert stab["ks"] == [2, 3, 4]
    assert stab["selected"] in (2, 3, 4)
    sizes = (tmp_path / "cluster_sizes.csv").read_text().splitlines()
    assert len([s for s in sizes if not s.startswith("#")]) == 1 + 4


def test_protocol_on_csv_data(iris_path, capsys):
    code, out, _ = run(["protocol", "--data", iris_path, "--header", "--drop-col", "-1",
                        "--values", "2", "--trials", "2", "-n", "5", "--format", "csv"], capsys)
    assert code == 0
    assert "k,2," in out


def test_csv_identical_across_job_counts(tmp_path):
    outs = []
    for jobs in (1, 2):
        d = tmp_path / f"j{jobs}"
        subprocess.run([sys.executable, "-m", "orbithom.cli", "protocol", "--values", "2..4", "--trials", "3",
                        "-n", "5", "--seed", "7", "--jobs", str(jobs), "--out", str(d)], check=True)
        outs.append((d / "report.csv").read_bytes())
    assert outs[0] == outs[1]


def test_console_script_version():
    res = subprocess.run(["orbithom", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip() == "0.1.0"
