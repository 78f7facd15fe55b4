import numpy as np

from spectower.cli import main

FEASIBLE = ["--epsilon", "0.1", "--tau-edge", "1e-6"]


def build_args(out, n="8", family="path", spec="interval 0 1", extra=()):
    return [
        "build", "--family", family, "--spec", spec, "--n", n, "--out", str(out),
        *FEASIBLE, *extra,
    ]


def read_tower_bytes(directory):
    return {
        p.name: p.read_bytes()
        for p in sorted(directory.iterdir())
        if p.suffix in (".json", ".csv")
    }


def test_build_verify_spectrum_happy_path(tmp_path, capsys):
    out = tmp_path / "tower"
    assert main(build_args(out, n="10")) == 0
    assert (out / "manifest.json").is_file()
    assert len(list(out.glob("step_*.csv"))) == 10

    assert main(["verify", str(out)]) == 0
    assert (out / "report.tsv").is_file()
    assert (out / "figures" / "closeness.png").is_file()
    assert (out / "figures" / "residuals.png").is_file()
    assert (out / "figures" / "truncation_spectrum.png").is_file()

    assert main(["spectrum", str(out), "--k", "20"]) == 0
    assert (out / "spectrum.csv").is_file()
    assert (out / "spectrum.png").is_file()
    text = capsys.readouterr().out
    assert "PASS" in text


def test_verify_no_figures(tmp_path):
    out = tmp_path / "tower"
    assert main(build_args(out, n="4")) == 0
    assert main(["verify", str(out), "--no-figures", "--out", str(tmp_path / "rep")]) == 0
    assert (tmp_path / "rep" / "report.tsv").is_file()
    assert not (tmp_path / "rep" / "figures").exists()


def test_build_rejects_finite_spectrum(tmp_path, capsys):
    rc = main(build_args(tmp_path / "t", spec="point 3"))
    assert rc == 1
    assert "finite set" in capsys.readouterr().err


def test_build_rejects_bad_parameters(tmp_path, capsys):
    assert main(build_args(tmp_path / "t", n="0")) == 1
    assert "--n" in capsys.readouterr().err
    assert main(["build", "--spec", "lattice 0 1", "--n", "3",
                 "--out", str(tmp_path / "t")]) == 1
    assert "--family or --graph" in capsys.readouterr().err
    assert main(["build", "--family", "path", "--n", "3",
                 "--out", str(tmp_path / "t")]) == 1
    assert main(["build", "--family", "nope", "--spec", "lattice 0 1",
                 "--n", "3", "--out", str(tmp_path / "t")]) == 1


def test_build_construction_failure_writes_partial(tmp_path, capsys):
    out = tmp_path / "partial"
    rc = main([
        "build", "--family", "path", "--spec", "lattice 0 1", "--n", "30",
        "--epsilon", "0.1", "--tau-edge", "1e-3", "--out", str(out),
    ])
    assert rc == 2
    err = capsys.readouterr().err
    assert "step 7 failed" in err
    assert "budget unattainable" in err
    assert len(list(out.glob("step_*.csv"))) == 6
    # the partial tower is a consistent 6-step tower and verifies cleanly
    assert main(["verify", str(out), "--no-figures"]) == 0


def test_verify_missing_and_corrupt_towers(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "nowhere")]) == 1

    out = tmp_path / "tower"
    assert main(build_args(out, n="5")) == 0
    csv = out / "step_004.csv"
    lines = csv.read_text().splitlines()
    csv.write_text("\n".join(lines[:-1]) + "\n")
    assert main(["verify", str(out)]) == 1


def test_verify_failing_report_exits_two(tmp_path, capsys):
    out = tmp_path / "tower"
    assert main(build_args(out, n="5")) == 0
    csv = out / "step_004.csv"
    dense = np.array(
        [[float(v) for v in line.split(",")] for line in csv.read_text().splitlines()]
    )
    dense[0, 2] = dense[2, 0] = 0.25  # not a path edge
    csv.write_text("\n".join(",".join(f"{v:.17g}" for v in row) for row in dense) + "\n")
    assert main(["verify", str(out)]) == 2
    err = capsys.readouterr().err
    assert "pattern[4]" in err
    report = (out / "report.tsv").read_text()
    assert "FAIL\tpattern[4]" in report


def test_spectrum_empty_family_distances_within_tol(tmp_path):
    out = tmp_path / "tower"
    assert main(["build", "--family", "empty", "--spec", "lattice 0 1",
                 "--n", "6", "--out", str(out), *FEASIBLE]) == 0
    assert main(["spectrum", str(out), "--k", "6", "--no-figures"]) == 0
    lines = (out / "spectrum.csv").read_text().strip().splitlines()
    assert lines[0] == "n,K,index,eigenvalue,distance_to_set"
    rows = [line.split(",") for line in lines[1:]]
    assert {int(r[0]) for r in rows} == set(range(1, 7))
    assert all(int(r[1]) == 6 for r in rows)
    assert len(rows) == 36
    assert max(float(r[4]) for r in rows) <= 1e-9


def test_spectrum_rejects_small_order(tmp_path, capsys):
    out = tmp_path / "tower"
    assert main(build_args(out, n="5")) == 0
    assert main(["spectrum", str(out), "--k", "3"]) == 1
    assert "--k" in capsys.readouterr().err


def test_determinism_byte_identical_towers(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    argv_extra = ["--seed", "11"]
    assert main(build_args(a, n="9", family="random", extra=argv_extra)) == 0
    assert main(build_args(b, n="9", family="random", extra=argv_extra)) == 0
    assert read_tower_bytes(a) == read_tower_bytes(b)


def test_seed_env_var_overrides_flag(tmp_path, monkeypatch):
    import json

    out = tmp_path / "t"
    monkeypatch.setenv("SPECTRAL_TOWER_SEED", "123")
    assert main(build_args(out, n="3", extra=["--seed", "5"])) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["params"]["seed"] == 123

    monkeypatch.setenv("SPECTRAL_TOWER_SEED", "notanint")
    assert main(build_args(tmp_path / "u", n="3")) == 1


def test_gen_graph_stdout_and_file(tmp_path, capsys):
    assert main(["gen-graph", "--family", "path", "--size", "4"]) == 0
    assert capsys.readouterr().out == "4\n1 2\n2 3\n3 4\n"

    target = tmp_path / "g.txt"
    assert main(["gen-graph", "--family", "random", "--size", "6",
                 "--seed", "7", "--out", str(target)]) == 0
    first = target.read_text()
    assert main(["gen-graph", "--family", "random", "--size", "6",
                 "--seed", "7", "--out", str(target)]) == 0
    assert target.read_text() == first


def test_build_from_graph_file(tmp_path):
    gfile = tmp_path / "g.txt"
    assert main(["gen-graph", "--family", "path", "--size", "5",
                 "--out", str(gfile)]) == 0
    out = tmp_path / "tower"
    assert main(["build", "--graph", str(gfile), "--tail", "path-continue",
                 "--spec", "interval 0 1", "--n", "7", "--out", str(out),
                 *FEASIBLE]) == 0
    assert main(["verify", str(out), "--no-figures"]) == 0


def test_demo_runs_clean(tmp_path, capsys):
    assert main(["demo", "--out", str(tmp_path / "demo")]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert (tmp_path / "demo" / "tower" / "report.tsv").is_file()
    assert (tmp_path / "demo" / "tower" / "spectrum.png").is_file()


def test_usage_error_exit_code():
    assert main(["frobnicate"]) == 1
    assert main([]) == 1
