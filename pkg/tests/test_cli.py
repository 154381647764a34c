import json

from orbitforge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_orbits_json(capsys):
    code, out, _ = run(capsys, "orbits", "--n", "4", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["count"] == 15
    assert payload["total_size"] == str(256)


def test_construct_spec_example(capsys):
    code, out, _ = run(
        capsys, "construct", "--n", "320", "--p", "160", "--q", "128", "--r", "32",
        "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["region"] == 1
    assert payload["composition"] == "Matching:75+TwoImp:50+Nand:70"
    assert int(payload["captured"]) > 0


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--n", "50", "--p", "34", "--q", "8", "--r", "8", "--format", "json")
    assert code == 0
    assert 2 in json.loads(out)["regions"]


def test_spectrum_coeff(capsys):
    code, out, _ = run(
        capsys, "spectrum", "--matching", "2", "--coeff", "2,2,0", "--format", "json"
    )
    assert code == 0
    assert json.loads(out)["coeff"] == "4"


def test_assemble_verify_exit_code(capsys):
    code, out, _ = run(capsys, "assemble", "--n", "4", "--verify")
    assert code == 0
    assert "verified 256/256" in out


def test_search_blocks(capsys):
    code, out, _ = run(capsys, "search", "blocks", "--coords", "2", "--parity", "0", "--format", "json")
    assert code == 0
    assert len(json.loads(out)) == 3


def test_search_compose(capsys):
    code, out, _ = run(capsys, "search", "compose", "--n", "8", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert 0 < payload["c"] < 1


def test_export_dimacs(capsys):
    code, out, _ = run(capsys, "export", "dimacs", "--matching", "1")
    assert code == 0
    assert out.startswith("p cnf 4 4")


def test_cover_command(capsys):
    code, out, _ = run(
        capsys, "cover", "--n", "4", "--p", "2", "--q", "2", "--r", "0", "--format", "json"
    )
    assert code in (0, 1)
    payload = json.loads(out)
    assert payload["orbit"] == [2, 2, 0]


def test_estimate_saddle(capsys):
    code, out, _ = run(
        capsys,
        "estimate", "saddle",
        "--n", "512", "--p", "256", "--q", "192", "--r", "64",
        "--matching", "40", "--twoimp", "160", "--nand", "112",
        "--exact", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["relative_error"] < 0.25


def test_optimize_region3(capsys):
    code, out, _ = run(
        capsys, "optimize", "--region", "3", "--grid-step", "0.005", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["observed_max"] <= payload["paper_bound"]


def test_reproducible_output(capsys):
    args = ("certify", "--n", "30", "--policy", "all", "--format", "json")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_usage_error_exit_code(capsys):
    code, _, err = run(capsys, "construct", "--n", "4", "--p", "9", "--q", "0", "--r", "0")
    assert code == 2
    assert "error" in err


def test_output_file(tmp_path, capsys):
    path = tmp_path / "orbits.csv"
    code, _, _ = run(capsys, "orbits", "--n", "3", "--format", "csv", "--output", str(path))
    assert code == 0
    assert path.read_text().startswith("p,q,r,size")
