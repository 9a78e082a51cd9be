"""Command-line interface: output format, exit codes, determinism."""

import csv
import json

from equivar.cli import main


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_list_actions_json_lines(capsys):
    status, out, err = run(capsys, "list-actions", "--json")
    assert status == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert [r["action"] for r in records] == [
        "circle_on_circle", "circle_on_sphere", "so3_on_sphere",
        "torus_on_s3"]
    assert err == ""                      # --json silences the summary
    by_name = {r["action"]: r for r in records}
    assert by_name["so3_on_sphere"]["kappa"] == 2
    assert by_name["circle_on_sphere"]["chains"] == ["north_pole",
                                                     "south_pole"]


def test_unknown_action_is_usage_error(capsys):
    status, out, err = run(capsys, "compute-l0", "--action", "nope")
    assert status == 2
    assert out == ""
    assert "unknown action" in err


def test_cutoff_without_singular_stratum_is_usage_error(capsys):
    status, _, err = run(capsys, "cutoff", "--action", "circle_on_circle")
    assert status == 2
    assert "singular stratum" in err


def test_verify_critical_success(capsys):
    status, out, _ = run(capsys, "verify-critical", "--action",
                         "circle_on_circle", "--samples", "10", "--json")
    assert status == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert len(records) == 10
    assert all(r["certified"] for r in records)


def test_resolve_check_reports_chains(capsys):
    status, out, err = run(capsys, "resolve-check", "--action",
                           "circle_on_sphere", "--samples", "30")
    assert status == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert [r["chain"] for r in records] == ["north_pole", "south_pole"]
    assert all(r["passed"] for r in records)
    assert "manifest" in err


def test_resolve_check_unknown_chain(capsys):
    status, _, err = run(capsys, "resolve-check", "--action",
                         "circle_on_sphere", "--chain", "bogus")
    assert status == 2


def test_compute_l0_record(capsys):
    status, out, _ = run(capsys, "compute-l0", "--action", "circle_on_circle",
                         "--amplitude", "bump_A", "--json")
    assert status == 0
    rec = json.loads(out.splitlines()[0])
    assert rec["kappa"] == 1
    assert abs(rec["L0"]["re"] - 2.65518069876777) <= 1e-9


def test_sweep_output_is_deterministic(capsys):
    argv = ("sweep-mu", "--action", "circle_on_circle", "--amplitude",
            "bump_A", "--mu-min", "0.05", "--mu-max", "0.1",
            "--mu-points", "3", "--json")
    _, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    assert out1 == out2


def test_fit_appends_summary_record(capsys):
    status, out, _ = run(capsys, "fit", "--action", "circle_on_circle",
                         "--amplitude", "bump_F", "--mu-min", "0.04",
                         "--mu-max", "0.1", "--mu-points", "4", "--json")
    assert status == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert len(records) == 5
    fit = records[-1]
    assert fit["fit"] is True
    assert abs(fit["kappa_hat"] - 1.0) <= 0.1


def test_csv_export(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    status, _, _ = run(capsys, "sweep-mu", "--action", "circle_on_circle",
                       "--amplitude", "bump_A", "--mu-min", "0.05",
                       "--mu-max", "0.1", "--mu-points", "3", "--json",
                       "--csv", str(path))
    assert status == 0
    raw = path.read_bytes()
    assert b"\r\n" in raw                  # RFC 4180 line endings
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    for row in rows:
        mu = float(row["mu"])
        assert 0.05 <= mu <= 0.1
        # floats carry 17 significant digits (round-trip exact)
        assert float(row["abs_I"]) == float(format(float(row["abs_I"]),
                                                   ".17g"))


def test_mu_range_validation(capsys):
    status, _, err = run(capsys, "sweep-mu", "--action", "circle_on_circle",
                         "--mu-min", "0.1", "--mu-max", "0.05")
    assert status == 2
    assert "mu-min" in err


def test_manifest_on_stderr(capsys):
    status, out, err = run(capsys, "compute-l0", "--action",
                           "circle_on_circle", "--amplitude", "bump_A")
    assert status == 0
    line = next(l for l in err.splitlines() if l.startswith("manifest:"))
    manifest = json.loads(line.split("manifest: ", 1)[1])
    assert manifest["command"] == "compute-l0"
    assert manifest["records"] == 1
    assert len(manifest["output_sha256"]) == 64
