import json

import pytest

from seqcs.cli import main

PHI31 = {"p": 5, "forms": [[1, 0], [1, 1], [1, 2]]}
REMARK_F7 = {"p": 7, "forms": [[1, 1, 0], [1, 0, 1], [1, 0, 2], [1, 1, 3], [1, 2, 3], [1, 3, 3]]}
REMARK_F23 = {"p": 23, "forms": [[1, 0, 0], [1, 1, 0], [1, 0, 1], [1, 10, 1], [1, 1, 2], [1, 2, 2]]}


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, payload in [("phi31", PHI31), ("rem1", REMARK_F7), ("rem2", REMARK_F23)]:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(payload))
        paths[name] = str(path)
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_analyze_progression(files, capsys):
    code, report = run(capsys, "analyze", files["phi31"])
    assert code == 0
    assert report["translation_invariant"] is True
    assert [entry["s_cs"] for entry in report["complexity"]["per_index"]] == [1, 1, 1]
    assert report["complexity"]["tensor_criterion"]["value"] == 1
    assert report["config"]["command"] == "analyze"


def test_analyze_remark_overall(files, capsys):
    code, report = run(capsys, "analyze", files["rem1"])
    assert code == 0
    assert report["complexity"]["s_cs"] == 2
    assert report["associated_set"] == [[1, 0], [0, 1], [0, 2], [1, 3], [2, 3], [3, 3]]


def test_analyze_malformed_exits_2(files, capsys):
    bad = files["dir"] / "bad.json"
    bad.write_text(json.dumps({"p": 4, "forms": [[1, 0]]}))
    assert main(["analyze", str(bad)]) == 2


def test_analyze_missing_file_exits_2(capsys):
    assert main(["analyze", "/nonexistent/x.json"]) == 2


def test_witness_all_indices(files, capsys):
    code, report = run(capsys, "witness", files["rem1"], "--k", "1", "--max-len", "2")
    assert code == 0
    assert report["all_found"] is True
    lengths = [entry["length"] for entry in report["results"]]
    assert lengths == [1, 1, 1, 1, 1, 2]


def test_witness_none_found_exits_1(files, capsys):
    code, report = run(capsys, "witness", files["rem2"], "--k", "1", "--max-len", "6")
    assert code == 1
    assert report["all_found"] is False


def test_witness_max_len_one_matches_cs(files, capsys):
    code, report = run(capsys, "witness", files["rem1"], "--k", "1", "--max-len", "1", "--at", "5")
    assert code == 1  # index 5 needs length 2 at k=1
    code, report = run(capsys, "witness", files["rem1"], "--k", "2", "--max-len", "1", "--at", "5")
    assert code == 0  # its plain complexity is 2


def test_verify_round_trip_and_mutation(files, capsys, tmp_path):
    code, report = run(capsys, "witness", files["rem1"], "--k", "1", "--at", "5", "--max-len", "2")
    cert = report["results"][0]["certificate"]
    cert_path = tmp_path / "cert.json"
    cert_path.write_text(json.dumps(cert))
    assert main(["verify", str(cert_path), files["rem1"]]) == 0
    capsys.readouterr()

    cert["covers"][1]["parts"][0] = cert["covers"][1]["parts"][0][1:]
    mutated = tmp_path / "mutated.json"
    mutated.write_text(json.dumps(cert))
    code, report = run(capsys, "verify", str(mutated), files["rem1"])
    assert code == 1
    assert report["verdict"]["passed"] is False


def test_phikm_witness_verify_and_bridge(files, capsys, tmp_path):
    sys_path = tmp_path / "phi342.json"
    cert_path = tmp_path / "cert342.json"
    code, report = run(
        capsys,
        "phikm", "--p", "3", "--k", "4", "--M", "2", "--witness", "--verify",
        "--system-out", str(sys_path), "--cert-out", str(cert_path),
    )
    assert code == 0
    assert report["witness"]["length"] == 8
    assert report["witness"]["verified"] is True
    assert report["witness"]["sequence_points"][-1] == [0, 0]
    assert len(report["witness"]["geometric_covers"]) == 8
    # round trip through the verify command
    assert main(["verify", str(cert_path), str(sys_path)]) == 0
    capsys.readouterr()


def test_cover_phikm_origin_lower_bound(files, capsys):
    code, report = run(
        capsys, "cover", "--phikm-origin", "--p", "5", "--k", "6", "--M", "2", "--hyperplanes-only"
    )
    assert code == 0
    assert report["minimum"] == 6
    assert report["verified"] is True
    code, report = run(
        capsys,
        "cover", "--phikm-origin", "--p", "5", "--k", "6", "--M", "2",
        "--hyperplanes-only", "--max-count", "5",
    )
    assert code == 1
    assert report["feasible"] is False


def test_cover_point_file(files, capsys, tmp_path):
    payload = {"p": 3, "M": 2, "points": [[1, 0], [0, 1], [1, 1]], "excluded": [[0, 0]]}
    path = tmp_path / "pts.json"
    path.write_text(json.dumps(payload))
    code, report = run(capsys, "cover", str(path))
    assert code == 0
    assert report["minimum"] >= 1


def test_reduce_with_numeric_check(files, capsys, tmp_path):
    code, report = run(capsys, "witness", files["rem1"], "--k", "1", "--at", "5", "--max-len", "2")
    cert_path = tmp_path / "cert.json"
    cert_path.write_text(json.dumps(report["results"][0]["certificate"]))
    code, report = run(
        capsys,
        "reduce", files["rem1"], "--witness", str(cert_path),
        "--numeric-check", "--trials", "5", "--seed", "3",
    )
    assert code == 0
    assert report["steps"] == 1
    assert report["final_forms"] == 10
    assert report["numeric_max_violation"] <= 1e-9


def test_gvn_command(files, capsys):
    code, report = run(
        capsys,
        "gvn", "--system", files["phi31"], "--at", "0", "--k", "1", "--ell", "1",
        "--trials", "20", "--seed", "5",
    )
    assert code == 0
    assert report["report"]["passed"] is True
    assert report["config"]["seed"] == 5


def test_gvn_at_origin_counterexample(files, capsys, tmp_path):
    sys_path = tmp_path / "phi342.json"
    main(["phikm", "--p", "3", "--k", "4", "--M", "2", "--system-out", str(sys_path), "--out", str(tmp_path / "ignore.json")])
    code, report = run(
        capsys,
        "gvn", "--system", str(sys_path), "--at-origin", "--k", "2", "--ell", "8", "--n", "2",
        "--family", "counterexample", "--phi-k", "4", "--phi-M", "2",
    )
    assert code == 0
    rec = report["report"]["records"][0]
    assert rec["abs_lambda"] == pytest.approx(1.0, abs=1e-12)
    assert rec["norm"] == pytest.approx(1.0, abs=1e-12)


def test_gowers_command(files, capsys, tmp_path):
    from seqcs.analysis import quadratic_table

    table = quadratic_table(5, 1, [[1]])
    fn_path = tmp_path / "f.json"
    fn_path.write_text(json.dumps(table.to_json()))
    code, report = run(capsys, "gowers", str(fn_path), "--k", "2", "--direct")
    assert code == 0
    assert report["norm"] == pytest.approx(5 ** (-0.25), abs=1e-12)
    assert report["difference"] <= 1e-10


def test_reports_are_reproducible(files, capsys):
    code1, rep1 = run(capsys, "gvn", "--system", files["phi31"], "--at", "0", "--k", "1",
                      "--ell", "1", "--trials", "10", "--seed", "9")
    code2, rep2 = run(capsys, "gvn", "--system", files["phi31"], "--at", "0", "--k", "1",
                      "--ell", "1", "--trials", "10", "--seed", "9")
    assert code1 == code2 == 0
    assert rep1 == rep2


def test_out_flag_writes_file(files, capsys, tmp_path):
    out = tmp_path / "report.json"
    code = main(["analyze", files["phi31"], "--out", str(out)])
    assert code == 0
    written = json.loads(out.read_text())
    assert written["p"] == 5
