import json
from fractions import Fraction

import pytest

from rigidmetrics.cli import main
from rigidmetrics.metric import FiniteMetric, dump_metric, load_metric


@pytest.fixture
def metric_file(tmp_path):
    m = FiniteMetric.from_entries(
        ["a", "b", "c"],
        [[0, 1, 1], [1, 0, 1], [1, 1, 0]],
    )
    path = tmp_path / "m.json"
    path.write_text(dump_metric(m))
    return path


def test_dist_zero(metric_file, capsys):
    assert main(["dist", str(metric_file), str(metric_file)]) == 0
    assert capsys.readouterr().out.strip() == "0/1"


def test_verify_exit_codes(metric_file, capsys):
    assert main(["verify", "--metric", str(metric_file), "--check", "metric"]) == 0
    assert main(["verify", "--metric", str(metric_file), "--check", "sr"]) == 1
    out = capsys.readouterr().out
    assert '"verdict":"fail"' in out


def test_rigidify_round_trip(metric_file, tmp_path, capsys):
    out_path = tmp_path / "r.json"
    assert main(["rigidify", str(metric_file), "--epsilon", "1", "--out", str(out_path)]) == 0
    again = load_metric(out_path.read_text())
    assert main(["verify", "--metric", str(out_path), "--check", "sr"]) == 0
    assert main(["verify", "--metric", str(out_path), "--check", "strict"]) == 0
    capsys.readouterr()


def test_rigidify_determinism(metric_file, tmp_path):
    p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
    main(["--seed", "5", "rigidify", str(metric_file), "--epsilon", "1/2", "--out", str(p1)])
    main(["--seed", "5", "rigidify", str(metric_file), "--epsilon", "1/2", "--out", str(p2)])
    assert p1.read_bytes() == p2.read_bytes()
    p3 = tmp_path / "r3.json"
    main(["--seed", "6", "rigidify", str(metric_file), "--epsilon", "1/2", "--out", str(p3)])
    assert p1.read_bytes() != p3.read_bytes()


def test_rigidify_full_and_indep(metric_file, tmp_path, capsys):
    out_path = tmp_path / "f.json"
    cert_path = tmp_path / "f.cert.json"
    code = main([
        "rigidify", str(metric_file), "--epsilon", "1/2", "--full",
        "--out", str(out_path), "--certificate", str(cert_path),
    ])
    assert code == 0
    assert main(["verify", "--metric", str(out_path), "--check", "sr"]) == 0
    assert main(["indep", str(cert_path)]) == 0
    cert = json.loads(cert_path.read_text())
    assert Fraction(cert["sup_bound"]["achieved_hi"]) <= Fraction(1, 2)
    capsys.readouterr()


def test_cross_process_determinism(metric_file, tmp_path):
    import subprocess
    import sys

    outs = []
    for tag, hashseed in (("a", "1"), ("b", "99")):
        out_path = tmp_path / f"x{tag}.json"
        cert_path = tmp_path / f"x{tag}.cert.json"
        env = {"PYTHONHASHSEED": hashseed, "PATH": "/usr/bin:/bin"}
        subprocess.run(
            [sys.executable, "-m", "rigidmetrics.cli", "--seed", "3",
             "rigidify", str(metric_file), "--epsilon", "1/2", "--full",
             "--out", str(out_path), "--certificate", str(cert_path)],
            check=True,
            env=env,
        )
        outs.append((out_path.read_bytes(), cert_path.read_bytes()))
    assert outs[0] == outs[1]


def test_certificate_json_round_trip_identity(metric_file, tmp_path):
    from rigidmetrics.metric import dumps_canonical

    cert_path = tmp_path / "c.json"
    main(["rigidify", str(metric_file), "--epsilon", "1/2", "--full",
          "--certificate", str(cert_path), "--out", str(tmp_path / "m.json")])
    text = cert_path.read_text()
    assert dumps_canonical(json.loads(text)) == text


def test_certificate_determinism(metric_file, tmp_path):
    paths = []
    for tag in ("1", "2"):
        out_path = tmp_path / f"m{tag}.json"
        cert_path = tmp_path / f"c{tag}.json"
        main(["--seed", "9", "rigidify", str(metric_file), "--epsilon", "1/2",
              "--full", "--out", str(out_path), "--certificate", str(cert_path)])
        paths.append((out_path, cert_path))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()


def test_glue_job(tmp_path, capsys):
    job = {
        "partition": {"blocks": [["a", "b"], ["c"]], "hubs": ["a", "c"]},
        "block_metrics": [
            FiniteMetric.from_entries(["a", "b"], [[0, Fraction(1, 2)], [Fraction(1, 2), 0]]).to_json(),
            FiniteMetric.from_entries(["c"], [[0]]).to_json(),
        ],
        "hub_metric": FiniteMetric.from_entries(["a", "c"], [[0, 2], [2, 0]]).to_json(),
    }
    path = tmp_path / "job.json"
    path.write_text(json.dumps(job))
    assert main(["glue", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    glued = FiniteMetric.from_json(out)
    assert glued.distance("b", "c").rational_value() == Fraction(5, 2)


def test_product_matrix(tmp_path, capsys):
    out_path = tmp_path / "tau.json"
    assert main(["product", "--alphabet", "2", "--length", "2", "--k", "3",
                 "--out", str(out_path)]) == 0
    metric = load_metric(out_path.read_text())
    assert metric.size == 4
    assert main(["verify", "--metric", str(out_path), "--check", "sr"]) == 0
    assert main(["verify", "--metric", str(out_path), "--check", "strict"]) == 0
    capsys.readouterr()


def test_product_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["--seed", "1", "product", "--alphabet", "2", "--length", "2", "--out", str(a)])
    main(["--seed", "1", "product", "--alphabet", "2", "--length", "2", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", "--metric", str(bad), "--check", "metric"]) == 3
    capsys.readouterr()


def test_invariant_violation_exit_code(tmp_path, capsys):
    asym = tmp_path / "asym.json"
    asym.write_text(json.dumps({
        "points": ["a", "b"],
        "matrix": [
            [{"offset": "0/1", "terms": []}, {"offset": "1/1", "terms": []}],
            [{"offset": "2/1", "terms": []}, {"offset": "0/1", "terms": []}],
        ],
    }))
    assert main(["rigidify", str(asym), "--epsilon", "1"]) == 4
    capsys.readouterr()


def test_nonmetric_input_rejected(tmp_path, capsys):
    bad = FiniteMetric.from_entries(
        ["a", "b", "c"],
        [[0, 1, 4], [1, 0, 2], [4, 2, 0]],
    )
    path = tmp_path / "bad.json"
    path.write_text(dump_metric(bad))
    assert main(["rigidify", str(path), "--epsilon", "1"]) == 4
    capsys.readouterr()


def test_approx_flag(metric_file, capsys):
    assert main(["--approx", "rigidify", str(metric_file), "--epsilon", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "approx_matrix" in payload
