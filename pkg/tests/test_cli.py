from __future__ import annotations

import json

import numpy as np
import pytest

from realizer import cli
from realizer.common.errors import ShrinkBudgetError
from realizer.common.instances import InstanceFile, load_instance, load_matrix, load_points, save_instance
from realizer.common.jsonl import write_jsonl
from realizer.core.funcgraph import FuncMap, FuncPair
from realizer.core.realize import DistanceMatrix
from realizer.core.verify import PointConfig, certify, certify_farthest, extract_maps


def _json(capsys) -> dict:
    out = capsys.readouterr().out
    return json.loads(out[: out.rindex("}") + 1])


@pytest.mark.parametrize(
    ("name", "code"),
    [("croft6", 0), ("star5", 0), ("tri3", 0), ("twofix4", 2), ("chain", 0), ("btree2", 0), ("cycle3", 2)],
)
def test_check_exit_codes(fixture_dir, capsys, name, code):
    assert cli.main(["check", str(fixture_dir / f"{name}.json")]) == code
    document = _json(capsys)
    assert document["is_nice"] is (code == 0)


def test_check_reports_fixed_points(tmp_path, capsys):
    path = save_instance(tmp_path / "fixed.json", InstanceFile(n=3, f=(1, 1, 2), g=(3, 3, 1)))
    assert cli.main(["check", str(path)]) == 2
    kinds = {v["kind"] for v in _json(capsys)["violations"]}
    assert "fixed_point" in kinds


def test_witness_writes_a_certified_matrix(fixture_dir, tmp_path, capsys):
    out = tmp_path / "croft6_metric.json"
    assert cli.main(["witness", str(fixture_dir / "croft6.json"), "--out", str(out), "--seed", "7"]) == 0
    matrix = load_matrix(out)
    maps = extract_maps(DistanceMatrix(matrix.d))
    assert maps.nearest.image == (6, 6, 6, 6, 6, 1)
    assert maps.farthest.image == (2, 1, 1, 1, 1, 2)
    document = json.loads(out.read_text())
    assert document["seed"] == "7"
    assert document["diagnostics"]["certified"] is True
    assert "Saved 6x6" in capsys.readouterr().out


def test_witness_of_a_non_nice_pair(fixture_dir, tmp_path, capsys):
    out = tmp_path / "m.json"
    assert cli.main(["witness", str(fixture_dir / "twofix4.json"), "--out", str(out)]) == 2
    assert _json(capsys)["is_nice"] is False
    assert not out.exists()


def test_witness_needs_a_pair(fixture_dir, tmp_path, capsys):
    assert cli.main(["witness", str(fixture_dir / "chain.json"), "--out", str(tmp_path / "m.json")]) == 1
    assert "pair instance" in capsys.readouterr().err


def test_simplex_embedding_then_verify(fixture_dir, tmp_path, capsys):
    out = tmp_path / "tri3_points.json"
    instance = fixture_dir / "tri3.json"
    assert cli.main(["embed", str(instance), "--mode", "simplex", "--out", str(out)]) == 0
    points = load_points(out)
    assert points.k == 2
    assert certify(PointConfig(points.points), FuncPair.of([2, 1, 2], [3, 3, 1])).ok
    capsys.readouterr()

    assert cli.main(["verify", str(out), str(instance)]) == 0
    assert _json(capsys)["ok"] is True


def test_verify_reports_mismatches(fixture_dir, tmp_path, capsys):
    out = tmp_path / "tri3_points.json"
    assert cli.main(["embed", str(fixture_dir / "tri3.json"), "--out", str(out)]) == 0
    other = save_instance(tmp_path / "cycle.json", InstanceFile(n=3, f=(2, 3, 1), g=(3, 1, 2)))
    capsys.readouterr()
    assert cli.main(["verify", str(out), str(other)]) == 2
    assert _json(capsys)["ok"] is False


def test_verify_size_mismatch(fixture_dir, tmp_path):
    out = tmp_path / "tri3_points.json"
    assert cli.main(["embed", str(fixture_dir / "tri3.json"), "--out", str(out)]) == 0
    assert cli.main(["verify", str(out), str(fixture_dir / "croft6.json")]) == 1


def test_spherical_budget_exhaustion(fixture_dir, tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "spherical_embed", lambda p, params, stats: None)
    out = tmp_path / "points.json"
    code = cli.main(["embed", str(fixture_dir / "croft6.json"), "--mode", "spherical", "--k", "12", "--out", str(out)])
    assert code == 3
    assert _json(capsys)["status"] == "budget_exhausted"
    assert not out.exists()


def test_simplex_perturbation_exhaustion(fixture_dir, tmp_path, monkeypatch, capsys):
    def give_up(p):
        raise ShrinkBudgetError("perturbation did not produce distinct distances")

    monkeypatch.setattr(cli, "simplex", give_up)
    code = cli.main(["embed", str(fixture_dir / "croft6.json"), "--mode", "simplex", "--out", str(tmp_path / "p.json")])
    assert code == 3
    assert "distinct distances" in capsys.readouterr().err


def test_spherical_dimension_too_small(fixture_dir, tmp_path, capsys):
    code = cli.main(
        ["embed", str(fixture_dir / "croft6.json"), "--mode", "spherical", "--k", "8", "--out", str(tmp_path / "p.json")]
    )
    assert code == 1
    assert "k >= 9" in capsys.readouterr().err


@pytest.mark.slow
def test_spherical_embedding_of_croft6(fixture_dir, tmp_path):
    out = tmp_path / "croft6_r12.json"
    code = cli.main(
        ["embed", str(fixture_dir / "croft6.json"), "--mode", "spherical", "--k", "12", "--seed", "1", "--out", str(out)]
    )
    assert code == 0
    points = load_points(out)
    assert points.k == 12
    assert cli.main(["verify", str(out), str(fixture_dir / "croft6.json")]) == 0


def test_maxreal(fixture_dir, tmp_path):
    out = tmp_path / "chain_plane.json"
    assert cli.main(["maxreal", str(fixture_dir / "chain.json"), "--out", str(out)]) == 0
    points = load_points(out)
    assert points.k == 2
    assert certify_farthest(PointConfig(points.points), FuncMap((2, 1, 1, 3, 4))).ok


def test_maxreal_uses_the_farthest_map_of_a_pair(fixture_dir, tmp_path):
    out = tmp_path / "croft6_plane.json"
    assert cli.main(["maxreal", str(fixture_dir / "croft6.json"), "--out", str(out)]) == 0
    points = load_points(out)
    assert certify_farthest(PointConfig(points.points), FuncMap((2, 1, 1, 1, 1, 2))).ok


def test_maxreal_of_a_twenty_level_chain(tmp_path):
    image = (2, 1) + tuple(range(2, 22))
    instance = save_instance(tmp_path / "chain20.json", InstanceFile(n=22, f=image))
    out = tmp_path / "chain20_plane.json"
    assert cli.main(["maxreal", str(instance), "--out", str(out)]) == 0
    assert certify_farthest(PointConfig(load_points(out).points), FuncMap(image)).ok


def test_maxreal_budget_exhaustion(fixture_dir, tmp_path, monkeypatch, capsys):
    def give_up(g, params):
        raise ShrinkBudgetError("components interfere at every eps within the shrink budget")

    monkeypatch.setattr(cli, "max_realize", give_up)
    out = tmp_path / "p.json"
    assert cli.main(["maxreal", str(fixture_dir / "chain.json"), "--out", str(out)]) == 3
    document = _json(capsys)
    assert document["status"] == "budget_exhausted"
    assert document["n"] == 5
    assert not out.exists()


def test_maxreal_rejects_long_cycles(fixture_dir, tmp_path, capsys):
    assert cli.main(["maxreal", str(fixture_dir / "cycle3.json"), "--out", str(tmp_path / "p.json")]) == 2
    assert _json(capsys)["violations"][0]["kind"] == "long_cycle"


@pytest.mark.parametrize(("name", "code", "verdict"), [("tri3", 0, "realizable"), ("twofix4", 2, "not realizable")])
def test_oracle(fixture_dir, capsys, name, code, verdict):
    assert cli.main(["oracle", str(fixture_dir / f"{name}.json")]) == code
    assert capsys.readouterr().out.strip().splitlines()[-1] == verdict


def test_oracle_on_single_maps(fixture_dir, capsys):
    assert cli.main(["oracle", str(fixture_dir / "cycle3.json")]) == 2
    document = _json(capsys)
    assert document == {"realizable": False, "nearest": False, "farthest": False}


def test_oracle_size_limit(fixture_dir, capsys):
    assert cli.main(["oracle", str(fixture_dir / "croft6.json")]) == 1
    assert "n <= 5" in capsys.readouterr().err


def test_bounds(capsys):
    assert cli.main(["bounds", "4"]) == 0
    document = _json(capsys)
    assert document["upper_m"] == pytest.approx(24.1822, rel=1e-5)
    assert document["k"] == 4


def test_family_to_file(tmp_path, fixture_dir, capsys):
    out = tmp_path / "star5.json"
    assert cli.main(["family", "star", "5", "--out", str(out)]) == 0
    written = load_instance(out)
    expected = load_instance(fixture_dir / "star5.json")
    assert (written.f, written.g) == (expected.f, expected.g)
    assert written.metadata == {"family": "star", "param": "5"}


def test_family_to_stdout(capsys):
    assert cli.main(["family", "btree", "2"]) == 0
    assert _json(capsys)["f"] == [8, 1, 1, 2, 2, 3, 3, 1]


def test_family_needs_a_parameter():
    assert cli.main(["family", "star"]) == 1


@pytest.mark.parametrize(
    "argv",
    [[], ["check"], ["family", "wheel"], ["embed", "x.json", "--mode", "cubic", "--out", "y.json"]],
)
def test_usage_errors(argv):
    assert cli.main(argv) == 1


def test_version_exits_cleanly():
    assert cli.main(["--version"]) == 0


def test_missing_and_malformed_files(tmp_path, capsys):
    assert cli.main(["check", str(tmp_path / "missing.json")]) == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert cli.main(["check", str(broken)]) == 1
    assert str(broken) in capsys.readouterr().err


def test_points_file_written_with_full_precision(fixture_dir, tmp_path):
    out = tmp_path / "p.json"
    assert cli.main(["embed", str(fixture_dir / "croft6.json"), "--out", str(out)]) == 0
    coords = np.array(json.loads(out.read_text())["points"])
    assert certify(PointConfig(coords), FuncPair.of([6, 6, 6, 6, 6, 1], [2, 1, 1, 1, 1, 2])).ok


def test_check_runs_a_jsonl_batch(tmp_path, capsys):
    path = tmp_path / "batch.jsonl"
    write_jsonl(path, [{"n": 3, "f": [2, 1, 2], "g": [3, 3, 1]}, {"n": 3, "f": [2, 3, 1], "g": [3, 1, 2]}])
    assert cli.main(["check", str(path)]) == 2
    lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [(line["record"], line["is_nice"]) for line in lines] == [(1, True), (2, False)]


def test_check_batch_locates_a_bad_record(tmp_path, capsys):
    path = tmp_path / "batch.jsonl"
    write_jsonl(path, [{"n": 3, "f": [2, 1, 1]}, {"n": 3, "f": [2, 7, 1]}])
    assert cli.main(["check", str(path)]) == 1
    assert f"{path}:2" in capsys.readouterr().err
