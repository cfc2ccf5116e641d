"""Unit tests for gplab.core.main module."""

import json
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from gplab.core.constants import (
    EXIT_ASSERTION_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
)
from gplab.core.exceptions import IdentityFailedError, ParseError
from gplab.core.grouplab import bs_realization, elementary
from gplab.core.main import emit, main, render, resolve_element


def _write_json(path: Path, doc: object) -> Path:
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_verify_h5(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["verify", "--suite", "h5", "--n-max", "3"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["suite"] == "h5"
    assert report["l1_stable"] == "1/1"
    assert [row["n"] for row in report["rows"]] == [1, 2, 3]


def test_verify_bs_as_csv(capsys: pytest.CaptureFixture[str]) -> None:
    args = ["verify", "--suite", "bs", "--n-max", "3", "--format", "csv"]
    assert main(args) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("n,translation,word_bound,ball_length")
    assert len(lines) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--suite", "h5", "--n-max", "0"],
        ["verify"],
    ],
)
def test_invalid_configuration_exits_with_2(argv: list[str]) -> None:
    assert main(argv) == EXIT_CONFIG_ERROR


def test_failed_check_exits_with_1(mocker: MockerFixture) -> None:
    mocker.patch(
        "gplab.core.main.h5_report", side_effect=IdentityFailedError("forced failure")
    )
    assert main(["verify", "--suite", "h5"]) == EXIT_ASSERTION_FAILED


def test_flags_override_config_file(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    config = _write_json(tmp_path / "run.json", {"suite": "h5", "n_max": 5})
    assert main(["verify", "--config", str(config), "--n-max", "2"]) == EXIT_OK
    assert len(json.loads(capsys.readouterr().out)["rows"]) == 2


def test_config_file_rejects_unknown_keys(tmp_path: Path) -> None:
    config = _write_json(tmp_path / "run.json", {"suite": "h5", "depth": 3})
    assert main(["verify", "--config", str(config)]) == EXIT_CONFIG_ERROR


def test_out_writes_report_file(tmp_path: Path, mocker: MockerFixture) -> None:
    out = tmp_path / "report.json"
    mock_logger_info = mocker.patch("gplab.core.main.logger.info")
    argv = ["verify", "--suite", "h5", "--n-max", "2", "--out", str(out)]
    assert main(argv) == EXIT_OK
    assert len(json.loads(out.read_text(encoding="utf-8"))["rows"]) == 2
    mock_logger_info.assert_any_call("Report is written: %s", out)


def test_rank_of_finite_set(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    points = {"kind": "finite", "points": ["1/4", "1/2"]}
    doc = _write_json(tmp_path / "set.json", points)
    assert main(["rank", str(doc)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["rank"] == 0
    assert report["final_cardinality"] == 2


def test_rank_of_construction(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    doc = _write_json(tmp_path / "map.json", {"construction": "perturbation", "n": 2})
    assert main(["rank", str(doc)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["rank"] == 2
    assert report["rows"][0]["cardinality"] == "infinite"


@pytest.mark.parametrize(
    "doc",
    [
        {"foo": 1},
        {"construction": "cantor", "n": 0},
        {"kind": "finite"},
        {"points": [["1/2", "1/4"], ["1/4", "1/2"]]},
    ],
)
def test_rank_rejects_bad_documents(tmp_path: Path, doc: dict[str, object]) -> None:
    path = _write_json(tmp_path / "bad.json", doc)
    assert main(["rank", str(path)]) == EXIT_CONFIG_ERROR


def test_rank_of_missing_file(tmp_path: Path) -> None:
    assert main(["rank", str(tmp_path / "missing.json")]) == EXIT_CONFIG_ERROR


def test_distortion_in_baumslag_solitar(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["distortion", "--group", "bs", "--radius", "4"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["element"] == "f"
    assert [row["n"] for row in report["rows"]] == [0, 1, 2, 3, 4]


def test_ball_in_baumslag_solitar(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["ball", "--group", "bs", "--radius", "2"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["size"] == 17
    assert report["rows"][1] == {"radius": 1, "sphere": 4, "ball": 5}


def test_render_csv_flattens_rows() -> None:
    text = render(({"ignored": True}, [{"x": {"y": 1}, "z": [1]}]), "csv")
    assert text == "x.y,z\n1,[1]\n"


def test_render_json_merges_summary() -> None:
    assert json.loads(render(({"a": 1}, [{"b": 2}]), "json")) == {
        "a": 1,
        "rows": [{"b": 2}],
    }


def test_emit_writes_stdout(capsys: pytest.CaptureFixture[str]) -> None:
    emit("text\n", None)
    assert capsys.readouterr().out == "text\n"


def test_resolve_element() -> None:
    f, _ = bs_realization()
    assert resolve_element("bs", "f") == f
    assert resolve_element("h5-full", "e25") == elementary(2, 5)
    assert resolve_element("bs", {"kind": "dyadic", "p": "2^0", "q": "1/1"}) == f


@pytest.mark.parametrize(
    ("group", "element"),
    [("bs", "e12"), ("h5-full", "e52"), ("h5-gamma1", "x")],
)
def test_resolve_element_rejects_unknown_names(group: str, element: str) -> None:
    with pytest.raises(ParseError):
        resolve_element(group, element)
