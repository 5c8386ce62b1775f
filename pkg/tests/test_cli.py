from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Tuple

import pytest

from local_moufang.main import main


def _run(capsys: pytest.CaptureFixture[str], argv: List[str]) -> Tuple[int, Dict[str, Any]]:
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out else {}


def _status(report: Dict[str, Any], name: str) -> str:
    return next(c["status"] for c in report["checks"] if c["name"] == name)


def test_report_envelope(capsys: pytest.CaptureFixture[str]) -> None:
    code, report = _run(capsys, ["ring-info", "zmod:5:2"])
    assert code == 0
    assert list(report) == [
        "schema",
        "tool",
        "version",
        "command",
        "input",
        "passed",
        "checks",
        "result",
        "timing_s",
    ]
    assert report["tool"] == "local-moufang"
    assert report["input"] == {"ring": "zmod:5:2"}
    assert report["result"]["size"] == 25
    assert report["result"]["units"] == 20
    names = [c["name"] for c in report["checks"]]
    assert names == sorted(names)


def test_jp_verify_passes(capsys: pytest.CaptureFixture[str]) -> None:
    code, report = _run(capsys, ["jp-verify", "zmod:5:2"])
    assert code == 0
    assert report["passed"]
    assert report["result"]["sizes"] == [25, 25]


def test_negative_control_exits_one(capsys: pytest.CaptureFixture[str]) -> None:
    code, report = _run(capsys, ["jp-verify", "zmod:5:1", "--control", "linear"])
    assert code == 1
    assert not report["passed"]
    assert all("witness" in c for c in report["checks"] if c["status"] == "fail")


def test_bad_ring_spec_exits_two(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["ring-info", "zmod:6:1"]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "ring-info:" in captured.err


def test_ms_group_order(capsys: pytest.CaptureFixture[str]) -> None:
    code, report = _run(capsys, ["ms-group", "zmod:5:1"])
    assert code == 0
    assert report["result"]["order"] == 60
    assert report["result"]["pair_transitive"]


def test_ms_verify_needs_exactly_one_source(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["ms-verify"]) == 2
    assert main(["ms-verify", "zmod:5:1", "--input", "m.json"]) == 2
    capsys.readouterr()


def test_build_then_verify_from_file(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    out = tmp_path / "z7.json"
    code, report = _run(capsys, ["ms-build", "zmod:7:1", "--out", str(out)])
    assert code == 0
    assert report["result"]["points"] == 8
    assert out.exists()

    code, report = _run(capsys, ["ms-verify", "--input", str(out)])
    assert code == 0, [c for c in report["checks"] if c["status"] == "fail"]
    assert report["input"] == {"input": str(out)}
    assert report["result"]["units"] == 6


def test_ms_extract_export_tables(capsys: pytest.CaptureFixture[str]) -> None:
    code, report = _run(capsys, ["ms-extract", "zmod:5:1", "--export-tables"])
    assert code == 0
    result = report["result"]
    assert result["extracted"]
    assert result["tables"]["e"] == "A:1"
    assert result["tables"]["plus"]["zero"] == "A:0"


def test_ms_extract_refuses_z4(capsys: pytest.CaptureFixture[str]) -> None:
    code, report = _run(capsys, ["ms-extract", "zmod:4:1"])
    assert code == 1
    assert report["result"]["extracted"] is False
    assert _status(report, "extraction/j3.units_times_2") == "fail"


def test_roundtrip_z4_fails(capsys: pytest.CaptureFixture[str]) -> None:
    code, report = _run(capsys, ["roundtrip", "zmod:4:1"])
    assert code == 1
    assert _status(report, "pair/chain.plus_unit") == "skip"
    assert _status(report, "moufang/star") == "skip"


def _without_timing(report: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in report.items() if k != "timing_s"}


def test_reports_are_deterministic(capsys: pytest.CaptureFixture[str]) -> None:
    _, first = _run(capsys, ["roundtrip", "zmod:5:1"])
    _, again = _run(capsys, ["roundtrip", "zmod:5:1"])
    assert first["passed"]
    assert _without_timing(first) == _without_timing(again)


def test_seedless_is_echoed(capsys: pytest.CaptureFixture[str]) -> None:
    code, report = _run(capsys, ["ring-info", "zmod:5:1", "--seedless"])
    assert code == 0
    assert report["input"] == {"ring": "zmod:5:1", "seedless": True}
    _, plain = _run(capsys, ["ring-info", "zmod:5:1"])
    assert _without_timing(plain)["checks"] == report["checks"]


def test_workers_do_not_change_checks(capsys: pytest.CaptureFixture[str]) -> None:
    _, serial = _run(capsys, ["ms-verify", "zmod:5:1"])
    _, threaded = _run(capsys, ["ms-verify", "zmod:5:1", "--workers", "2"])
    assert serial["checks"] == threaded["checks"]
