import logging
import os
import sys

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from Mixtures.f0_checker import CheckResult
from utilities.logging_setup import setup_logging
from utilities.project_info import discover_project_info, project_root, run_metadata
from utilities.report_display import RED, format_number, render_checks, render_key_values, render_table, status


def test_status_tags():
    assert "pass" in status(True)
    assert RED in status(False)
    assert "inconclusive" in status("inconclusive")


def test_format_number():
    assert format_number(None) == "-"
    assert format_number(0.123456789) == "0.123457"
    assert format_number(float("inf")) == "inf"
    assert format_number(7) == "7"


def test_key_values_aligned():
    text = render_key_values("title", {"a": 1.0, "long_key": 2})
    lines = text.splitlines()
    assert lines[1].index("1") == lines[2].index("2")


def test_table_columns():
    text = render_table("t", ("n", "value"), [(10, 0.5), (1000, 0.25)])
    assert text.splitlines()[-1].split() == ["1000", "0.25"]


def test_render_checks_lists_every_check():
    checks = [
        CheckResult(name="bounded", passed=True, estimate=0.1),
        CheckResult(name="moment", passed=False, estimate=3.0),
    ]
    text = render_checks("f0", checks, overall=False)
    assert "bounded" in text
    assert "moment" in text
    assert len(text.splitlines()) == 3


def test_project_info_reads_manifest():
    info = discover_project_info(project_root())
    assert info["name"] == "dpmix-consistency"
    assert "numpy" in info["dependencies"]
    assert info["dependencies"]["pytest"] == "8.4.1"


def test_run_metadata_has_interpreter():
    meta = run_metadata()
    assert meta["python"]
    assert set(meta["installed"]) >= {"numpy", "pydantic"}


def test_setup_logging_writes_named_file(tmp_path):
    logger = setup_logging("DPMixtures.TestRun", log_dir=str(tmp_path))
    logger.info("hello")
    for handler in logger.handlers:
        handler.flush()
    assert (tmp_path / "DPMixtures.TestRun.log").read_text(encoding="utf-8").strip().endswith("hello")
    assert logger.level == logging.DEBUG
