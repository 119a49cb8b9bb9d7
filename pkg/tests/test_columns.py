# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

import io
import re
from contextlib import redirect_stderr

import pytest

from sdlab.columns import ColumnsPrinter, _fit_visible, format_cell
from sdlab.log import LabLog
from sdlab.terminal import visible_length

log = LabLog.shared()

ANSI_RE = re.compile(r"\x1b\[[0-9;]*m")


def _clean(value: str) -> str:
    """Strip ANSI color and carriage-return noise from captured output."""

    return ANSI_RE.sub("", value).replace("\r", "")


def _printer(*headers, columns: int = 0) -> ColumnsPrinter:
    return ColumnsPrinter(log, list(headers), padding=1, terminal_size_provider=lambda: (columns, 24))


def test_columns_grow_with_wider_rows():
    cols = _printer("r", "margin")
    buffer = io.StringIO()
    with redirect_stderr(buffer):
        cols.info.header()
        cols.info(0.3, 1e-3)
        cols.info(0.99, "a much wider cell")

    assert cols.widths == [len("0.99"), len("a much wider cell")]
    lines = [line for line in _clean(buffer.getvalue()).splitlines() if "|" in line]
    assert lines[0].endswith("| r | margin |")
    assert lines[-1].endswith("| 0.99 | a much wider cell |")


def test_header_is_framed_by_borders():
    cols = _printer("theorem", "status")
    buffer = io.StringIO()
    with redirect_stderr(buffer):
        cols.info.header()

    lines = _clean(buffer.getvalue()).splitlines()
    assert len(lines) == 3
    assert lines[0].endswith("+---------+--------+")
    assert lines[2] == lines[0]


def test_columns_ignore_ansi_sequences():
    cols = _printer("name", "status")
    red_fail = "\x1b[31mFAIL\x1b[0m"
    with redirect_stderr(io.StringIO()):
        cols.info.header()
        cols.info("theorem 3", red_fail)

    assert cols.widths[1] == len("status")
    assert cols.widths[1] < len(red_fail)


def test_columns_clamp_wide_rows_to_terminal_width():
    columns = 60
    cols = _printer("r", "min rho", "bound", "margin", "allowance", "radial upper", columns=columns)
    buffer = io.StringIO()
    with redirect_stderr(buffer):
        cols.info.header()
        cols.info("0.99", "0.35335512345678901234", "0.353355", "1.2e-05", "0.0021", "a cell that is far too wide to fit")

    for line in _clean(buffer.getvalue()).splitlines():
        assert len(line) <= columns, f"line exceeds terminal width: {line!r}"


@pytest.mark.parametrize(
    "value, expected",
    [
        (0.125, "0.125"),
        (1.0 / 3.0, "0.333333"),
        (0.5 + 0.25j, "0.5+0.25i"),
        (7, "7"),
        (None, "None"),
    ],
)
def test_format_cell(value, expected):
    assert format_cell(value) == expected


def test_fit_visible_exact_width_for_wide_chars():
    text = "中文测试"
    assert visible_length(_fit_visible(text, 3)) == 3
    assert visible_length(_fit_visible(text, 5)) == 5
    assert _fit_visible(text, 8) == text
    assert visible_length(_fit_visible(text, 10)) == 10


def test_logger_builds_bound_printer():
    cols = log.columns("p", "nodes")
    assert isinstance(cols, ColumnsPrinter)
    assert cols.widths == [1, 5]
