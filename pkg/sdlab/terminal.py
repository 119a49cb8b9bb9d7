# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

from __future__ import annotations

import os
import re
import shutil
import sys
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

ANSI_ESCAPE_RE = re.compile(r"\x1B\[[0-9;?]*[ -/]*[@-~]")

_DISABLED_VALUES = frozenset({"", "0", "false", "off", "no"})


@dataclass(frozen=True)
class RenderBackendState:
    """Capabilities of the diagnostics stream for one render pass."""

    columns: int
    lines: int
    is_tty: bool
    supports_ansi: bool
    headless: bool = False


@lru_cache(maxsize=8192)
def strip_ansi(text: str) -> str:
    """Remove ANSI control sequences while leaving printable text intact."""

    if "\x1b" not in text:
        return text
    return ANSI_ESCAPE_RE.sub("", text)


@lru_cache(maxsize=4096)
def visible_length(text: str) -> int:
    """Return the rendered cell width of ``text`` (wide glyphs count twice)."""

    width = 0
    for char in strip_ansi(text):
        if unicodedata.combining(char):
            continue
        width += 2 if unicodedata.east_asian_width(char) in ("W", "F") else 1
    return width


def _is_stream_tty(stream: Optional[object]) -> bool:
    """Best-effort check whether ``stream`` is connected to a real terminal."""

    target = stream if stream is not None else sys.stderr
    isatty = getattr(target, "isatty", None)
    if not callable(isatty):
        return False
    try:
        return bool(isatty())
    except Exception:
        return False


def terminal_size(fallback=(80, 24), stream: Optional[object] = None) -> Tuple[int, int]:
    """Get the size of the terminal behind ``stream``.

    A tty is queried through its file descriptor first so that stale
    ``COLUMNS``/``LINES`` values do not win over a resized window. Otherwise
    the environment and then ``shutil.get_terminal_size`` are consulted.
    """

    target = stream if stream is not None else sys.stderr

    if _is_stream_tty(target):
        try:
            size = os.get_terminal_size(target.fileno())
            return (max(0, size.columns or fallback[0]), max(0, size.lines or fallback[1]))
        except (AttributeError, OSError, ValueError):
            pass

    columns = 0
    lines = 0
    try:
        columns = int(os.environ["COLUMNS"])
    except (KeyError, ValueError):
        pass
    try:
        lines = int(os.environ["LINES"])
    except (KeyError, ValueError):
        pass

    if columns <= 0 or lines <= 0:
        try:
            queried = shutil.get_terminal_size(fallback)
            columns = columns if columns > 0 else (queried.columns or fallback[0])
            lines = lines if lines > 0 else (queried.lines or fallback[1])
        except (OSError, ValueError):
            columns = columns if columns > 0 else fallback[0]
            lines = lines if lines > 0 else fallback[1]

    return (max(0, int(columns)), max(0, int(lines)))


# A match on any of these is enough to treat the session as non-interactive.
_HEADLESS_ENV_VARS = frozenset(
    [
        "CI",
        "CI_NAME",
        "BUILD_ID",
        "BUILDKITE",
        "TEAMCITY_VERSION",
        "TF_BUILD",
        "JENKINS_URL",
        "CIRCLECI",
        "TRAVIS",
        "GITHUB_ACTIONS",
        "GITLAB_CI",
        "SLURM_JOB_ID",
        "PBS_JOBID",
        "JPY_PARENT_PID",
        "IPYKERNEL_PARENT_PID",
    ]
)

def _env_flag_enabled(name: str) -> bool:
    """Return True when ``name`` is set to a non-empty, non-disabling value."""

    return os.environ.get(name, "").strip().lower() not in _DISABLED_VALUES


# xdist markers are set before test modules import; cache at import time.
_PYTEST_XDIST_WORKER = bool(os.environ.get("PYTEST_XDIST_WORKER"))


def _running_under_pytest() -> bool:
    """Best-effort detection for pytest-driven sessions."""

    if _PYTEST_XDIST_WORKER:
        return True

    argv0 = str(sys.argv[0]).lower() if sys.argv else ""
    return "PYTEST_CURRENT_TEST" in os.environ or "pytest" in argv0


def _is_headless_environment() -> bool:
    """Detect batch jobs and CI shells where progress redraws are noise.

    Detection is off under pytest so tests can assert on rendered lines.
    ``SDL_FORCE_PROGRESS=1`` or ``SDL_DISABLE_HEADLESS_DETECTION=1`` keep
    rendering enabled.
    """

    if _env_flag_enabled("SDL_FORCE_PROGRESS"):
        return False

    if _env_flag_enabled("SDL_DISABLE_HEADLESS_DETECTION"):
        return False

    if _running_under_pytest():
        return False

    env = os.environ
    if any(name in env for name in _HEADLESS_ENV_VARS):
        return True

    return env.get("TERM", "").strip().lower() == "dumb"


def render_backend_state(
    *,
    stream: Optional[object] = None,
    fallback: Tuple[int, int] = (80, 24),
) -> RenderBackendState:
    """Resolve size and capability flags for the diagnostics stream."""

    target = stream if stream is not None else sys.stderr
    columns, lines = terminal_size(fallback=fallback, stream=target)
    is_tty = _is_stream_tty(target)

    env = os.environ
    force_ansi = any(_env_flag_enabled(name) for name in ("SDL_FORCE_ANSI", "CLICOLOR_FORCE", "FORCE_COLOR"))
    disable_styling = "NO_COLOR" in env or _env_flag_enabled("ANSI_COLORS_DISABLED")
    dumb = env.get("TERM", "").strip().lower() == "dumb"

    supports_ansi = not disable_styling and (force_ansi or (is_tty and not dumb))

    headless = _is_headless_environment()
    if headless and not force_ansi:
        supports_ansi = False

    return RenderBackendState(
        columns=max(0, int(columns)),
        lines=max(0, int(lines)),
        is_tty=is_tty,
        supports_ansi=supports_ansi,
        headless=headless,
    )
