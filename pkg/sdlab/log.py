# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

import logging
import os
import sys
import threading
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence, Union

from .terminal import render_backend_state, terminal_size

# global static/shared logger instance
logger = None

_STATE_LOCK = threading.RLock()
_RENDER_LOCK = threading.RLock()
_HEADLESS_LOG_EMITTED = False

# width of the progress line currently parked on the diagnostics stream
_progress_line_width = 0


def render_lock() -> threading.RLock:
    """Return the lock that serializes writes to the diagnostics stream."""

    return _RENDER_LOCK


def _stream():
    """Resolve stderr at call time so redirections and capture fixtures apply."""

    return sys.stderr


def _write(data: str) -> None:
    stream = _stream()
    stream.write(data)
    flush = getattr(stream, "flush", None)
    if callable(flush):
        flush()


def set_progress_line_width(width: int) -> None:
    """Record the width of a parked progress line (0 when none is shown)."""

    global _progress_line_width
    with _STATE_LOCK:
        _progress_line_width = max(0, int(width))


def _clear_progress_line_locked() -> None:
    """Wipe a parked progress line so a log record starts on a clean row."""

    global _progress_line_width
    if _progress_line_width <= 0:
        return
    _write("\r" + " " * _progress_line_width + "\r")
    _progress_line_width = 0


class LEVEL(str, Enum):
    """Level labels used for output formatting."""

    DEBUG = "DEBUG"
    WARN = "WARN"
    INFO = "INFO"
    ERROR = "ERROR"
    CRITICAL = "CRIT"


LEVEL_MAX_LENGTH = max(len(level.value) for level in LEVEL)

COLORS = {
    "DEBUG": "\033[36m",
    "INFO": "\033[32m",
    "WARN": "\033[33m",
    "ERROR": "\033[31m",
    "CRIT": "\033[35m",
    "RESET": "\033[0m",
}

LEVEL_TO_LOGGING = {
    LEVEL.DEBUG: logging.DEBUG,
    LEVEL.INFO: logging.INFO,
    LEVEL.WARN: logging.WARNING,
    LEVEL.ERROR: logging.ERROR,
    LEVEL.CRITICAL: logging.CRITICAL,
}

LEVEL_NAME_TO_LOGGING = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARN": logging.WARNING,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRIT": logging.CRITICAL,
    "CRITICAL": logging.CRITICAL,
    "FATAL": logging.CRITICAL,
    "NOTSET": logging.NOTSET,
}

LOGGING_TO_LEVEL_LABEL = {
    logging.DEBUG: LEVEL.DEBUG.value,
    logging.INFO: LEVEL.INFO.value,
    logging.WARNING: LEVEL.WARN.value,
    logging.ERROR: LEVEL.ERROR.value,
    logging.CRITICAL: LEVEL.CRITICAL.value,
}


@lru_cache(maxsize=32)
def _level_prefix(level_label: str, supports_ansi: bool) -> str:
    """Build and cache the padded, optionally colored level prefix."""

    padding = " " * max(0, LEVEL_MAX_LENGTH - len(level_label))
    if not supports_ansi:
        return f"{level_label}{padding} "
    color = COLORS.get(level_label, COLORS["RESET"])
    return f"{color}{level_label}{COLORS['RESET']}{padding} "


def normalize_level(level: Union[LEVEL, int, str]) -> int:
    """Normalize enum, string, or numeric levels to stdlib integers."""

    if isinstance(level, LEVEL):
        return LEVEL_TO_LOGGING[level]

    if isinstance(level, bool):
        raise TypeError("Log level must be a LEVEL enum, integer, or string name.")

    if isinstance(level, int):
        return level

    if isinstance(level, str):
        normalized = level.strip().upper()
        if not normalized:
            raise ValueError("Log level must not be empty.")
        if normalized in LEVEL_NAME_TO_LOGGING:
            return LEVEL_NAME_TO_LOGGING[normalized]
        numeric = normalized[1:] if normalized.startswith(("+", "-")) else normalized
        if numeric.isdigit():
            return int(normalized)
        raise ValueError(f"Unknown log level: {level!r}")

    raise TypeError("Log level must be a LEVEL enum, integer, or string name.")


def _env_log_level() -> int:
    """Read ``SDL_LOG_LEVEL``; unparseable values fall back to INFO."""

    raw = os.environ.get("SDL_LOG_LEVEL", "").strip()
    if not raw:
        return logging.INFO
    try:
        return normalize_level(raw)
    except (TypeError, ValueError):
        return logging.INFO


class LabLog(logging.Logger):
    """Logger subclass writing compact level-prefixed lines to stderr."""

    NOTSET = logging.NOTSET
    DEBUG = logging.DEBUG
    INFO = logging.INFO
    WARN = logging.WARNING
    WARNING = logging.WARNING
    ERROR = logging.ERROR
    CRITICAL = logging.CRITICAL

    history_limit = 1000

    class _LevelProxy:
        """Callable level helper that also offers ``.once(...)``."""

        def __init__(self, logger: "LabLog", level: LEVEL):
            self.logger = logger
            self.level = level

        def once(self, msg, *args, **kwargs):
            """Emit the message only if it has not been seen before."""

            if self.logger.history_add((self.level, msg)):
                self(msg, *args, **kwargs)

        def __call__(self, msg, *args, **kwargs):
            self.logger._process(self.level, msg, *args, **kwargs)

    @classmethod
    def shared(cls) -> "LabLog":
        """Return the process-wide shared logger."""

        global logger, _HEADLESS_LOG_EMITTED

        with _STATE_LOCK:
            if logger is None:
                original = logging.getLoggerClass()
                logging.setLoggerClass(LabLog)
                try:
                    created = logging.getLogger("sdlab")
                finally:
                    logging.setLoggerClass(original)
                if not isinstance(created, LabLog):
                    # someone grabbed the name first with a plain Logger
                    created = LabLog("sdlab")
                created.propagate = False
                created.setLevel(_env_log_level())
                logger = created
            shared_logger = logger
            announce = not _HEADLESS_LOG_EMITTED
            _HEADLESS_LOG_EMITTED = True

        if announce and render_backend_state(stream=_stream()).headless:
            shared_logger.info("SDLab: headless/CI mode; progress rendering disabled.")

        return shared_logger

    def __init__(self, name):
        super().__init__(name)
        self.warn = self._LevelProxy(self, LEVEL.WARN)
        self.debug = self._LevelProxy(self, LEVEL.DEBUG)
        self.info = self._LevelProxy(self, LEVEL.INFO)
        self.error = self._LevelProxy(self, LEVEL.ERROR)
        self.critical = self._LevelProxy(self, LEVEL.CRITICAL)
        self.warning = self.warn

        self.history = set()
        self._history_lock = threading.Lock()

    def history_add(self, msg) -> bool:
        """Track deduplicated messages for the ``.once(...)`` helpers."""

        h = hash(msg)
        with self._history_lock:
            if h in self.history:
                return False
            if len(self.history) > self.history_limit:
                self.history.clear()
            self.history.add(h)
        return True

    def setLevel(self, level: Union[LEVEL, int, str]) -> None:
        super().setLevel(normalize_level(level))

    def columns(self, *headers, cols: Optional[Sequence] = None, padding: int = 2):
        """Return a table printer bound to this logger."""

        from .columns import ColumnsPrinter

        header_defs = list(cols) if cols is not None else list(headers)
        return ColumnsPrinter(
            logger=self,
            headers=header_defs,
            padding=padding,
            level_max_length=LEVEL_MAX_LENGTH,
            terminal_size_provider=lambda: terminal_size(stream=_stream()),
        )

    def _level_label(self, level: Union[LEVEL, int, str], normalized_level: int) -> str:
        if isinstance(level, LEVEL):
            return level.value
        return LOGGING_TO_LEVEL_LABEL.get(normalized_level, str(logging.getLevelName(normalized_level)))

    def _format_message(self, msg, args):
        """Format a log message while tolerating surplus positional args."""

        if not args:
            return str(msg)

        if isinstance(msg, str):
            for end in range(len(args), 0, -1):
                try:
                    head = msg % tuple(args[:end])
                except (TypeError, ValueError, KeyError):
                    continue
                rest = [str(arg) for arg in args[end:]]
                return " ".join([head, *rest])

        return " ".join([str(msg), *(str(arg) for arg in args)])

    def _process(self, level: Union[LEVEL, int, str], msg, *args, **kwargs):
        """Shared implementation for all public logging entry points."""

        normalized_level = normalize_level(level)
        if not self.isEnabledFor(normalized_level):
            return

        level_label = self._level_label(level, normalized_level)
        str_msg = self._format_message(msg, args)

        with _RENDER_LOCK:
            stream = _stream()
            state = render_backend_state(stream=stream)
            _clear_progress_line_locked()
            prefix = _level_prefix(level_label, state.supports_ansi)
            _write(f"{prefix}{str_msg}\n")
