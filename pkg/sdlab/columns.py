# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Aligned report tables rendered through the shared logger."""

import threading
from functools import wraps
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .terminal import strip_ansi, terminal_size, visible_length


def _fit_visible(text: str, target: int, placeholder: str = "...") -> str:
    """Pad or truncate ``text`` so its rendered width is exactly ``target``."""

    if target <= 0:
        return ""

    current = visible_length(text)
    if current <= target:
        return f"{text}{' ' * (target - current)}"

    plain = strip_ansi(text)
    budget = target - len(placeholder) if target >= len(placeholder) else target
    result: List[str] = []
    width = 0
    for char in plain:
        char_width = visible_length(char)
        if width + char_width > budget:
            break
        result.append(char)
        width += char_width
    if target >= len(placeholder):
        result.append(placeholder)
        width += len(placeholder)
    if width < target:
        result.append(" " * (target - width))
    return "".join(result)


def format_cell(value: Any) -> str:
    """Render report values compactly: floats in %.6g, everything else via str."""

    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, complex):
        return f"{value.real:.4g}{value.imag:+.4g}i"
    return str(value)


def _columns_locked(method):
    """Serialize one printer call through its instance lock."""

    @wraps(method)
    def wrapper(self, *args, **kwargs):
        with self._lock:
            return method(self, *args, **kwargs)

    return wrapper


class ColumnsPrinter:
    """Format rows into bordered, aligned columns using ``LabLog``."""

    class _LevelProxy:
        """Expose level-specific helpers such as ``cols.info.header()``."""

        def __init__(self, printer: "ColumnsPrinter", level: Any) -> None:
            self._printer = printer
            self._level = level

        def __call__(self, *values: Any) -> str:
            """Render and emit a row for the bound logging level."""

            return self._printer._log_values(self._level, values)

        def header(self) -> str:
            """Emit the header row between borders."""

            return self._printer._log_header(self._level)

        def border(self) -> str:
            return self._printer._log_border(self._level)

    def __init__(
        self,
        logger: Any,
        headers: Optional[Sequence[str]] = None,
        *,
        padding: int = 1,
        level_max_length: int = 5,
        terminal_size_provider: Optional[Callable[[], Tuple[int, int]]] = None,
    ) -> None:
        self._logger = logger
        self._padding = max(padding, 0)
        self._labels: List[str] = [str(h) for h in (headers or [])]
        self._widths: List[int] = [visible_length(label) for label in self._labels]
        self._level_max_length = level_max_length
        self._terminal_size = terminal_size_provider or terminal_size
        self._proxies: Dict[Any, ColumnsPrinter._LevelProxy] = {}
        self._lock = threading.RLock()

    @property
    def widths(self) -> List[int]:
        return list(self._widths)

    def _proxy(self, level: str) -> "ColumnsPrinter._LevelProxy":
        from .log import LEVEL

        key = LEVEL(level)
        proxy = self._proxies.get(key)
        if proxy is None:
            proxy = self._LevelProxy(self, key)
            self._proxies[key] = proxy
        return proxy

    @property
    def debug(self) -> "ColumnsPrinter._LevelProxy":
        return self._proxy("DEBUG")

    @property
    def info(self) -> "ColumnsPrinter._LevelProxy":
        return self._proxy("INFO")

    @property
    def warn(self) -> "ColumnsPrinter._LevelProxy":
        return self._proxy("WARN")

    @property
    def error(self) -> "ColumnsPrinter._LevelProxy":
        return self._proxy("ERROR")

    def _row_budget(self) -> int:
        """Width available for a row after the level prefix, 0 when unbounded."""

        columns, _ = self._terminal_size()
        if columns <= 0:
            return 0
        return max(0, columns - self._level_max_length - 1)

    def _grow(self, values: Sequence[str]) -> None:
        while len(self._widths) < len(values):
            self._widths.append(0)
        for idx, value in enumerate(values):
            self._widths[idx] = max(self._widths[idx], visible_length(value))
        self._clamp()

    def _clamp(self) -> None:
        """Shrink the widest column until a full row fits the terminal."""

        budget = self._row_budget()
        if budget <= 0 or not self._widths:
            return
        overhead = len(self._widths) * (2 * self._padding + 1) + 1
        while sum(self._widths) + overhead > budget:
            widest = max(range(len(self._widths)), key=lambda i: self._widths[i])
            if self._widths[widest] <= 4:
                break
            self._widths[widest] -= 1

    def _render(self, values: Sequence[str]) -> str:
        pad = " " * self._padding
        cells = []
        for idx, width in enumerate(self._widths):
            text = values[idx] if idx < len(values) else ""
            cells.append(f"{pad}{_fit_visible(text, width)}{pad}")
        return "|" + "|".join(cells) + "|"

    def _render_border(self) -> str:
        segments = ["-" * (max(1, width) + 2 * self._padding) for width in self._widths]
        return "+" + "+".join(segments) + "+"

    @_columns_locked
    def _log_border(self, level: Any) -> str:
        border = self._render_border()
        self._logger._process(level, border)
        return border

    @_columns_locked
    def _log_header(self, level: Any) -> str:
        self._grow(self._labels)
        header = self._render(self._labels)
        self._logger._process(level, self._render_border())
        self._logger._process(level, header)
        self._logger._process(level, self._render_border())
        return header

    @_columns_locked
    def _log_values(self, level: Any, values: Iterable[Any]) -> str:
        cells = [format_cell(value) for value in values]
        self._grow(cells)
        row = self._render(cells)
        self._logger._process(level, row)
        return row
