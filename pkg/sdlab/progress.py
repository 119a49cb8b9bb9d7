# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

import datetime
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar, Union

from . import log as _log
from .terminal import render_backend_state, visible_length

T = TypeVar("T")
R = TypeVar("R")

BAR_FILL = "█"
BAR_EMPTY = "-"


def _normalize_output_interval(value: Optional[Union[str, int]]) -> int:
    """Normalize render intervals to a safe integer >= 1."""

    if value is None:
        return 1
    try:
        normalized = int(str(value).strip())
    except (TypeError, ValueError):
        return 1
    return max(1, normalized)


@lru_cache(maxsize=1)
def _env_progress_output_interval() -> int:
    """Global default for how many steps pass between redraws."""

    return _normalize_output_interval(os.environ.get("SDL_PROGRESS_OUTPUT_INTERVAL", "1"))


class ProgressBar:
    """Single-line progress display for verification sweeps.

    The line is parked on stderr and rewritten with ``\\r``; log records clear
    it first. Nothing is drawn in headless sessions.
    """

    def __init__(self, iterable: Union[Iterable, int], *, output_interval: Optional[int] = None):
        if isinstance(iterable, int):
            iterable = range(iterable)
        self.iterable = iterable
        try:
            self.total = len(iterable)  # type: ignore[arg-type]
        except TypeError:
            self.total = 0

        self.current_iter_step = 0
        self.closed = False
        self.time = time.time()
        self._title = ""
        self._note = ""
        self._output_interval = _normalize_output_interval(
            _env_progress_output_interval() if output_interval is None else output_interval
        )
        self._last_output_step: Optional[int] = None
        self._headless = render_backend_state(stream=sys.stderr).headless

    def title(self, title: str) -> "ProgressBar":
        self._title = title
        return self

    def note(self, text: str) -> "ProgressBar":
        """Set trailing text, typically the running worst margin."""

        self._note = text
        return self

    def __len__(self) -> int:
        return self.total

    def step(self) -> int:
        return self.current_iter_step

    def calc_time(self, iteration: int) -> str:
        """Return elapsed and estimated total time for the progress line."""

        used = int(time.time() - self.time)
        elapsed = str(datetime.timedelta(seconds=used))
        estimate = str(datetime.timedelta(seconds=int((used / max(iteration, 1)) * max(self.total, 1))))
        return f"{elapsed} / {estimate}"

    def render_line(self, columns: int) -> str:
        """Build the progress line for a terminal of ``columns`` cells."""

        total = self.total if self.total else 1
        current = self.current_iter_step
        percent = f"{100.0 * current / total:.1f}"
        left = f"{self._title} " if self._title else ""
        left += f"[{current} of {self.total}] "
        right = f" {self.calc_time(current)} {percent}%"
        if self._note:
            right += f" {self._note}"

        bar_length = 0
        if columns > 0:
            bar_length = max(0, columns - visible_length(left) - visible_length(right) - 1)
        filled = int(bar_length * min(current, total) / total)
        bar = BAR_FILL * filled + BAR_EMPTY * (bar_length - filled)
        return f"{left}{bar}{right}"

    def draw(self, force: bool = False) -> None:
        """Render the current state inline on stderr."""

        if self._headless or self.closed:
            return

        step = self.current_iter_step
        if not force and self._last_output_step is not None:
            if step - self._last_output_step < self._output_interval and step < self.total:
                return
        self._last_output_step = step

        with _log.render_lock():
            state = render_backend_state(stream=sys.stderr)
            line = self.render_line(state.columns - 1 if state.columns else 0)
            sys.stderr.write(f"\r{line}")
            sys.stderr.flush()
            _log.set_progress_line_width(visible_length(line))

    def next(self) -> "ProgressBar":
        self.current_iter_step += 1
        return self

    def __iter__(self):
        try:
            for item in self.iterable:
                self.current_iter_step += 1
                self.draw()
                yield item
        finally:
            self.close()

    def __enter__(self) -> "ProgressBar":
        return self

    def __exit__(self, exc_type, exc_value, traceback) -> None:
        self.close()

    def close(self) -> None:
        """Clear the parked line once the sweep is done."""

        if self.closed:
            return
        self.closed = True
        if self._headless:
            return
        with _log.render_lock():
            _log._clear_progress_line_locked()


@lru_cache(maxsize=1)
def env_workers() -> int:
    """Worker count from ``SDL_THREADS`` (default 1)."""

    raw = os.environ.get("SDL_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sweep(
    fn: Callable[[T], R],
    items: Sequence[T],
    *,
    title: str = "",
    workers: Optional[int] = None,
    margin: Optional[Callable[[R], float]] = None,
) -> List[R]:
    """Map a pure ``fn`` over ``items`` in input order, advancing a progress bar.

    When ``margin`` is given the bar trails the smallest margin seen so far.

    With more than one worker the calls run on a thread pool; numpy and scipy
    kernels release the GIL for most of their time. Results do not depend on
    the worker count.
    """

    items = list(items)
    workers = env_workers() if workers is None else max(1, int(workers))
    pb = ProgressBar(len(items)).title(title)
    results: List[R] = []
    worst = math.inf

    def advance(result: R) -> None:
        nonlocal worst
        results.append(result)
        if margin is not None:
            worst = min(worst, margin(result))
            pb.note(f"worst {worst:.3g}")
        pb.next().draw()

    with pb:
        if workers == 1 or len(items) < 2:
            for item in items:
                advance(fn(item))
            return results

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for result in pool.map(fn, items):
                advance(result)
    return results
