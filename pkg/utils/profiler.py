"""
Performance Profiling Utilities
-------------------------------
Timing decorator and hot-path counters for the expensive searches
(ball enumeration, closures, cancellativity sweeps).
"""
import time
import functools
import logging
from typing import Callable, Any, Dict
from collections import defaultdict

from rich.console import Console
from rich.table import Table

import constants

logger = logging.getLogger('profiler')

# Global performance tracking
_performance_stats: Dict[str, Dict[str, Any]] = defaultdict(lambda: {
    'calls': 0,
    'total_time': 0.0,
    'min_time': float('inf'),
    'max_time': 0.0,
})

# Hot path tracking
_hot_paths: Dict[str, int] = defaultdict(int)


def profile(func: Callable) -> Callable:
    """
    Decorator recording call count and wall time of a function.

    Does nothing unless ``profiling.enabled`` is set in config.yaml.

    Usage:
        @profile
        def enumerate_ball(p, radius, window):
            ...
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        if not constants.PROFILING_ENABLED:
            return func(*args, **kwargs)

        start_time = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            elapsed = time.perf_counter() - start_time
            func_name = f"{func.__module__}.{func.__name__}"

            stats = _performance_stats[func_name]
            stats['calls'] += 1
            stats['total_time'] += elapsed
            stats['min_time'] = min(stats['min_time'], elapsed)
            stats['max_time'] = max(stats['max_time'], elapsed)
            stats['avg_time'] = stats['total_time'] / stats['calls']

            if elapsed > 1.0:
                logger.debug(f"{func_name} took {elapsed:.2f}s")

    return wrapper


def get_performance_stats() -> Dict[str, Dict[str, Any]]:
    """Get current performance statistics."""
    return dict(_performance_stats)


def performance_table() -> Table:
    """Build a rich table of the collected timings, slowest first."""
    table = Table(title="Performance")
    table.add_column("Function")
    table.add_column("Calls", justify="right")
    table.add_column("Total(s)", justify="right")
    table.add_column("Avg(ms)", justify="right")
    table.add_column("Max(ms)", justify="right")

    ordered = sorted(get_performance_stats().items(), key=lambda item: item[1]['total_time'], reverse=True)
    for func_name, stats in ordered:
        table.add_row(
            func_name,
            str(stats['calls']),
            f"{stats['total_time']:.2f}",
            f"{stats['avg_time'] * 1000:.2f}",
            f"{stats['max_time'] * 1000:.2f}",
        )
    for path_name, count in get_hot_paths().items():
        table.add_row(f"[dim]{path_name}[/dim]", str(count), "", "", "")
    return table


def print_performance_report(console: Console = None):
    """Print the timing table and write a plain copy to the configured file."""
    if not get_performance_stats() and not get_hot_paths():
        logger.info("No performance data collected")
        return

    console = console or Console(stderr=True)
    table = performance_table()
    console.print(table)

    try:
        with open(constants.PROFILING_OUTPUT_FILE, 'w', encoding='utf-8') as f:
            Console(file=f, width=120).print(table)
        logger.info(f"Performance report written to {constants.PROFILING_OUTPUT_FILE}")
    except OSError as e:
        logger.error(f"Could not write performance report: {e}")


def reset_performance_stats():
    """Reset all performance statistics."""
    _performance_stats.clear()
    _hot_paths.clear()


def track_hot_path(path_name: str):
    """Count a pass through a frequently used code path."""
    if not (constants.PROFILING_ENABLED and constants.PROFILING_TRACK_HOT_PATHS):
        return
    _hot_paths[path_name] += 1


def get_hot_paths() -> Dict[str, int]:
    """Get hot path statistics."""
    return dict(sorted(_hot_paths.items(), key=lambda x: x[1], reverse=True))
