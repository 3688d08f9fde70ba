"""
Console display of verification reports.
Provides standardized colored formatting for pass/fail checks and result tables.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from typing import Any

# ANSI color codes for display
GREEN = "\033[32m"
RED = "\033[31m"
YELLOW = "\033[33m"
BLUE = "\033[34m"
CYAN = "\033[36m"
BOLD = "\033[1m"
RESET = "\033[0m"

_STATUS = {
    "pass": f"{GREEN}✔ pass{RESET}",
    "fail": f"{RED}✘ fail{RESET}",
    "inconclusive": f"{YELLOW}? inconclusive{RESET}",
}


def status(value: bool | str) -> str:
    """Colored status tag for a boolean or a verdict string."""
    if isinstance(value, bool):
        key = "pass" if value else "fail"
    else:
        key = str(getattr(value, "value", value))
    return _STATUS.get(key, key)


def format_number(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return f"{value:.6g}"
    return str(value)


def heading(text: str) -> str:
    return f"{BOLD}{CYAN}{text}{RESET}"


def render_key_values(title: str, values: Mapping[str, Any]) -> str:
    width = max((len(k) for k in values), default=0)
    lines = [heading(title)]
    lines += [f"  {k.ljust(width)}  {format_number(v)}" for k, v in values.items()]
    return "\n".join(lines)


def render_table(title: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Fixed-width table; numbers use 6 significant digits."""
    cells = [[format_number(v) for v in row] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = [heading(title), "  " + "  ".join(c.rjust(w) for c, w in zip(columns, widths, strict=True))]
    lines += ["  " + "  ".join(v.rjust(w) for v, w in zip(r, widths, strict=True)) for r in cells]
    return "\n".join(lines)


def render_checks(title: str, checks: Iterable[Any], overall: bool) -> str:
    """One line per check object with ``name``, ``passed`` and either ``requirement`` or ``estimate``."""
    lines = [f"{heading(title)}  {status(overall)}"]
    for check in checks:
        if hasattr(check, "requirement"):
            detail = f"{check.requirement}: {format_number(check.value)} vs {format_number(check.threshold)}"
        else:
            detail = f"estimate {format_number(check.estimate)}"
            if getattr(check, "stderr", 0.0):
                detail += f" ± {format_number(check.stderr)}"
            if getattr(check, "detail", ""):
                detail += f" ({check.detail})"
        lines.append(f"  {status(check.passed)}  {BLUE}{check.name}{RESET}  {detail}")
    return "\n".join(lines)


def render_tail_report(report: Any) -> str:
    lines = [f"{heading(f'Tail conditions (d={report.d}, {report.budget} draws)')}  {status(report.passed)}"]
    for v in report.verdicts:
        slope = "-" if v.fitted_slope is None else f"{v.fitted_slope:.3f} ± {format_number(v.slope_stderr)}"
        lines.append(f"  {status(v.verdict)}  {BLUE}{v.condition}{RESET}  slope {slope}  needs {v.required}")
        if v.note:
            lines.append(f"      {v.note}")
    return "\n".join(lines)


__all__ = [
    "GREEN",
    "RED",
    "YELLOW",
    "BLUE",
    "CYAN",
    "BOLD",
    "RESET",
    "status",
    "format_number",
    "heading",
    "render_key_values",
    "render_table",
    "render_checks",
    "render_tail_report",
]
