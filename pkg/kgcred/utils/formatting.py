"""Text formatting helpers for TSV outputs."""

from typing import Iterable


def format_float(value: float) -> str:
    """Shortest decimal string that parses back to the same float64."""
    return repr(float(value))


def format_row(values: Iterable[object]) -> str:
    """TAB-joined row; floats use the round-trip representation."""
    cells = []
    for value in values:
        if isinstance(value, bool):
            cells.append('true' if value else 'false')
        elif isinstance(value, float):
            cells.append(format_float(value))
        else:
            cells.append(str(value))
    return '\t'.join(cells)
