"""Single-panel SVG line plots of CSV tables."""
import io
from typing import Dict, Sequence

import matplotlib
from matplotlib.figure import Figure
from matplotlib.lines import Line2D
import numpy as np

from core import ParameterError

FIGSIZE = (6.4, 4.0)

# one colour per column group; columns named x1_k and x2_k form groups 'x1' and 'x2'
PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b']

# fixed salt for element ids and no timestamp, so equal input gives equal bytes
SVG_RC = {'svg.hashsalt': 'bohmflow', 'svg.fonttype': 'none'}
SVG_METADATA = {'Date': None}


def _group(name: str) -> str:
    return name.split('_', 1)[0]


def column_colours(header: Sequence[str]) -> Dict[str, str]:
    """Colour of every data column, shared within a group."""
    groups: Dict[str, str] = {}
    for name in header[1:]:
        groups.setdefault(_group(name), PALETTE[len(groups) % len(PALETTE)])
    return {name: groups[_group(name)] for name in header[1:]}


def render_svg(header: Sequence[str], rows: Sequence[Sequence[float]], title: str = '') -> str:
    """Plot every column against the first one.

    Each data line is drawn in an SVG group with id "column-<name>".

    Args:
        header: Column names; the first is the abscissa
        rows: Numeric rows, each as long as header
        title: Optional caption

    Returns:
        SVG document as a string, identical for identical input

    Raises:
        ParameterError: If the table is empty or ragged
    """
    if len(header) < 2:
        raise ParameterError("a plot needs at least two columns")
    if not rows:
        raise ParameterError("a plot needs at least one data row")
    if any(len(row) != len(header) for row in rows):
        raise ParameterError("every row must have one value per column")
    data = np.asarray(rows, dtype=float)
    colours = column_colours(header)

    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=FIGSIZE)
        ax = fig.add_subplot()
        for col, name in enumerate(header[1:], start=1):
            line, = ax.plot(data[:, 0], data[:, col], color=colours[name], linewidth=1.2)
            line.set_gid(f"column-{name}")

        groups = list(dict.fromkeys(_group(name) for name in header[1:]))
        if len(groups) > 1:
            # proxies, so legend entries carry no column ids
            handles = [Line2D([], [], color=colours[next(n for n in header[1:] if _group(n) == g)], label=g)
                       for g in groups]
            ax.legend(handles=handles, fontsize='small')
            ax.set_ylabel(', '.join(groups))
        else:
            ax.set_ylabel(header[1])
        ax.set_xlabel(header[0])
        if title:
            ax.set_title(title)

        buffer = io.BytesIO()
        fig.savefig(buffer, format='svg', metadata=SVG_METADATA)
    return buffer.getvalue().decode('utf-8')
