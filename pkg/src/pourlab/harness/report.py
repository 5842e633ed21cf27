"""Static SVG rendering of the 5x5 majority-label grid.

Pure string construction — no graphics dependency, byte-identical output
for identical inputs. Axes follow the experiment's convention: effort
weight on x, time weight on y (larger w_t toward the top). Cells carry the
three-way outcome coloring: blue for the original task achieved, green for
a novel skill, red for no viable policy.
"""

from __future__ import annotations

from ..errors import UsageError

CELL_W = 124
CELL_H = 66
MARGIN_LEFT = 96
MARGIN_TOP = 56
MARGIN_RIGHT = 30
MARGIN_BOTTOM = 96

CATEGORY_COLORS = {
    "original": "#4878c9",
    "novel": "#58a55c",
    "none": "#d24a43",
}


def _esc(text: str) -> str:
    return (
        str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def render_grid_svg(summary_rows: list[dict]) -> str:
    """Render summary rows (one per grid cell) as a self-contained SVG."""
    if not summary_rows:
        raise UsageError("cannot render an empty summary")
    w_e_values = sorted({float(r["w_e"]) for r in summary_rows})
    w_t_values = sorted({float(r["w_t"]) for r in summary_rows})
    n_cols, n_rows = len(w_e_values), len(w_t_values)
    col_of = {v: i for i, v in enumerate(w_e_values)}
    # Larger time weight at the top.
    row_of = {v: n_rows - 1 - i for i, v in enumerate(w_t_values)}

    width = MARGIN_LEFT + n_cols * CELL_W + MARGIN_RIGHT
    height = MARGIN_TOP + n_rows * CELL_H + MARGIN_BOTTOM

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:g}" y="28" font-family="sans-serif" font-size="17" '
        f'text-anchor="middle" fill="#222222">Majority behavior per reward-weight '
        f'cell</text>',
    ]

    for row in sorted(summary_rows, key=lambda r: int(r["config_index"])):
        col = col_of[float(row["w_e"])]
        grid_row = row_of[float(row["w_t"])]
        x = MARGIN_LEFT + col * CELL_W
        y = MARGIN_TOP + grid_row * CELL_H
        color = CATEGORY_COLORS[str(row["category"])]
        majority = str(row["majority_label"])
        majority_count = int(row.get(majority, 0))
        n_evals = int(row["n_evals"])
        parts.append(
            f'<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" '
            f'fill="{color}" stroke="#ffffff" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{x + CELL_W / 2:g}" y="{y + CELL_H / 2 - 4:g}" '
            f'font-family="sans-serif" font-size="14" font-weight="bold" '
            f'text-anchor="middle" fill="#ffffff">{_esc(majority)}</text>'
        )
        parts.append(
            f'<text x="{x + CELL_W / 2:g}" y="{y + CELL_H / 2 + 16:g}" '
            f'font-family="sans-serif" font-size="11" text-anchor="middle" '
            f'fill="#ffffff">{majority_count} of {n_evals}</text>'
        )

    # Axis tick labels.
    for v, col in col_of.items():
        x = MARGIN_LEFT + col * CELL_W + CELL_W / 2
        y = MARGIN_TOP + n_rows * CELL_H + 22
        parts.append(
            f'<text x="{x:g}" y="{y:g}" font-family="sans-serif" font-size="13" '
            f'text-anchor="middle" fill="#222222">{v:g}</text>'
        )
    for v, grid_row in row_of.items():
        x = MARGIN_LEFT - 12
        y = MARGIN_TOP + grid_row * CELL_H + CELL_H / 2 + 5
        parts.append(
            f'<text x="{x:g}" y="{y:g}" font-family="sans-serif" font-size="13" '
            f'text-anchor="end" fill="#222222">{v:g}</text>'
        )

    # Axis titles.
    axis_y = MARGIN_TOP + n_rows * CELL_H + 48
    parts.append(
        f'<text x="{MARGIN_LEFT + n_cols * CELL_W / 2:g}" y="{axis_y}" '
        f'font-family="sans-serif" font-size="14" text-anchor="middle" '
        f'fill="#222222">effort weight w_e</text>'
    )
    mid_y = MARGIN_TOP + n_rows * CELL_H / 2
    parts.append(
        f'<text x="24" y="{mid_y:g}" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle" fill="#222222" '
        f'transform="rotate(-90 24 {mid_y:g})">time weight w_t</text>'
    )

    # Legend.
    legend_y = axis_y + 24
    legend_items = (
        ("original", "original task achieved"),
        ("novel", "novel skill acquired"),
        ("none", "no viable policy"),
    )
    x = MARGIN_LEFT
    for key, text in legend_items:
        parts.append(
            f'<rect x="{x}" y="{legend_y - 11}" width="14" height="14" '
            f'fill="{CATEGORY_COLORS[key]}"/>'
        )
        parts.append(
            f'<text x="{x + 20}" y="{legend_y}" font-family="sans-serif" '
            f'font-size="12" fill="#222222">{_esc(text)}</text>'
        )
        x += 22 + 9 * len(text)

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
