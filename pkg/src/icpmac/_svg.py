"""Minimal SVG renderer for figure CSVs.

One polyline per (decoder, a, k) series on a log-scaled error-probability
axis, plus dashed overlays for any bound columns present.  Reads the CSV
text it is given; never touches the experiment objects, so emitting a plot
cannot alter the data.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 20, 48
PALETTE = ("#1f6fb4", "#d1495b", "#2e8b57", "#8a5fb0", "#c98a1c", "#4a4a4a")


def _parse_csv(text: str):
    lines = [ln for ln in text.strip().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        rows.append(dict(zip(header, ln.split(","))))
    return rows


def _series_key(row, x_field):
    label = row["decoder"]
    if x_field != "a" and row["a"] not in ("", None):
        label += f" a={row['a']}"
    if row["k"] not in ("", None) and row["k"] != "1":
        label += f" k={row['k']}"
    return label


def render_figure_svg(csv_text: str, x_field: str = "n") -> str:
    rows = _parse_csv(csv_text)
    if not rows:
        raise ValueError("no data rows to plot")

    series: dict[str, list] = {}
    bounds: dict[str, dict] = {}
    for row in rows:
        x = float(row[x_field])
        p = float(row["p_err"])
        series.setdefault(_series_key(row, x_field), []).append((x, p))
        for col, label in (("bound_shannon", "zero-rate bound"), ("bound_prop1", "split-power bound")):
            if row.get(col):
                bounds.setdefault(label, {})[x] = float(row[col])

    xs = [x for pts in series.values() for x, _ in pts]
    ys = [p for pts in series.values() for _, p in pts if p > 0]
    for vals in bounds.values():
        ys.extend(v for v in vals.values() if v > 0)
    if not ys:
        ys = [1e-3]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    y_lo = 10.0 ** math.floor(math.log10(min(ys)))
    y_hi = 1.0

    def sx(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R)

    def sy(p):
        frac = (math.log10(p) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo))
        return HEIGHT - MARGIN_B - frac * (HEIGHT - MARGIN_T - MARGIN_B)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{WIDTH - MARGIN_L - MARGIN_R}" '
        f'height="{HEIGHT - MARGIN_T - MARGIN_B}" fill="none" stroke="#999"/>',
    ]

    decade = int(math.log10(y_lo))
    for e in range(decade, 1):
        p = 10.0**e
        if y_lo <= p <= y_hi:
            yy = sy(p)
            parts.append(
                f'<line x1="{MARGIN_L}" y1="{yy:.1f}" x2="{WIDTH - MARGIN_R}" y2="{yy:.1f}" '
                f'stroke="#ddd"/>'
            )
            parts.append(f'<text x="{MARGIN_L - 6}" y="{yy + 4:.1f}" text-anchor="end">1e{e}</text>')
    for x in sorted({x for x, _ in next(iter(series.values()))} | set(xs)):
        xx = sx(x)
        parts.append(
            f'<text x="{xx:.1f}" y="{HEIGHT - MARGIN_B + 16}" text-anchor="middle">{x:g}</text>'
        )
    parts.append(
        f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2:.0f}" y="{HEIGHT - 10}" '
        f'text-anchor="middle">{x_field}</text>'
    )
    parts.append(
        f'<text x="14" y="{(MARGIN_T + HEIGHT - MARGIN_B) / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(MARGIN_T + HEIGHT - MARGIN_B) / 2:.0f})">error probability</text>'
    )

    legend_y = MARGIN_T + 12
    for i, (label, pts) in enumerate(sorted(series.items())):
        color = PALETTE[i % len(PALETTE)]
        visible = [(x, p) for x, p in sorted(pts) if p > 0]
        if visible:
            coords = " ".join(f"{sx(x):.1f},{sy(p):.1f}" for x, p in visible)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.6"/>'
            )
            for x, p in visible:
                parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(p):.1f}" r="2.4" fill="{color}"/>')
        parts.append(
            f'<text x="{WIDTH - MARGIN_R - 6}" y="{legend_y}" text-anchor="end" '
            f'fill="{color}">{label}</text>'
        )
        legend_y += 14

    for j, (label, vals) in enumerate(sorted(bounds.items())):
        color = PALETTE[(len(series) + j) % len(PALETTE)]
        pts = [(x, p) for x, p in sorted(vals.items()) if p > 0]
        if pts:
            coords = " ".join(f"{sx(x):.1f},{sy(p):.1f}" for x, p in pts)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                f'stroke-width="1.4" stroke-dasharray="6 4"/>'
            )
        parts.append(
            f'<text x="{WIDTH - MARGIN_R - 6}" y="{legend_y}" text-anchor="end" '
            f'fill="{color}">{label} (dashed)</text>'
        )
        legend_y += 14

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
