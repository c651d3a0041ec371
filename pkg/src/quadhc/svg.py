"""Self-contained SVG line charts (no plotting dependency)."""

_COLORS = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def _fmt(v):
    return f"{v:.6g}"


def line_chart(
    series,
    path,
    title="",
    xlabel="",
    ylabel="",
    width=640,
    height=420,
    y_range=None,
):
    """Write a line chart with optional std bands.

    series: list of dicts with keys name, x (list), y (list), and optional
    std (list) drawn as a translucent band around y.
    """
    margin_l, margin_r, margin_t, margin_b = 60, 150, 34, 44
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b
    xs = [x for s in series for x in s["x"]]
    ys = [y for s in series for y in s["y"]]
    if not xs:
        raise ValueError("no data to plot")
    x_lo, x_hi = min(xs), max(xs)
    if y_range is not None:
        y_lo, y_hi = y_range
    else:
        spread = [
            y + d * sgn
            for s in series
            for y, d in zip(s["y"], s.get("std") or [0.0] * len(s["y"]))
            for sgn in (-1, 1)
        ]
        y_lo, y_hi = min(spread), max(spread)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(x):
        return margin_l + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return margin_t + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin_l}" y="{margin_t}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    for i in range(5):
        xv = x_lo + (x_hi - x_lo) * i / 4
        yv = y_lo + (y_hi - y_lo) * i / 4
        parts.append(
            f'<text x="{_fmt(px(xv))}" y="{height - margin_b + 16}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="10">'
            f"{_fmt(xv)}</text>"
        )
        parts.append(
            f'<text x="{margin_l - 6}" y="{_fmt(py(yv) + 3)}" '
            f'text-anchor="end" font-family="sans-serif" font-size="10">'
            f"{_fmt(yv)}</text>"
        )
        parts.append(
            f'<line x1="{margin_l}" y1="{_fmt(py(yv))}" '
            f'x2="{margin_l + plot_w}" y2="{_fmt(py(yv))}" '
            f'stroke="#ddd" stroke-width="0.5"/>'
        )
    if xlabel:
        parts.append(
            f'<text x="{margin_l + plot_w / 2}" y="{height - 8}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">'
            f"{xlabel}</text>"
        )
    if ylabel:
        parts.append(
            f'<text x="14" y="{margin_t + plot_h / 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 14 {margin_t + plot_h / 2})">{ylabel}</text>'
        )
    for idx, s in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        pts = sorted(zip(s["x"], s["y"], s.get("std") or [0.0] * len(s["y"])))
        if s.get("std") is not None:
            upper = [(px(x), py(y + d)) for x, y, d in pts]
            lower = [(px(x), py(y - d)) for x, y, d in reversed(pts)]
            poly = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in upper + lower)
            parts.append(
                f'<polygon points="{poly}" fill="{color}" fill-opacity="0.15" '
                f'stroke="none"/>'
            )
        poly = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y, _ in pts)
        parts.append(
            f'<polyline points="{poly}" fill="none" stroke="{color}" '
            f'stroke-width="1.8"/>'
        )
        for x, y, _ in pts:
            parts.append(
                f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="2.4" '
                f'fill="{color}"/>'
            )
        ly = margin_t + 14 + idx * 16
        lx = width - margin_r + 10
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 24}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{s["name"]}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
