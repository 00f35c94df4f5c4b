"""Minimal self-contained SVG charts (no fonts or assets referenced)."""
from __future__ import annotations

from xml.sax.saxutils import escape

W, H = 480, 340
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 30, 70
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _frame(title: str, xlabel: str, ylabel: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{(LEFT + W - RIGHT) / 2}" y="{H - 40}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{(TOP + H - BOTTOM) / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {(TOP + H - BOTTOM) / 2})">{escape(ylabel)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{W - LEFT - RIGHT}" height="{H - TOP - BOTTOM}" '
        'fill="none" stroke="black"/>',
    ]


def _legend(labels) -> list[str]:
    out = []
    for i, label in enumerate(labels):
        x = LEFT + 10 + (i % 2) * 200
        y = H - 22 + (i // 2) * 14
        colour = PALETTE[i % len(PALETTE)]
        out.append(f'<rect x="{x}" y="{y - 8}" width="10" height="10" fill="{colour}"/>')
        out.append(f'<text x="{x + 14}" y="{y + 1}" font-size="11">{escape(label)}</text>')
    return out


def line_chart(series, title: str, xlabel: str, ylabel: str, xlim, ylim, dashed=()) -> str:
    """``series`` is a list of (label, xs, ys); labels in ``dashed`` are drawn dashed."""
    (x0, x1), (y0, y1) = xlim, ylim
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    out = _frame(title, xlabel, ylabel)
    for k in range(6):
        xv = x0 + (x1 - x0) * k / 5
        yv = y0 + (y1 - y0) * k / 5
        out.append(f'<text x="{_f(px(xv))}" y="{TOP + ph + 14}" text-anchor="middle" font-size="10">{xv:g}</text>')
        out.append(f'<text x="{LEFT - 4}" y="{_f(py(yv) + 3)}" text-anchor="end" font-size="10">{yv:.2f}</text>')
    for i, (label, xs, ys) in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in zip(xs, ys))
        dash = ' stroke-dasharray="6 4"' if label in dashed else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="2"{dash}/>')
        if label not in dashed:
            out.extend(f'<circle cx="{_f(px(x))}" cy="{_f(py(y))}" r="2.5" fill="{colour}"/>' for x, y in zip(xs, ys))
    out += _legend([s[0] for s in series])
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bar_chart(categories, series, title: str, xlabel: str, ylabel: str) -> str:
    """Grouped bars; ``series`` is a list of (label, values aligned with categories)."""
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM
    top = max([v for _, vals in series for v in vals] + [1e-12]) * 1.1
    out = _frame(title, xlabel, ylabel)
    gw = pw / max(1, len(categories))
    bw = gw * 0.8 / max(1, len(series))
    for k in range(6):
        yv = top * k / 5
        out.append(f'<text x="{LEFT - 4}" y="{_f(TOP + ph - ph * k / 5 + 3)}" text-anchor="end" font-size="10">{yv:.3g}</text>')
    for c, cat in enumerate(categories):
        gx = LEFT + c * gw
        out.append(f'<text x="{_f(gx + gw / 2)}" y="{TOP + ph + 14}" text-anchor="middle" font-size="10">{escape(str(cat))}</text>')
        for s, (_, vals) in enumerate(series):
            h = vals[c] / top * ph
            x = gx + gw * 0.1 + s * bw
            out.append(f'<rect x="{_f(x)}" y="{_f(TOP + ph - h)}" width="{_f(bw)}" height="{_f(h)}" '
                       f'fill="{PALETTE[s % len(PALETTE)]}"/>')
    out += _legend([s[0] for s in series])
    out.append("</svg>")
    return "\n".join(out) + "\n"
