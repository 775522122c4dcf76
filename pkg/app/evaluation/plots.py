"""
Minimal SVG line charts for curves and sweeps.
"""
import os
from xml.sax.saxutils import escape

WIDTH = 480
HEIGHT = 360
MARGIN = 48
COLORS = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#17becf')


def _scale(values, low, high, start, end):
    span = (high - low) or 1.0
    return [start + (v - low) / span * (end - start) for v in values]


def _bounds(values, floor=None, ceiling=None):
    low, high = min(values), max(values)
    if floor is not None:
        low = min(low, floor)
    if ceiling is not None:
        high = max(high, ceiling)
    return low, high


def line_chart(series, title='', xlabel='', ylabel='', y_range=None, marker=None):
    """SVG text for `series`, a list of (label, xs, ys) tuples.

    `marker` draws a dashed vertical line at that x value.
    """
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if not xs_all:
        raise ValueError('nothing to plot')
    if marker is not None:
        xs_all.append(marker)
    x_low, x_high = _bounds(xs_all)
    y_low, y_high = y_range or _bounds(ys_all)
    left, right = MARGIN, WIDTH - MARGIN / 2
    top, bottom = MARGIN / 2, HEIGHT - MARGIN

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{top - 6}" text-anchor="middle">{escape(title)}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">{escape(ylabel)}</text>',
        f'<text x="{left - 4}" y="{bottom}" text-anchor="end" '
        f'font-size="10">{y_low:.2f}</text>',
        f'<text x="{left - 4}" y="{top + 10}" text-anchor="end" '
        f'font-size="10">{y_high:.2f}</text>',
        f'<text x="{left}" y="{bottom + 14}" text-anchor="middle" '
        f'font-size="10">{x_low:.3g}</text>',
        f'<text x="{right}" y="{bottom + 14}" text-anchor="middle" '
        f'font-size="10">{x_high:.3g}</text>',
    ]
    if marker is not None:
        (mx,) = _scale([marker], x_low, x_high, left, right)
        parts.append(
            f'<line x1="{mx:.2f}" y1="{top}" x2="{mx:.2f}" y2="{bottom}" '
            'stroke="gray" stroke-dasharray="4 3"/>'
        )
    for index, (label, xs, ys) in enumerate(series):
        color = COLORS[index % len(COLORS)]
        px = _scale(xs, x_low, x_high, left, right)
        py = _scale(ys, y_low, y_high, bottom, top)
        points = ' '.join(f'{x:.2f},{y:.2f}' for x, y in zip(px, py))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}"/>')
        parts.append(
            f'<text x="{right - 4}" y="{top + 14 * (index + 1)}" text-anchor="end" '
            f'font-size="11" fill="{color}">{escape(label)}</text>'
        )
    parts.append('</svg>')
    return '\n'.join(parts) + '\n'


def write_svg(path, svg):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(svg)
    return path


def pr_chart(reports):
    """Precision-recall curves of several threshold reports."""
    series = [(r.method, r.recall.tolist(), r.precision.tolist()) for r in reports]
    return line_chart(series, 'precision-recall', 'recall', 'precision', y_range=(0.0, 1.0))


def f_chart(report):
    """F-measure against threshold with the chosen threshold marked."""
    series = [(report.method, report.thresholds.tolist(), report.f_measure.tolist())]
    return line_chart(series, f'F-measure ({report.method})', 'threshold', 'F',
                      y_range=(0.0, 1.0), marker=report.tau_star)


def sweep_chart(sweep, calibrated_tau=None):
    """Success rate against the re-id threshold."""
    label = sweep[0].result.label if sweep else ''
    series = [(label, [p.tau for p in sweep], [p.result.metrics.sr for p in sweep])]
    return line_chart(series, 'success rate vs threshold', 'tau', 'SR',
                      y_range=(0.0, 1.0), marker=calibrated_tau)
