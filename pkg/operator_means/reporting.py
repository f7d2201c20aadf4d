"""
Rendering of reports for the management commands: JSON for ``--json``,
plain-text tables otherwise.
"""
import json

import numpy as np


def to_json(data):
    return json.dumps(data, sort_keys=True, indent=2, default=_default)


def _default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def format_value(value, digits=4):
    if value is None:
        return '-'
    if isinstance(value, (list, tuple)):
        return format_matrix(value, digits)
    return f'{value:.{digits}f}'


def format_matrix(rows, digits=4):
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    width = digits + 4
    body = '; '.join(' '.join(f'{x:>{width}.{digits}f}' for x in row) for row in rows)
    return f'[{body}]'


def matrix_lines(label, rows, digits=4):
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    width = digits + 5
    lines = [f'{label}:']
    lines.extend('  ' + ' '.join(f'{x:>{width}.{digits}f}' for x in row) for row in rows)
    return lines


def report_lines(report):
    """Key facts of one InequalityReport, one per line."""
    data = report.to_json()
    lines = [
        f'Inequality: {data["id"]}',
        f'Holds:      {"yes" if data["holds"] else "NO"}',
        f'Gap:        {data["gap"]:.6e}  (tolerance {data["tolerance"]:.1e})',
    ]
    if data['alpha'] is not None:
        lines.append(f'Constant:   {data["alpha"]:.6f}')
    for side in ('lhs', 'rhs'):
        value = data[side]
        if isinstance(value, dict):
            lines.extend(matrix_lines(side.upper(), value['data']))
        else:
            lines.append(f'{side.upper()}:        {value:.10g}')
    for key, value in sorted(data.get('details', {}).items()):
        lines.append(f'{key}: {value}')
    return lines


SUITE_COLUMNS = ('id', 'passed', 'failed', 'rejected', 'worst gap')


def suite_table(suite_report):
    rows = []
    for key, tally in suite_report.results.items():
        worst = '-' if tally.worst_gap is None else f'{tally.worst_gap:.3e}'
        rows.append((key, str(tally.passed), str(tally.failed), str(tally.rejected), worst))
    widths = [max([len(col)] + [len(row[i]) for row in rows]) for i, col in enumerate(SUITE_COLUMNS)]
    lines = ['  '.join(col.ljust(w) for col, w in zip(SUITE_COLUMNS, widths))]
    lines.append('  '.join('-' * w for w in widths))
    lines.extend('  '.join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows)
    return lines


def comparison_lines(comparison):
    mark = '✓' if comparison.ok else '✗'
    if not comparison.asserted:
        mark = '·'
    tolerance = 'reported only' if not comparison.asserted else f'tol {comparison.tolerance:.0e}'
    lines = [
        f'{mark} {comparison.label}: deviation {comparison.deviation:.2e} ({tolerance})',
        f'    printed:  {format_value(comparison.printed)}',
        f'    computed: {format_value(comparison.computed)}',
    ]
    if comparison.note:
        lines.append(f'    note: {comparison.note}')
    return lines
