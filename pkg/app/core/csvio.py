"""
RFC 4180 CSV tables with a header row.
"""
import csv
import os


def format_cell(value):
    if isinstance(value, float):
        return f'{value:.6f}'
    return value


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\r\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    return path


def read_csv(path):
    """Rows as dicts keyed by the header."""
    with open(path, encoding='utf-8', newline='') as handle:
        return list(csv.DictReader(handle))
