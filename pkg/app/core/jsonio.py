"""
Byte-stable JSON and JSON-lines files.
"""
import json
import os

from rest_framework.utils.encoders import JSONEncoder


def dumps(record):
    """Serialize with sorted keys and fixed separators (numpy values allowed)."""
    return json.dumps(
        record, cls=JSONEncoder, sort_keys=True,
        separators=(',', ':'), ensure_ascii=False, allow_nan=False,
    )


def _parent(path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)


def write_json(path, record):
    _parent(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(dumps(record))
        handle.write('\n')


def write_jsonl(path, records):
    _parent(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for record in records:
            handle.write(dumps(record))
            handle.write('\n')


def read_json(path):
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)


def read_jsonl(path):
    with open(path, encoding='utf-8') as handle:
        return [json.loads(line) for line in handle if line.strip()]
