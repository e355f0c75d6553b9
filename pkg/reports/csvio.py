"""
CSV reports: a ``#`` comment header recording the full configuration,
one header row, data rows and ``# key=value`` footers.

Nothing time- or host-dependent is written, so the same configuration
always renders to the same bytes.
"""
import csv
import io
import math
import os
import tempfile
from pathlib import Path

from django.conf import settings


def format_value(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        return f'{value:.{settings.EMCAP_CSV_DIGITS}g}'
    if isinstance(value, (list, tuple)):
        return ','.join(format_value(item) for item in value)
    if value is None:
        return ''
    if hasattr(value, 'dtype'):
        return format_value(value.item())
    return str(value)


class CsvReport:

    def __init__(self, command, config):
        self.buffer = io.StringIO()
        self.writer = csv.writer(self.buffer, lineterminator='\n')
        self.failures = 0
        self.comment(f'emcap {command}')
        for key in sorted(config):
            self.setting(key, config[key])

    def comment(self, text):
        self.buffer.write(f'# {text}\n')

    def setting(self, key, value):
        self.comment(f'{key}={format_value(value)}')

    def columns(self, *names):
        self.writer.writerow(names)

    def row(self, *values):
        self.writer.writerow([format_value(v) for v in values])

    def render(self):
        return self.buffer.getvalue()


def write_atomic(path, text):
    """Write ``text`` next to ``path`` under a temporary name, then rename it into place."""
    target = Path(path)
    handle = tempfile.NamedTemporaryFile(
        'w', encoding='utf-8', newline='', dir=target.parent, prefix=f'.{target.name}.', delete=False,
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, target)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise
