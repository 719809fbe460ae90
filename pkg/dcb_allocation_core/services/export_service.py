# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO

from dcb_allocation_core.utils.file_ops import FileOperations
from dcb_allocation_core.utils.helpers import Helpers

logger = logging.getLogger(__name__)


class ExportService:
    """Collects CSV tables and writes them to stdout or, atomically, to a file."""

    def __init__(self, output: Optional[Path] = None, stream: Optional[TextIO] = None):
        self.output = Path(output) if output is not None else None
        self.stream = stream
        self._buffer = io.StringIO()
        self._tables = 0

    def add_table(self, header: Sequence[str], rows: Iterable[Sequence]) -> None:
        if self._tables:
            self._buffer.write("\n")
        writer = csv.writer(self._buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([Helpers.format_float(value) for value in row])
        self._tables += 1

    def render(self) -> str:
        return self._buffer.getvalue()

    def flush(self) -> bool:
        text = self.render()
        if self.output is None:
            (self.stream or sys.stdout).write(text)
            return True
        written = FileOperations.write_text(self.output, text)
        if written:
            logger.info("wrote %d table(s) to %s", self._tables, self.output)
        return written

    @staticmethod
    def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> bool:
        export = ExportService(path)
        export.add_table(header, rows)
        return export.flush()

