# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import json
import logging
import shutil
from pathlib import Path
from typing import Any, Optional, Tuple

logger = logging.getLogger(__name__)


class FileOperations:

    @staticmethod
    def read_json(path: Path) -> Tuple[Optional[Any], Optional[Exception]]:
        """Return (data, None) on success or (None, error) for a missing file or bad JSON."""
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
            return data, None
        except (OSError, json.JSONDecodeError) as e:
            logger.debug("cannot read %s: %s", path, e)
            return None, e

    @staticmethod
    def write_text(path: Path, text: str) -> bool:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            temp = path.with_suffix(path.suffix + '.tmp')
            with open(temp, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
            shutil.move(str(temp), str(path))
            return True
        except OSError as e:
            logger.error("cannot write %s: %s", path, e)
            return False
