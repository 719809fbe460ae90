# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import math
from typing import Any, Iterable, Optional, Tuple

VALID_WIDTHS: Tuple[int, ...] = (1, 2, 4, 8)


class Validators:

    @staticmethod
    def is_positive_int(value: Any) -> bool:
        return isinstance(value, int) and not isinstance(value, bool) and value >= 1

    @staticmethod
    def is_positive_number(value: Any) -> bool:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return False
        return math.isfinite(value) and value > 0

    @staticmethod
    def is_probability(value: Any) -> bool:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return False
        return 0.0 <= value < 1.0

    @staticmethod
    def is_valid_width(width: Any, widths: Iterable[int] = VALID_WIDTHS) -> bool:
        return Validators.is_positive_int(width) and width in tuple(widths)

    @staticmethod
    def is_aligned(start: int, width: int) -> bool:
        return (start - 1) % width == 0

    @staticmethod
    def validate_block(start: Any, width: Any, num_channels: Optional[int] = None) -> Tuple[bool, Optional[str]]:
        if not Validators.is_positive_int(start):
            return False, f"block start must be a positive integer, got {start!r}"
        if not Validators.is_valid_width(width):
            return False, f"block width must be one of {VALID_WIDTHS}, got {width!r}"
        if not Validators.is_aligned(start, width):
            return False, f"block starting at {start} is not aligned to width {width}"
        if num_channels is not None and start + width - 1 > num_channels:
            return False, f"block {start}..{start + width - 1} exceeds {num_channels} channels"
        return True, None
