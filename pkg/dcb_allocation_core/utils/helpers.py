# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import math
from typing import Any, Hashable, Sequence, Tuple


class Helpers:

    @staticmethod
    def format_duration(seconds: float) -> str:
        if seconds < 1:
            return f"{seconds * 1000:.0f}ms"
        elif seconds < 60:
            return f"{seconds:.1f}s"
        elif seconds < 3600:
            minutes = int(seconds // 60)
            secs = int(seconds % 60)
            return f"{minutes}m {secs}s"
        else:
            hours = int(seconds // 3600)
            minutes = int((seconds % 3600) // 60)
            return f"{hours}h {minutes}m"

    @staticmethod
    def to_mbps(bits_per_second: float) -> float:
        return bits_per_second / 1e6

    @staticmethod
    def format_float(value: Any) -> str:
        """Fixed six-decimal rendering for CSV cells; other values pass through str()."""
        if isinstance(value, bool) or not isinstance(value, float):
            return str(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.6f}"

    @staticmethod
    def parse_int_list(text: str) -> Tuple[int, ...]:
        return tuple(int(item) for item in text.replace(" ", "").split(",") if item)

    @staticmethod
    def multiset_key(items: Sequence[Hashable]) -> Tuple:
        return tuple(sorted(items))

    @staticmethod
    def relative_difference(value: float, reference: float) -> float:
        if reference == 0:
            return 0.0 if value == 0 else math.inf
        return abs(value - reference) / abs(reference)
