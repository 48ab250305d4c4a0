"""Output formatting shared by the CSV/dump writers."""

import math


def fmt_num(value) -> str:
    """Numbers with 12 significant digits; NaN prints as 'nan'."""
    v = float(value)
    if math.isnan(v):
        return "nan"
    return f"{v:.12g}"
