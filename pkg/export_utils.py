"""CSV output for estimates, curves, study tables and generated samples.

All writers emit a header row (except ``write_values``), LF line endings and
``.`` as the decimal separator. Table numbers use ``%.10g``; sample values use
``%.17g`` so that a written sample reads back bit for bit.

Provided functions:
    estimate_frame(x, estimate) / write_estimate_csv(...)
    curve_frame(curve) / write_curve_csv(curve, out)
    summary_frame(summaries) / write_summary_csv(summaries, out)
    write_values(values, out)
"""
from __future__ import annotations

from typing import IO, Iterable, Sequence, Union

import numpy as np
import pandas as pd

from simulation import Curve, ErrorSummary

TABLE_FORMAT = "%.10g"
VALUE_FORMAT = "%.17g"

Target = Union[str, IO[str]]


def _to_csv(frame: pd.DataFrame, out: Target) -> None:
    frame.to_csv(out, index=False, float_format=TABLE_FORMAT, lineterminator="\n")


def estimate_frame(x: Sequence[float], estimate: Sequence[float]) -> pd.DataFrame:
    return pd.DataFrame({"x": np.asarray(x, dtype=np.float64),
                         "estimate": np.asarray(estimate, dtype=np.float64)})


def write_estimate_csv(x: Sequence[float], estimate: Sequence[float], out: Target) -> None:
    _to_csv(estimate_frame(x, estimate), out)


def curve_frame(curve: Curve) -> pd.DataFrame:
    return pd.DataFrame({
        "x": curve.x,
        curve.reference_name: curve.reference,
        "estimate": curve.estimate,
    })


def write_curve_csv(curve: Curve, out: Target) -> None:
    _to_csv(curve_frame(curve), out)


def summary_frame(summaries: Iterable[ErrorSummary]) -> pd.DataFrame:
    rows = [
        {"distribution": s.distribution, "n": s.n, "mode": s.mode.value,
         "mean_m": s.mean_m, "std_m": s.std_m}
        for s in summaries
    ]
    return pd.DataFrame(rows, columns=["distribution", "n", "mode", "mean_m", "std_m"])


def write_summary_csv(summaries: Iterable[ErrorSummary], out: Target) -> None:
    _to_csv(summary_frame(summaries), out)


def write_values(values: Sequence[float], out: Target) -> None:
    """One value per line, no header: valid input for the sample parser."""
    frame = pd.DataFrame({"value": np.asarray(values, dtype=np.float64)})
    frame.to_csv(out, index=False, header=False, float_format=VALUE_FORMAT, lineterminator="\n")
