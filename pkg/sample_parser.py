"""Sample file ingestion.

Format: one positive decimal per line. Everything after a ``#`` is a comment;
blank lines are skipped. Zero or negative observations are rejected with the
offending line number instead of being perturbed, because the kernel needs ln t.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Dict, List

from errors import SampleError
from estimator import Sample, SampleMode

COMMENT_RE = re.compile(r"#.*$")


@dataclass
class ParseResult:
    sample: Sample
    meta: Dict[str, str]


def _clean_line(line: str) -> str:
    return COMMENT_RE.sub("", line).strip()


def parse_sample_text(text: str, mode: SampleMode = SampleMode.IID, source: str = "<text>") -> ParseResult:
    values: List[float] = []
    skipped = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _clean_line(raw)
        if not line:
            skipped += 1
            continue
        try:
            value = float(line)
        except ValueError:
            raise SampleError(f"{source}:{lineno}: not a decimal number: {line!r}") from None
        if not value > 0.0 or value == float("inf"):
            raise SampleError(f"{source}:{lineno}: observation {line} is not a finite positive value")
        values.append(value)
    if not values:
        raise SampleError(f"{source}: empty sample")
    meta = {
        "source": source,
        "observations": str(len(values)),
        "skipped_lines": str(skipped),
    }
    return ParseResult(sample=Sample(values, mode, {"source": source}), meta=meta)


def parse_sample_file(file_path: str, mode: SampleMode = SampleMode.IID) -> ParseResult:
    """Read a sample file from disk; raises SampleError for unreadable files."""
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise SampleError(f"cannot read sample file {file_path}: {e.strerror or e}") from e
    result = parse_sample_text(text, mode, source=os.path.basename(file_path))
    result.meta["filesize"] = str(os.path.getsize(file_path))
    return result


if __name__ == "__main__":  # Simple manual test
    import sys
    if len(sys.argv) > 1:
        res = parse_sample_file(sys.argv[1])
        print(res.meta)
        print(res.sample.values[:10])
