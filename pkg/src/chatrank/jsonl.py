"""Line-delimited JSON helpers."""

import json
import os
import tempfile
from pathlib import Path

from chatrank.errors import DataError


def read_jsonl(path):
    """Yield one dict per non-blank line of ``path``."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise DataError(f"{path}:{lineno}: expected an object")
            yield record


def dumps_line(record):
    return json.dumps(record, sort_keys=True, ensure_ascii=False)


def write_text_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_jsonl(path, records):
    write_text_atomic(path, "".join(dumps_line(r) + "\n" for r in records))
