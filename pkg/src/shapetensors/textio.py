"""Plain-text serialization helpers.

Floats are written with repr(), the shortest decimal string that parses
back to the identical IEEE-754 double, so every file round-trips
bit-for-bit and reruns with the same inputs produce byte-identical output.
Writes go through a temp file in the target directory followed by an
atomic rename; readers never observe a half-written file.
"""

import os
import tempfile


def fmt(value):
    """Shortest exact decimal representation of a float."""
    return repr(float(value))


def fmt_row(values):
    return " ".join(fmt(v) for v in values)


def atomic_write_text(path, text):
    """Write text to path atomically (temp file + rename)."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def data_lines(path_or_text, from_text=False):
    """Yield (lineno, stripped line) skipping blanks and '#' comments."""
    if from_text:
        lines = path_or_text.splitlines()
    else:
        with open(path_or_text) as fh:
            lines = fh.read().splitlines()
    for i, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield i, line


def read_manifest(path):
    """Read a dataset manifest: one "path,label" per line ('#' comments,
    label optional, extra fields ignored).  Relative paths are resolved
    against the manifest's directory."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    for lineno, line in data_lines(path):
        fields = [f.strip() for f in line.split(",")]
        if not fields[0]:
            raise ValueError(f"{path}:{lineno}: empty path field")
        label = fields[1] if len(fields) > 1 else ""
        entry = fields[0]
        if not os.path.isabs(entry):
            entry = os.path.join(base, entry)
        entries.append((entry, label))
    return entries


def write_manifest(path, entries, header=None):
    """Write "path,label" rows with paths relative to the manifest."""
    base = os.path.dirname(os.path.abspath(path))
    lines = [f"# {header}"] if header else []
    lines.append("# file,label")
    for entry, label in entries:
        rel = os.path.relpath(entry, base) if os.path.isabs(entry) else entry
        lines.append(f"{rel},{label}")
    atomic_write_text(path, "\n".join(lines) + "\n")
