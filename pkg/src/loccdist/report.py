"""Plain-text run reports.

A report is a ``[summary]`` block of ``key = value`` lines followed by an
optional CSV table. Floats are written with 17 significant digits, so reading a
report back reproduces every number exactly.
"""

from dataclasses import dataclass, field

from .errors import ParseError

HEADER = "# loccdist report"


@dataclass
class Report:
    subcommand: str
    version: str
    generator: str
    config: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    table_name: str = None
    table_header: tuple = ()
    rows: list = field(default_factory=list)
    violations: list = field(default_factory=list)


def fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, (list, tuple)):
        return " ".join(fmt(v) for v in x)
    return str(x)


def _parse_value(text):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def format_report(r):
    lines = [HEADER, "[summary]",
             f"version = {r.version}",
             f"generator = {r.generator}",
             f"subcommand = {r.subcommand}"]
    lines += [f"config.{k} = {fmt(v)}" for k, v in r.config.items()]
    lines += [f"{k} = {fmt(v)}" for k, v in r.values.items()]
    lines += [f"violation = {msg}" for msg in r.violations]
    if r.table_name and r.rows:
        lines += ["", f"[{r.table_name}]", ",".join(r.table_header)]
        lines += [",".join(fmt(v) for v in row) for row in r.rows]
    return "\n".join(lines) + "\n"


def emit_report(r, path=None):
    """Render ``r``; write it to ``path`` when given. Returns the text."""
    text = format_report(r)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def parse_report(text):
    """Inverse of :func:`format_report` (config values come back as strings or numbers)."""
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise ParseError("missing report header", 1)
    meta = {}
    config, values, violations = {}, {}, []
    table_name, header, rows = None, (), []
    section = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            if section != "summary":
                table_name = section
            continue
        if section == "summary":
            key, sep, val = line.partition(" = ")
            if not sep:
                raise ParseError(f"expected 'key = value', got {line!r}", lineno)
            if key in ("version", "generator", "subcommand"):
                meta[key] = val
            elif key.startswith("config."):
                config[key[len("config."):]] = _parse_value(val)
            elif key == "violation":
                violations.append(val)
            else:
                values[key] = _parse_value(val)
        elif section is not None:
            cells = line.split(",")
            if not header:
                header = tuple(cells)
            else:
                rows.append(tuple(_parse_value(c) for c in cells))
        else:
            raise ParseError(f"content outside any section: {line!r}", lineno)
    return Report(meta.get("subcommand"), meta.get("version"), meta.get("generator"),
                  config, values, table_name, header, rows, violations)
