"""Tabulated results, CSV emission, config files and ordered parallel sweeps."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import itertools
import math

from .errors import ValidationError

SIG_DIGITS = 12


class ConfigError(ValidationError):
    def __init__(self, message, path=None, line=None, key=None):
        self.path, self.line, self.key = path, line, key
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        if key is not None:
            where += f"field {key!r}: "
        super().__init__(where + message)


def format_value(x):
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"non-finite value {x!r} in table")
    if x == 0.0:
        x = 0.0  # no negative zero
    return format(x, f".{SIG_DIGITS}g")


@dataclass
class SweepResult:
    header: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.header)
        for i, r in enumerate(self.rows):
            if len(r) != n:
                raise ValidationError(f"row {i} has {len(r)} values, header has {n}")

    def to_csv(self, timing=False):
        """CSV text: ``# key = value`` metadata lines, header, rows; LF endings.

        Wall time is only written with ``timing=True`` so that repeated runs
        stay byte-identical.
        """
        lines = []
        for k, v in self.metadata.items():
            if k == "wall_time_s" and not timing:
                continue
            lines.append(f"# {k} = {v}")
        lines.append(",".join(self.header))
        for r in self.rows:
            lines.append(",".join(format_value(x) for x in r))
        return "\n".join(lines) + "\n"

    def column(self, name):
        j = self.header.index(name)
        return [r[j] for r in self.rows]


def read_csv(text):
    """Parse :meth:`SweepResult.to_csv` output back into a SweepResult (values as floats)."""
    meta, header, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].partition("=")
            meta[k.strip()] = v.strip()
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append([_parse_cell(x) for x in line.split(",")])
    if header is None:
        raise ValidationError("no header line found")
    return SweepResult(header, rows, meta)


def _parse_cell(x):
    try:
        return float(x)
    except ValueError:
        return x


class ConfigDict(dict):
    def __init__(self):
        super().__init__()
        self.lines = {}


def parse_config(path):
    """Read a ``key = value`` file; ``#`` starts a comment, lists are comma-separated.

    Returns a dict of key -> list of raw string items (length 1 for scalars);
    its ``lines`` attribute maps each key to its line number.
    """
    out = ConfigDict()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path) from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", path, lineno)
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not key or not key.replace("_", "").isalnum():
            raise ConfigError(f"invalid key {key!r}", path, lineno)
        if key in out:
            raise ConfigError("duplicate key", path, lineno, key)
        items = [v.strip() for v in value.split(",")]
        if not items or any(v == "" for v in items):
            raise ConfigError("empty value", path, lineno, key)
        out[key] = items
        out.lines[key] = lineno
    return out


def cartesian(params):
    """Parameter points in lexicographic order: first key outermost, values as declared."""
    keys = list(params)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(params[k] for k in keys))]


def run_ordered(fn, items, workers=1):
    """``[fn(x) for x in items]`` evaluated on a thread pool, results in input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
