"""Run configuration: an INI file with sections, validated into :class:`RunConfig`.

Schema (keys not listed are rejected)::

    [problem]
    family = fd-diffusion        # toeplitz | lt | fd-diffusion | import
    a = 2*sin(x)+cos(2*x)        # coefficient on [0, 1] (lt, fd-diffusion)
    f = laplacian                # generating function on [-pi, pi] (toeplitz, lt)
    matrix = path/to/matrix.txt  # import only, relative to the config file

    [sizes]
    n = 400, 1600, 3600, 6400    # comparison sizes
    m = 100, 400, 700, 1000      # estimation sizes
    l = 3, 5, 7, 10, 15          # truncation orders

    [estimator]
    nodes = midpoint             # right | midpoint
    normalization = gram         # trace | gram

    [truth]                      # optional separable symbol a(x) f(t)
    a = 2*sin(x)+cos(2*x)
    f = 2-2*cos(t)

    [tables]
    gamma_order = 3              # table1: order l
    gamma_size = 400             # table1: sampling size n
    estimation_size = 1000       # m used for table2, the figure and weyl
    eig_norm = max               # euclidean | max | rms
    figure_size = 2500
    figure_order = 7

    [qcurve]
    n = 400, 1600

    [counterexample]
    a = inverse_fourth_root
    n = 100, 10000, 1000000

    [output]
    dir = out
    commands = extract, tables
    threads = 1

Functions are builtin names, ``fourier: k:v, ...`` lists or expressions.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .extraction import GRAM, TRACE
from .functions import TORUS, UNIT, ExpressionError, FunctionSpec, function_from_text, parse_complex
from .generators import MIDPOINT, RIGHT

FAMILIES = ("toeplitz", "lt", "fd-diffusion", "import")
COMMANDS = ("extract", "compare", "tables", "weyl", "qcurve", "counterexample")
NORMS = ("euclidean", "max", "rms")

SCHEMA = {
    "problem": {"family", "a", "f", "matrix"},
    "sizes": {"n", "m", "l"},
    "estimator": {"nodes", "normalization"},
    "truth": {"a", "f"},
    "tables": {"gamma_order", "gamma_size", "estimation_size", "eig_norm",
               "figure_size", "figure_order"},
    "qcurve": {"n"},
    "counterexample": {"a", "n"},
    "output": {"dir", "commands", "threads"},
}


class ConfigError(Exception):
    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line else ""
        super().__init__(where + message)
        self.line = line


class MissingKey(ConfigError):
    pass


class InvalidValue(ConfigError):
    pass


class ConstraintViolation(ConfigError):
    pass


class MatrixFormatError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str
    a: FunctionSpec | None
    f: FunctionSpec | None
    n: list
    m: list
    l: list
    truth_a: FunctionSpec | None = None
    truth_f: FunctionSpec | None = None
    matrix: np.ndarray | None = None
    matrix_path: str | None = None
    nodes: str = MIDPOINT
    normalization: str = GRAM
    gamma_order: int = 3
    gamma_size: int = 400
    estimation_size: int | None = None
    eig_norm: str = "max"
    figure_size: int = 2500
    figure_order: int = 7
    qcurve_n: list = field(default_factory=list)
    counterexample_a: FunctionSpec | None = None
    counterexample_n: list = field(default_factory=lambda: [100, 10_000, 1_000_000])
    output: str = "out"
    commands: list = field(default_factory=lambda: list(COMMANDS))
    threads: int = 1

    @property
    def has_truth(self) -> bool:
        return self.truth_a is not None and self.truth_f is not None

    def describe(self) -> dict:
        """Plain-data view for the manifest."""
        def fn(spec):
            return None if spec is None else spec.text
        return {
            "family": self.family, "a": fn(self.a), "f": fn(self.f),
            "matrix": self.matrix_path, "n": self.n, "m": self.m, "l": self.l,
            "truth_a": fn(self.truth_a), "truth_f": fn(self.truth_f),
            "nodes": self.nodes, "normalization": self.normalization,
            "gamma_order": self.gamma_order, "gamma_size": self.gamma_size,
            "estimation_size": self.estimation_size, "eig_norm": self.eig_norm,
            "figure_size": self.figure_size, "figure_order": self.figure_order,
            "qcurve_n": self.qcurve_n, "counterexample_a": fn(self.counterexample_a),
            "counterexample_n": self.counterexample_n, "commands": self.commands,
        }


def import_matrix(path) -> np.ndarray:
    """Read the text matrix format: a line with ``n`` then n rows of n entries."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise MatrixFormatError(f"first line must be the size n, got {lines[0]!r}") from None
    if n < 1:
        raise MatrixFormatError("matrix size must be positive")
    rows = lines[1:]
    if len(rows) != n:
        raise MatrixFormatError(f"expected {n} rows, found {len(rows)}")
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows, start=1):
        entries = row.split(",")
        if len(entries) != n:
            raise MatrixFormatError(f"row {i} has {len(entries)} entries, expected {n}")
        for j, entry in enumerate(entries, start=1):
            try:
                out[i - 1, j - 1] = parse_complex(entry)
            except ValueError:
                raise MatrixFormatError(f"malformed entry {entry.strip()!r} at row {i}, column {j}") from None
    if not np.all(np.isfinite(out)):
        raise MatrixFormatError("matrix has non-finite entries")
    return out


class _Source:
    """Config text with line lookup for error messages."""

    def __init__(self, text: str):
        self.lines = text.splitlines()

    def line_of(self, section: str, key: str | None = None) -> int | None:
        current = None
        for no, raw in enumerate(self.lines, start=1):
            s = raw.strip()
            header = re.match(r"^\[(.+)\]$", s)
            if header:
                current = header.group(1).strip()
                if key is None and current == section:
                    return no
                continue
            if current == section and key is not None:
                if re.match(rf"^{re.escape(key)}\s*[=:]", s):
                    return no
        return None


def load_config(path) -> RunConfig:
    path = Path(path)
    text = path.read_text()
    src = _Source(text)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise InvalidValue(str(exc).splitlines()[0], getattr(exc, "lineno", None)) from None

    for section in parser.sections():
        if section not in SCHEMA:
            raise InvalidValue(f"unknown section [{section}]", src.line_of(section))
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise InvalidValue(f"unknown key {key!r} in [{section}]", src.line_of(section, key))

    def raw(section, key, required=False):
        if parser.has_option(section, key):
            return parser.get(section, key).strip()
        if required:
            line = src.line_of(section)
            raise MissingKey(f"missing key {key!r} in [{section}]", line)
        return None

    def where(section, key):
        return src.line_of(section, key)

    def integer_list(section, key, required=False, minimum=None):
        value = raw(section, key, required)
        if value is None:
            return None
        try:
            items = [int(v) for v in value.replace(" ", "").split(",") if v]
        except ValueError:
            raise InvalidValue(f"{key} must be a comma-separated list of integers", where(section, key)) from None
        if not items:
            raise InvalidValue(f"{key} is empty", where(section, key))
        if minimum is not None and min(items) < minimum:
            raise ConstraintViolation(f"all {key} values must be >= {minimum}", where(section, key))
        return items

    def integer(section, key, default, minimum=0):
        value = raw(section, key)
        if value is None:
            return default
        try:
            out = int(value)
        except ValueError:
            raise InvalidValue(f"{key} must be an integer", where(section, key)) from None
        if out < minimum:
            raise ConstraintViolation(f"{key} must be >= {minimum}", where(section, key))
        return out

    def choice(section, key, options, default):
        value = raw(section, key)
        if value is None:
            return default
        if value not in options:
            raise InvalidValue(f"{key} must be one of {', '.join(options)}", where(section, key))
        return value

    def function(section, key, domain, required=False):
        value = raw(section, key, required)
        if value is None:
            return None
        try:
            return function_from_text(value, domain)
        except (ExpressionError, ValueError) as exc:
            raise InvalidValue(f"{key}: {exc}", where(section, key)) from None

    family = raw("problem", "family", required=True)
    if family not in FAMILIES:
        raise InvalidValue(f"family must be one of {', '.join(FAMILIES)}", where("problem", "family"))

    cfg = RunConfig(
        family=family,
        a=function("problem", "a", UNIT, required=family in ("lt", "fd-diffusion")),
        f=function("problem", "f", TORUS, required=family in ("toeplitz", "lt")),
        n=integer_list("sizes", "n", minimum=4) or [],
        m=integer_list("sizes", "m", minimum=4) or [],
        l=integer_list("sizes", "l", required=True, minimum=0),
    )

    if family == "import":
        rel = raw("problem", "matrix", required=True)
        mpath = (path.parent / rel) if not Path(rel).is_absolute() else Path(rel)
        try:
            cfg.matrix = import_matrix(mpath)
        except MatrixFormatError as exc:
            raise InvalidValue(f"matrix file {rel}: {exc}", where("problem", "matrix")) from None
        cfg.matrix_path = rel
        size = cfg.matrix.shape[0]
        if size < 4:
            raise ConstraintViolation("imported matrix must be at least 4 x 4", where("problem", "matrix"))
        cfg.n = [size]
        cfg.m = [size]
    else:
        if not cfg.n:
            raise MissingKey("missing key 'n' in [sizes]", src.line_of("sizes"))
        if not cfg.m:
            raise MissingKey("missing key 'm' in [sizes]", src.line_of("sizes"))

    limit = math.isqrt(max(cfg.m))
    if max(cfg.l) >= limit:
        raise ConstraintViolation(
            f"truncation order l={max(cfg.l)} needs l < isqrt(max m) = {limit}", where("sizes", "l"))

    cfg.nodes = choice("estimator", "nodes", (RIGHT, MIDPOINT), MIDPOINT)
    cfg.normalization = choice("estimator", "normalization", (TRACE, GRAM), GRAM)

    cfg.truth_a = function("truth", "a", UNIT)
    cfg.truth_f = function("truth", "f", TORUS)
    if (cfg.truth_a is None) != (cfg.truth_f is None):
        raise MissingKey("[truth] needs both a and f", src.line_of("truth"))

    cfg.gamma_order = integer("tables", "gamma_order", min(3, max(cfg.l)))
    cfg.gamma_size = integer("tables", "gamma_size", min(cfg.n), minimum=4)
    cfg.estimation_size = integer("tables", "estimation_size", max(cfg.m), minimum=4)
    if cfg.estimation_size not in cfg.m:
        raise ConstraintViolation("estimation_size must be one of the m sizes", where("tables", "estimation_size"))
    cfg.eig_norm = choice("tables", "eig_norm", NORMS, "max")
    cfg.figure_size = integer("tables", "figure_size", min(cfg.n), minimum=4)
    cfg.figure_order = integer("tables", "figure_order", max(cfg.l))
    if cfg.figure_order >= limit or cfg.gamma_order >= limit:
        raise ConstraintViolation(f"table orders must be below {limit}", src.line_of("tables"))

    cfg.qcurve_n = integer_list("qcurve", "n", minimum=4) or [n for n in cfg.n if n <= 1600] or [min(cfg.n)]
    cfg.counterexample_a = function("counterexample", "a", UNIT) or function_from_text("inverse_fourth_root")
    cfg.counterexample_n = integer_list("counterexample", "n", minimum=1) or cfg.counterexample_n

    cfg.output = raw("output", "dir") or "out"
    commands = raw("output", "commands")
    if commands is not None:
        cfg.commands = [c.strip() for c in commands.split(",") if c.strip()]
        bad = [c for c in cfg.commands if c not in COMMANDS]
        if bad:
            raise InvalidValue(f"unknown command {bad[0]!r}", where("output", "commands"))
    cfg.threads = integer("output", "threads", 1, minimum=1)
    if "tables" in cfg.commands and not cfg.has_truth:
        raise ConstraintViolation("the tables command needs a [truth] symbol", where("output", "commands"))
    return cfg
