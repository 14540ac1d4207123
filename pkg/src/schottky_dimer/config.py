"""Run configuration: one INI file drives every command-line entry point.

The file must open with a schema stanza so stale configs fail loudly::

    [schema]
    version = schottky-dimer-config/1

    [curve]
    centers = 2.5+3j, 13+1.1j    ; one per handle, upper half plane
    multipliers = 0.05, 0.06     ; same length, each in (0, 1)
    t = 0.2, 0.0                 ; optional, defaults to zeros

    [graph]
    type = square                ; square | honeycomb | file
    rows = 6
    cols = 6

    [truncation]
    word_length = 6
    theta_eps = 1e-10
    quad_tol = 1e-9

    [run]
    seed = 0
    threads = 1

Leaving out [curve] (or giving empty lists) selects genus 0.  Square
patches take optional ``vertical_angles`` / ``horizontal_angles``
overrides, honeycomb patches ``a_angles`` / ``b_angles`` / ``c_angles``,
and ``type = file`` reads a saved graph from ``path`` (relative to the
config file).  Validation errors name the offending line.
"""

import configparser
import os
from dataclasses import dataclass, field

import numpy as np

from .curve import Curve
from .errors import ConfigError
from .minimal_graph import build_honeycomb_patch, build_square_patch, load_graph
from .schottky import SchottkyGroup

SCHEMA_VERSION = "schottky-dimer-config/1"

_SQUARE_ANGLE_KEYS = ("vertical_angles", "horizontal_angles")
_HONEYCOMB_ANGLE_KEYS = ("a_angles", "b_angles", "c_angles")
_KNOWN_KEYS = {
    "schema": {"version"},
    "curve": {"centers", "multipliers", "t"},
    "graph": {"type", "rows", "cols", "path"}
    | set(_SQUARE_ANGLE_KEYS)
    | set(_HONEYCOMB_ANGLE_KEYS),
    "truncation": {"word_length", "theta_eps", "quad_tol"},
    "run": {"seed", "threads"},
}


@dataclass
class RunConfig:
    """Validated contents of one config file."""

    path: str
    centers: list
    multipliers: list
    t: np.ndarray
    graph_type: str
    rows: int = 0
    cols: int = 0
    graph_path: str = ""
    angles: dict = field(default_factory=dict)
    word_length: int = 6
    theta_eps: float = 1e-10
    quad_tol: float = 1e-9
    seed: int = 0
    threads: int = 1

    @property
    def genus(self):
        return len(self.centers)


class _Source:
    """Raw config text plus a map from (section, key) back to a line number."""

    def __init__(self, path):
        try:
            with open(path) as handle:
                self.text = handle.read()
        except OSError as exc:
            raise ConfigError("cannot read config %s: %s" % (path, exc))
        self.path = path
        self.lines = self.text.splitlines()

    def line_of(self, section, key=None):
        want = "[%s]" % section
        inside = False
        header_line = None
        for n, raw in enumerate(self.lines, start=1):
            stripped = raw.strip()
            if stripped.startswith("[") and stripped.endswith("]"):
                if inside:
                    break
                inside = stripped == want
                if inside:
                    header_line = n
                continue
            if not inside or not stripped or stripped[0] in "#;":
                continue
            name = stripped.replace(":", "=").split("=", 1)[0].strip().lower()
            if key is not None and name == key:
                return n
        return header_line if key is None else None

    def fail(self, message, section, key=None):
        line = self.line_of(section, key)
        if line is None and key is not None:
            line = self.line_of(section)
        where = "line %d: " % line if line else ""
        raise ConfigError(where + message)


def _split_items(raw):
    return [item.strip() for item in raw.split(",") if item.strip()]


def _complex_list(src, section, key, raw):
    out = []
    for item in _split_items(raw):
        try:
            out.append(complex(item.replace(" ", "")))
        except ValueError:
            src.fail("%s: cannot parse %r as a complex number" % (key, item), section, key)
    return out


def _float_list(src, section, key, raw):
    out = []
    for item in _split_items(raw):
        try:
            out.append(float(item))
        except ValueError:
            src.fail("%s: cannot parse %r as a number" % (key, item), section, key)
    return out


def _scalar(src, parser, section, key, cast, default):
    raw = parser.get(section, key, fallback=None)
    if raw is None:
        return default
    try:
        return cast(raw.strip())
    except ValueError:
        src.fail("%s: cannot parse %r" % (key, raw.strip()), section, key)


def load_config(path):
    """Parse and validate the config at path; raises ConfigError otherwise."""
    src = _Source(path)
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None
    )
    try:
        parser.read_string(src.text, source=path)
    except configparser.Error as exc:
        raise ConfigError("bad config syntax: %s" % " ".join(str(exc).split()))

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            src.fail("unknown section [%s]" % section, section)
        for key in parser.options(section):
            if key not in _KNOWN_KEYS[section]:
                src.fail("unknown key %r" % key, section, key)

    # schema stanza is mandatory; a silent version drift is worse than an error
    if not parser.has_section("schema"):
        raise ConfigError(
            "missing [schema] section; expected version = %s" % SCHEMA_VERSION
        )
    version = parser.get("schema", "version", fallback=None)
    if version is None:
        src.fail("missing version key", "schema")
    if version.strip() != SCHEMA_VERSION:
        src.fail(
            "unsupported schema %r; this build reads %r"
            % (version.strip(), SCHEMA_VERSION),
            "schema",
            "version",
        )

    centers, multipliers, t_raw = [], [], None
    if parser.has_section("curve"):
        centers = _complex_list(
            src, "curve", "centers", parser.get("curve", "centers", fallback="")
        )
        multipliers = _float_list(
            src, "curve", "multipliers", parser.get("curve", "multipliers", fallback="")
        )
        t_raw = parser.get("curve", "t", fallback=None)
    if len(centers) != len(multipliers):
        src.fail(
            "need one multiplier per center (%d centers, %d multipliers)"
            % (len(centers), len(multipliers)),
            "curve",
            "multipliers",
        )
    for k, center in enumerate(centers, start=1):
        if center.imag <= 0:
            src.fail(
                "center %d = %s must lie in the upper half plane" % (k, center),
                "curve",
                "centers",
            )
    for k, mult in enumerate(multipliers, start=1):
        if not 0.0 < mult < 1.0:
            src.fail(
                "multiplier %d = %r must sit in (0, 1)" % (k, mult),
                "curve",
                "multipliers",
            )
    genus = len(centers)
    if t_raw is None:
        t = np.zeros(genus)
    else:
        t_list = _float_list(src, "curve", "t", t_raw)
        if len(t_list) != genus:
            src.fail(
                "t needs %d components, got %d" % (genus, len(t_list)), "curve", "t"
            )
        t = np.asarray(t_list, dtype=float)

    if not parser.has_section("graph"):
        raise ConfigError("missing [graph] section")
    graph_type = parser.get("graph", "type", fallback="").strip()
    if graph_type not in ("square", "honeycomb", "file"):
        src.fail(
            "graph type must be square, honeycomb or file (got %r)" % graph_type,
            "graph",
            "type",
        )
    rows = cols = 0
    graph_path = ""
    angles = {}
    if graph_type == "file":
        graph_path = (parser.get("graph", "path", fallback="") or "").strip()
        if not graph_path:
            src.fail("type = file needs a path key", "graph")
        if not os.path.isabs(graph_path):
            graph_path = os.path.join(
                os.path.dirname(os.path.abspath(path)), graph_path
            )
    else:
        rows = _scalar(src, parser, "graph", "rows", int, 0)
        cols = _scalar(src, parser, "graph", "cols", int, 0)
        if rows < 1 or cols < 1:
            src.fail("rows and cols must be positive integers", "graph", "rows")
        wanted = _SQUARE_ANGLE_KEYS if graph_type == "square" else _HONEYCOMB_ANGLE_KEYS
        for key in _SQUARE_ANGLE_KEYS + _HONEYCOMB_ANGLE_KEYS:
            if not parser.has_option("graph", key):
                continue
            if key not in wanted:
                src.fail(
                    "%s does not apply to %s patches" % (key, graph_type), "graph", key
                )
            angles[key] = _float_list(src, "graph", key, parser.get("graph", key))

    word_length = _scalar(src, parser, "truncation", "word_length", int, 6)
    theta_eps = _scalar(src, parser, "truncation", "theta_eps", float, 1e-10)
    quad_tol = _scalar(src, parser, "truncation", "quad_tol", float, 1e-9)
    if word_length < 1:
        src.fail("word_length must be at least 1", "truncation", "word_length")
    if theta_eps <= 0 or quad_tol <= 0:
        src.fail("tolerances must be positive", "truncation")

    seed = _scalar(src, parser, "run", "seed", int, 0)
    threads = _scalar(src, parser, "run", "threads", int, 1)
    if threads < 1:
        src.fail("threads must be at least 1", "run", "threads")

    return RunConfig(
        path=os.path.abspath(path),
        centers=centers,
        multipliers=multipliers,
        t=t,
        graph_type=graph_type,
        rows=rows,
        cols=cols,
        graph_path=graph_path,
        angles=angles,
        word_length=word_length,
        theta_eps=theta_eps,
        quad_tol=quad_tol,
        seed=seed,
        threads=threads,
    )


def build_group(config):
    if config.genus == 0:
        return None
    return SchottkyGroup(config.centers, config.multipliers)


def build_curve(config):
    return Curve(
        build_group(config), word_length=config.word_length, eps=config.theta_eps
    )


def build_graph(config):
    if config.graph_type == "file":
        return load_graph(config.graph_path)
    if config.graph_type == "square":
        return build_square_patch(
            config.cols,
            config.rows,
            vertical_angles=config.angles.get("vertical_angles"),
            horizontal_angles=config.angles.get("horizontal_angles"),
        )
    return build_honeycomb_patch(
        config.cols,
        config.rows,
        a_angles=config.angles.get("a_angles"),
        b_angles=config.angles.get("b_angles"),
        c_angles=config.angles.get("c_angles"),
    )
