"""Run configuration.

Every tunable for a pipeline run lives in one small UTF-8 config file of
``key = value`` lines, so a run is reproducible from (config file, input
CSV, seed). ``#`` starts a full-line comment; blank lines are ignored;
keys may appear at most once. List-valued keys use commas. CSV column
names are remapped with dotted ``schema.*`` keys. Relative paths are
resolved against the directory containing the config file.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .corpus import (
    CANONICAL_SCHEMA,
    DEFAULT_EXCLUDED_TYPES,
    DEFAULT_YEAR_WINDOW,
    CsvSchema,
    DocType,
    normalize_doc_type,
)
from .errors import ConfigError
from .periods import DEFAULT_PERIOD_SPEC, PeriodSpec
from .textpipe import WeightScheme

__all__ = [
    "RunConfig",
    "parse_config_text",
    "load_config",
    "to_config_text",
]

_CA_INPUTS = ("counts", "weighted")


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one end-to-end run."""

    input: Path
    out: Path = Path("out")
    schema: CsvSchema = CANONICAL_SCHEMA
    excluded_types: frozenset[DocType] = DEFAULT_EXCLUDED_TYPES
    year_min: int = DEFAULT_YEAR_WINDOW[0]
    year_max: int = DEFAULT_YEAR_WINDOW[1]
    builtin_stopwords: bool = True
    stoplists: tuple[Path, ...] = ()
    min_token_len: int = 2
    min_term_freq: int = 5
    auto_stop_df: float = 0.0
    weighting: WeightScheme = WeightScheme.RELATIVE_FREQUENCY
    ca_input: str = "counts"
    ca_dims: int = 2
    periods: PeriodSpec = DEFAULT_PERIOD_SPEC
    top_terms: int = 30
    top_docs: int = 3
    period_terms: int = 10
    cloud_terms: int = 40
    trend_horizon: int = 2
    trend_skip_last: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        positive = [
            ("min_token_len", self.min_token_len),
            ("min_term_freq", self.min_term_freq),
            ("ca_dims", self.ca_dims),
            ("top_terms", self.top_terms),
            ("top_docs", self.top_docs),
            ("period_terms", self.period_terms),
            ("cloud_terms", self.cloud_terms),
        ]
        for name, value in positive:
            if value < 1:
                raise ConfigError(f"{name} must be >= 1, got {value}")
        for name, value in [
            ("trend_horizon", self.trend_horizon),
            ("trend_skip_last", self.trend_skip_last),
        ]:
            if value < 0:
                raise ConfigError(f"{name} must be >= 0, got {value}")
        if not 0.0 <= self.auto_stop_df <= 1.0:
            raise ConfigError(
                f"auto_stop_df must be in [0, 1], got {self.auto_stop_df}"
            )
        if self.year_min > self.year_max:
            raise ConfigError(
                f"year_min {self.year_min} exceeds year_max {self.year_max}"
            )
        if self.ca_input not in _CA_INPUTS:
            raise ConfigError(
                f"ca_input must be one of {_CA_INPUTS}, got {self.ca_input!r}"
            )

    @property
    def year_window(self) -> tuple[int, int]:
        return (self.year_min, self.year_max)

    def check_paths(self) -> None:
        """Verify that the referenced input files exist."""
        if not self.input.is_file():
            raise ConfigError(f"input file not found: {self.input}")
        for p in self.stoplists:
            if not p.is_file():
                raise ConfigError(f"stoplist file not found: {p}")

    def with_overrides(
        self, out: str | Path | None = None, seed: int | None = None
    ) -> "RunConfig":
        """Apply the command-line ``--out`` / ``--seed`` overrides."""
        cfg = self
        if out is not None:
            cfg = replace(cfg, out=Path(out))
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        return cfg


def _parse_bool(key: str, value: str) -> bool:
    table = {"true": True, "false": False, "yes": True, "no": False}
    try:
        return table[value.lower()]
    except KeyError:
        raise ConfigError(f"{key} expects true/false, got {value!r}") from None


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key} expects an integer, got {value!r}") from None


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key} expects a number, got {value!r}") from None


def _split_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def parse_config_text(text: str, base_dir: str | Path = ".") -> RunConfig:
    """Parse config-file text into a :class:`RunConfig`.

    Raises :class:`ConfigError` (naming the offending key and line) for
    syntax errors, unknown or duplicate keys, and out-of-range values.
    """
    base = Path(base_dir)
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value.strip()

    if "input" not in pairs:
        raise ConfigError("missing required key 'input'")

    def path_of(value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else (base / p)

    kwargs: dict[str, object] = {}
    schema_over: dict[str, str | None] = {}
    valid_field_names = {f.name for f in fields(CsvSchema)}
    scalar_int = {
        "year_min", "year_max", "min_token_len", "min_term_freq", "ca_dims",
        "top_terms", "top_docs", "period_terms", "cloud_terms",
        "trend_horizon", "trend_skip_last", "seed",
    }
    for key, value in pairs.items():
        if key.startswith("schema."):
            name = key[len("schema."):]
            if name not in valid_field_names:
                raise ConfigError(f"unknown schema field {key!r}")
            schema_over[name] = value or None
        elif key in ("input", "out"):
            kwargs[key] = path_of(value)
        elif key == "stoplists":
            kwargs[key] = tuple(path_of(v) for v in _split_list(value))
        elif key == "excluded_types":
            types = frozenset(
                normalize_doc_type(v) for v in _split_list(value)
            )
            kwargs[key] = types
        elif key == "builtin_stopwords":
            kwargs[key] = _parse_bool(key, value)
        elif key == "auto_stop_df":
            kwargs[key] = _parse_float(key, value)
        elif key in scalar_int:
            kwargs[key] = _parse_int(key, value)
        elif key == "weighting":
            try:
                kwargs[key] = WeightScheme(value)
            except ValueError:
                raise ConfigError(
                    f"weighting must be one of "
                    f"{[s.value for s in WeightScheme]}, got {value!r}"
                ) from None
        elif key == "ca_input":
            kwargs[key] = value
        elif key == "periods":
            kwargs[key] = PeriodSpec.parse(value)
        else:
            raise ConfigError(f"unknown config key {key!r}")

    if schema_over:
        # An explicit schema block replaces the canonical mapping wholesale:
        # required fields must all be named, unmentioned optional columns
        # are treated as absent rather than inheriting canonical names.
        for required in ("title", "abstract", "year", "doc_type"):
            if schema_over.get(required) is None:
                raise ConfigError(
                    f"schema.{required} is required when any schema.* key is set"
                )
        kwargs["schema"] = CsvSchema(**schema_over)  # type: ignore[arg-type]

    return RunConfig(**kwargs)  # type: ignore[arg-type]


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a config file; relative paths resolve against
    the file's own directory."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid UTF-8: {exc}") from None
    cfg = parse_config_text(text, base_dir=p.parent)
    cfg.check_paths()
    return cfg


def to_config_text(cfg: RunConfig) -> str:
    """Canonical echo of a config, parseable by :func:`parse_config_text`.

    Embedded in the run manifest so any run can be repeated from its
    outputs alone.
    """
    lines = [f"input = {cfg.input}"]
    lines.append(f"out = {cfg.out}")
    for field_name, column in [
        ("title", cfg.schema.title),
        ("abstract", cfg.schema.abstract),
        ("year", cfg.schema.year),
        ("doc_type", cfg.schema.doc_type),
        ("keywords", cfg.schema.keywords),
        ("citations", cfg.schema.citations),
        ("id", cfg.schema.id),
    ]:
        lines.append(f"schema.{field_name} = {column if column is not None else ''}")
    lines.append(
        "excluded_types = "
        + ",".join(sorted(t.value for t in cfg.excluded_types))
    )
    lines.append(f"year_min = {cfg.year_min}")
    lines.append(f"year_max = {cfg.year_max}")
    lines.append(f"builtin_stopwords = {'true' if cfg.builtin_stopwords else 'false'}")
    lines.append("stoplists = " + ",".join(str(p) for p in cfg.stoplists))
    lines.append(f"min_token_len = {cfg.min_token_len}")
    lines.append(f"min_term_freq = {cfg.min_term_freq}")
    lines.append(f"auto_stop_df = {cfg.auto_stop_df!r}")
    lines.append(f"weighting = {cfg.weighting.value}")
    lines.append(f"ca_input = {cfg.ca_input}")
    lines.append(f"ca_dims = {cfg.ca_dims}")
    lines.append(f"periods = {cfg.periods.format()}")
    lines.append(f"top_terms = {cfg.top_terms}")
    lines.append(f"top_docs = {cfg.top_docs}")
    lines.append(f"period_terms = {cfg.period_terms}")
    lines.append(f"cloud_terms = {cfg.cloud_terms}")
    lines.append(f"trend_horizon = {cfg.trend_horizon}")
    lines.append(f"trend_skip_last = {cfg.trend_skip_last}")
    lines.append(f"seed = {cfg.seed}")
    return "\n".join(lines) + "\n"
