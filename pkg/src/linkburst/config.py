from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .trace import WEEK_SECONDS

SUBCOMMANDS = ("ingest-check", "phases", "stats", "fit", "powerlaw", "synth", "all")
RANDOMIZED = ("fit", "synth", "all")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    input: str | None = None
    out: str = "out"
    dt_seconds: int = WEEK_SECONDS
    theta1: float = 2.0
    theta2: float = -2.0
    min_degree: int = 15
    alpha_bin: float = 0.05
    degree_bin: int = 10
    n_bootstrap: int = 1000
    ks_level: float = 0.1
    seed: int | None = None
    threads: int = 1
    bootstrap_nodes: int | None = None   # None bootstraps every fitted node
    fmt: str = "auto"
    synth_nodes: int = 20000
    synth_events: int | None = None
    synth_sink_nodes: int = 0           # >0 pairs events with a throwaway partner pool

    def validate(self, subcommand=None):
        if subcommand is not None and subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {subcommand!r}")
        if subcommand in RANDOMIZED and self.seed is None:
            raise ConfigError(f"{subcommand} needs an explicit --seed")
        if subcommand not in (None, "synth") and not self.input:
            raise ConfigError(f"{subcommand} needs an input trace")
        if self.dt_seconds <= 0:
            raise ConfigError("dt_seconds must be positive")
        if not self.theta2 < 0 < self.theta1:
            raise ConfigError("thresholds must satisfy theta2 < 0 < theta1")
        if self.min_degree < 1:
            raise ConfigError("min_degree must be at least 1")
        if self.alpha_bin <= 0 or self.degree_bin <= 0:
            raise ConfigError("bin widths must be positive")
        if self.n_bootstrap <= 0:
            raise ConfigError("n_bootstrap must be positive")
        if not 0 < self.ks_level < 1:
            raise ConfigError("ks_level must lie in (0, 1)")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.bootstrap_nodes is not None and self.bootstrap_nodes < 0:
            raise ConfigError("bootstrap_nodes must be non-negative")
        if self.synth_sink_nodes < 0:
            raise ConfigError("synth_sink_nodes must be non-negative")
        if self.synth_nodes < 2:
            raise ConfigError("synth_nodes must be at least 2")
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**d)
