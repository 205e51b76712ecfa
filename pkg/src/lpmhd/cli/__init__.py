"""Run configuration, orchestration and the command line entry point."""

from .config import RunConfig, parse_config, serialize
from .run import read_snapshot, resume, run

__all__ = ["RunConfig", "parse_config", "read_snapshot", "resume", "run", "serialize"]
