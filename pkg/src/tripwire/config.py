"""Service configuration: defaults, key=value config file, CLI overrides.

The TRIPWIRE_CONFIG environment variable may point at a config file with
one ``key=value`` per line (``#`` comments and blank lines ignored).
CLI flags take precedence over the file, the file over built-ins.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

ENV_VAR = "TRIPWIRE_CONFIG"

_VALID_KEYS = {
    "model",
    "threshold",
    "host",
    "port",
    "review_log",
    "auth_token",
    "dashboard_dir",
}


@dataclass
class ServiceConfig:
    model_path: str
    flag_threshold: float = 0.0  # margin above which items enqueue
    host: str = "127.0.0.1"
    port: int = 8000
    review_log: str = "review-log.jsonl"
    auth_token: str | None = None
    dashboard_dir: str | None = None


def parse_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ValueError(f"{path}: line {line_no} is not key=value")
        if key not in _VALID_KEYS:
            known = ", ".join(sorted(_VALID_KEYS))
            raise ValueError(
                f"{path}: unknown key {key!r} on line {line_no} (known: {known})"
            )
        values[key] = value.strip()
    return values


def resolve_config(overrides: dict[str, object] | None = None) -> ServiceConfig:
    """Merge built-in defaults, the TRIPWIRE_CONFIG file, and overrides."""
    merged: dict[str, object] = {}
    env_path = os.environ.get(ENV_VAR)
    if env_path:
        merged.update(parse_config_file(env_path))
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    model = merged.get("model")
    if not model:
        raise ValueError(
            "a model path is required (flag --model or 'model=' in the "
            f"{ENV_VAR} file)"
        )
    return ServiceConfig(
        model_path=str(model),
        flag_threshold=float(merged.get("threshold", 0.0)),
        host=str(merged.get("host", "127.0.0.1")),
        port=int(merged.get("port", 8000)),
        review_log=str(merged.get("review_log", "review-log.jsonl")),
        auth_token=str(merged["auth_token"]) if merged.get("auth_token") else None,
        dashboard_dir=str(merged["dashboard_dir"])
        if merged.get("dashboard_dir")
        else None,
    )
