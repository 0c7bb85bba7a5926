"""Runtime settings merged from defaults, a TOML file, environment
variables, and command-line overrides, in that order of precedence.

Environment variables use the ``CREDCHAIN_`` prefix with the field name
upper-cased, e.g. ``CREDCHAIN_DATA_DIR`` or ``CREDCHAIN_SEED``.  One
``seed`` drives every random draw in the system: wallets, salts,
session tokens, and demo content all derive from it, so two runs with
equal settings produce byte-identical artifacts.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .units import gwei

ENV_PREFIX = "CREDCHAIN_"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class AppConfig:
    data_dir: str = "./credchain-data"
    seed: int = 1
    host: str = "127.0.0.1"
    port: int = 8787

    # chain parameters
    difficulty_bits: int = 12
    block_gas_limit: int = 120_000
    node_count: int = 5
    clock_tick_us: int = 1000
    block_reward_eth: int = 2

    # default transaction economics
    gas_limit: int = 40_000
    gas_price_gwei: int = 100

    # genesis funding
    admin_ether: int = 100
    faucet_ether: int = 10
    faucet_count: int = 8

    # service behaviour
    admin_email: str = "admin@credchain.local"
    admin_password: str = "admin-password"
    share_ttl_days: int = 30
    auto_mine: bool = True
    mine_interval_s: float = 0.2
    frontend_dir: str = ""

    @property
    def gas_price_wei(self) -> int:
        return gwei(self.gas_price_gwei)


_FIELDS = {f.name: f for f in dataclasses.fields(AppConfig)}


def _coerce(name: str, value, source: str):
    kind = _FIELDS[name].type
    try:
        if kind == "bool":
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        if kind == "int":
            if isinstance(value, bool):
                raise ValueError("boolean is not an integer")
            return int(value)
        if kind == "float":
            return float(value)
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name} from {source}: {exc}") from exc


def load_config(
    path: str | Path | None = None,
    *,
    env: dict | None = None,
    overrides: dict | None = None,
) -> AppConfig:
    """Build the effective configuration.  ``overrides`` holds parsed
    command-line values and wins over everything else; None values in
    it mean "not given" and are skipped."""
    values: dict = {}

    if path is not None:
        try:
            with open(path, "rb") as fh:
                table = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc
        for key, value in table.items():
            if key not in _FIELDS:
                raise ConfigError(f"unknown config key {key!r} in {path}")
            values[key] = _coerce(key, value, str(path))

    env_map = os.environ if env is None else env
    for name in _FIELDS:
        env_key = ENV_PREFIX + name.upper()
        if env_key in env_map:
            values[name] = _coerce(name, env_map[env_key], env_key)

    for name, value in (overrides or {}).items():
        if value is None:
            continue
        if name not in _FIELDS:
            raise ConfigError(f"unknown config override {name!r}")
        values[name] = _coerce(name, value, "command line")

    return AppConfig(**values)
