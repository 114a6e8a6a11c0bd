"""Pinned tuned sweep parameters, stored as versioned JSON next to the code.

The tuning protocol lives in scripts/tune_fixtures.py; each file records the
random-search winner for one experimental regime so results are reproducible
without re-running the search.
"""

from __future__ import annotations

import json
from importlib import resources

from ..combing import CombingConfig
from ..errors import ConfigError
from ..models import IsingParams


def _fixture_text(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text()


def combing_config_from_dict(d: dict) -> CombingConfig:
    d = dict(d)
    if isinstance(d.get("steps_per_iter"), list):
        d["steps_per_iter"] = tuple(d["steps_per_iter"])
    if isinstance(d.get("phis"), list):
        d["phis"] = tuple(d["phis"])
    return CombingConfig(**d)


def load_named_fixture(name: str) -> tuple[IsingParams, CombingConfig]:
    """Load one pinned regime, e.g. ``trajectory_nt3_h2`` or ``ensemble_nt3_h05``."""
    try:
        payload = json.loads(_fixture_text(f"{name}.json"))
    except FileNotFoundError:
        raise ConfigError(f"unknown fixture {name!r}")
    ising = IsingParams(**payload["ising"])
    return ising, combing_config_from_dict(payload["combing"])


def load_sc_cost_configs(nt: int, path: str | None = None):
    """Per-h tuned single-comb configs for the cost comparison.

    Returns a provider mapping h to a CombingConfig.  ``path`` overrides the
    packaged fixture file.
    """
    if path is not None:
        with open(path) as fh:
            payload = json.load(fh)
    else:
        try:
            payload = json.loads(_fixture_text(f"sc_cost_nt{nt}.json"))
        except FileNotFoundError:
            raise ConfigError(f"no packaged cost fixtures for nt={nt}; pass --fixtures")
    defaults = payload.get("defaults", {})
    table = {float(k): v for k, v in payload["configs"].items()}

    def provider(h: float) -> CombingConfig:
        if h not in table:
            known = ", ".join(str(k) for k in sorted(table))
            raise ConfigError(f"no tuned parameters for h={h}; fixtures cover {known}")
        return combing_config_from_dict({**defaults, **table[h]})

    return provider
