"""
Configuration loading for the list-decoding lab.

Caps, tolerances and experiment defaults live in YAML files under data/.
They are read once and cached; tests call reset_cache() after patching.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, List

import yaml

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / 'data'
CFG_PATH = DATA_DIR / 'lab_config.yaml'
EXPERIMENTS_PATH = DATA_DIR / 'experiments.yaml'

CAP_ENV_VAR = 'LDLAB_CAP'
ENV_OVERRIDABLE_CAPS = ('enumeration', 'advice', 'exhaustive_received_words')

_config_cache = None
_experiments_cache = None


def _read_yaml(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise FileNotFoundError(f"ldlab config not found at {path}")
    logger.debug(f"Loading config from {path}")
    with open(path, 'r', encoding='utf-8') as f:
        return yaml.safe_load(f) or {}


def load_config() -> Dict[str, Any]:
    """Load lab_config.yaml (cached)"""
    global _config_cache

    if _config_cache is not None:
        return _config_cache

    config = _read_yaml(CFG_PATH)
    _config_cache = config
    logger.debug(f"Loaded lab configuration (version {config.get('metadata', {}).get('config_version', 'unknown')})")
    return config


def load_experiment_config() -> Dict[str, Any]:
    """Load experiments.yaml (cached)"""
    global _experiments_cache

    if _experiments_cache is not None:
        return _experiments_cache

    _experiments_cache = _read_yaml(EXPERIMENTS_PATH)
    return _experiments_cache


def reset_cache() -> None:
    global _config_cache, _experiments_cache
    _config_cache = None
    _experiments_cache = None


def cap(name: str) -> int:
    """
    Return an integer cap from the `caps` section.

    LDLAB_CAP, when set, replaces the enumeration-style caps.
    """
    caps = load_config().get('caps', {})
    if name not in caps:
        raise KeyError(f"Unknown cap '{name}'. Known caps: {sorted(caps)}")

    if name in ENV_OVERRIDABLE_CAPS:
        override = os.environ.get(CAP_ENV_VAR)
        if override:
            try:
                return int(override)
            except ValueError:
                raise ValueError(f"{CAP_ENV_VAR} must be an integer, got '{override}'")
    return int(caps[name])


def tolerance(name: str) -> float:
    return float(load_config().get('tolerances', {})[name])


def log_level() -> str:
    return str(load_config().get('logging', {}).get('level', 'INFO'))


def experiment_names() -> List[str]:
    return list(load_experiment_config().get('experiments', {}).keys())


def experiment_defaults(name: str) -> Dict[str, Any]:
    """Default block for one experiment; empty dict if it has none"""
    block = load_experiment_config().get('experiments', {}).get(name)
    return dict(block) if block else {}
