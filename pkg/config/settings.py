#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Configuration settings for AttractorKit.

Defaults live in ``DEFAULT_CONFIG``. A JSON file given with ``--config`` is
merged over them section by section, and ``ATTRACTORKIT_*`` environment
variables are applied last.
"""

import copy
import os
import json
import logging
from typing import Dict, Any, Optional

from attractorkit.errors import ConfigError

logger = logging.getLogger("attractorkit.settings")

ENV_PREFIX = "ATTRACTORKIT_"


# Default configuration
DEFAULT_CONFIG = {
    # Toolkit settings
    "toolkit": {
        "name": "AttractorKit",
        "version": "0.1.0",
        "schema_version": 1,
    },

    # Cap on internal parallelism (ATTRACTORKIT_THREADS)
    "threads": 1,

    # Method-of-steps integrator
    "integrator": {
        "h": 1e-3,
        "interpolation_order": 3,
        "norm": "max",  # max | euclidean
        "alignment_tolerance": 1e-9,  # relative tolerance for h | r
    },

    # Characteristic roots, projection and dichotomy constants
    "spectral": {
        "root_tolerance": 1e-10,
        "newton_max_iter": 60,
        "max_depth": 60,  # rectangle subdivision depth
        "max_jitter": 6,  # contour perturbation attempts
        "edge_samples": 64,  # initial phase samples per rectangle edge
        "max_edge_samples": 65536,
        "multiple_root_diameter": 1e-6,  # winding box used to confirm a multiple root
        "cluster_diameter": 1e-3,  # relative size below which clusters are resolved by contour moments
        "contour_floor": 1e-9,  # min |f| on a contour relative to its median
        "generator_nodes": 32,
        "window_enlargements": 3,
        "max_im_extent": 2000.0,
        "realpart_tolerance": 1e-8,  # distinct real parts closer than this are merged
        "quadrature_nodes": 64,
        "gamma_fraction": 0.9,
        "safety_factor": 1.1,
        "decay_sample_count": 50,
    },

    # Absorbing sets, squeezing certificates and dimension bounds
    "bounds": {
        "slack": 0.05,
        "alpha_grid_size": 400,
        "alpha_rel_tol": 1e-6,
        "escape_resamples": 20,
    },

    # Ball coverings, covering trees, box counting
    "covering": {
        "ball_samples": 4000,  # random samples per ball when dim > 3
        "grid_resolution": {"1": 801, "2": 81, "3": 25},
        "max_levels": 12,
        "max_dim": 8,
        "attraction_slack": 0.1,  # allowed shortfall of the fitted rate below -ln zeta
    },

    # Retarded reaction-diffusion application
    "rds": {
        "n_modes": 16,
        "quadrature_factor": 4,
        "fd_points": 400,
        "fd_stability": 2.5,
        "dissipativity_slack": 0.05,
        "gamma_excess": 0.1,
    },

    # Default run parameters (overridden per subcommand)
    "run": {
        "seed": 0,
        "cut_m": 1,
        "n_pairs": 100,
        "n_absorption_samples": 50,
        "t_grid": None,  # None: derived from the delay
        "decay_t_grid": None,  # None: derived from the delay
        "eps_ladder": [0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625],
        "attractor_samples": 400,
        "covering_levels": 6,
        "cover_samples": 200,
        "horizon": 5.0,  # simulate
        "attractor_trajectories": 20,
    },

    # Logging settings
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        "file": None,
    },

    # Report output
    "output": {
        "directory": "out",
        "format": "json",  # json | csv
    },
}


def load_settings(config_file: Optional[str] = None) -> Dict[str, Any]:
    """
    Build the configuration for one run.

    Layers, later ones winning:
    1. ``DEFAULT_CONFIG``
    2. The JSON file ``config_file``, when given
    3. ``ATTRACTORKIT_*`` environment variables

    Args:
        config_file: Optional path to a JSON file holding a partial configuration

    Returns:
        A fresh nested dictionary; callers may mutate it
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    if config_file:
        _deep_update(config, _read_config_file(config_file))
        logger.info(f"Merged configuration file {config_file}")
    _update_from_env(config)
    return config


def _read_config_file(config_file: str) -> Dict[str, Any]:
    if not os.path.isfile(config_file):
        raise ConfigError(f"configuration file {config_file} does not exist", field_path="config")
    try:
        with open(config_file, 'r') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"configuration file {config_file} is unreadable: {e}", field_path="config") from e
    if not isinstance(data, dict):
        raise ConfigError(f"configuration file {config_file} must hold a JSON object", field_path="config")
    return data


def _deep_update(target: Dict[str, Any], source: Dict[str, Any]) -> None:
    """Merge ``source`` into ``target``; dictionaries merge key by key, anything else replaces."""
    for key, value in source.items():
        current = target.get(key)
        if isinstance(current, dict) and isinstance(value, dict):
            _deep_update(current, value)
        else:
            target[key] = copy.deepcopy(value)


def _update_from_env(config: Dict[str, Any]) -> None:
    """
    Apply ``ATTRACTORKIT_*`` environment variables.

    The remainder of the name, lower-cased, is the key path; ``__`` separates
    nesting levels:

    ATTRACTORKIT_THREADS=4
    ATTRACTORKIT_LOGGING__LEVEL=DEBUG
    ATTRACTORKIT_RUN__EPS_LADDER=[0.2, 0.1, 0.05, 0.025]
    """
    for name in sorted(os.environ):
        if not name.startswith(ENV_PREFIX) or name == ENV_PREFIX:
            continue
        path = name[len(ENV_PREFIX):].lower().split("__")
        section = config
        for key in path[:-1]:
            if not isinstance(section.get(key), dict):
                section[key] = {}
            section = section[key]
        section[path[-1]] = _parse_env_value(os.environ[name])
        logger.debug(f"{'.'.join(path)} set from {name}")


def _parse_env_value(value: str) -> Any:
    """
    Interpret an environment string.

    true/yes and false/no become booleans, none/null becomes None, JSON
    lists and objects are decoded, then int and float are tried; anything
    else stays a string.
    """
    text = value.strip()
    lowered = text.lower()
    if lowered in ('true', 'yes'):
        return True
    if lowered in ('false', 'no'):
        return False
    if lowered in ('none', 'null'):
        return None
    if text[:1] in ('[', '{'):
        try:
            return json.loads(text)
        except json.JSONDecodeError:
            return value
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return value


def save_settings(config: Dict[str, Any], config_file: str) -> bool:
    """
    Write a configuration as JSON, e.g. to record the exact settings of a run.

    Args:
        config: Configuration dictionary
        config_file: Target path; missing directories are created

    Returns:
        True on success, False when the file could not be written
    """
    directory = os.path.dirname(config_file)
    try:
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(config_file, 'w') as f:
            json.dump(config, f, indent=2, sort_keys=True)
    except OSError as e:
        logger.error(f"Could not save configuration to {config_file}: {e}")
        return False
    logger.info(f"Saved configuration to {config_file}")
    return True


def thread_cap(config: Dict[str, Any]) -> int:
    """Positive worker-thread cap from ``config['threads']``; invalid values fall back to 1."""
    try:
        return max(1, int(config.get("threads", 1)))
    except (TypeError, ValueError):
        logger.warning(f"Ignoring invalid thread cap {config.get('threads')!r}")
        return 1


def get_config(config_file: Optional[str] = None) -> Dict[str, Any]:
    """Full configuration: defaults, then ``config_file``, then the environment."""
    return load_settings(config_file)
