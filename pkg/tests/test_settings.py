#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys
import json
import logging
import tempfile

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from attractorkit.errors import ConfigError
from config.settings import DEFAULT_CONFIG, get_config, save_settings, thread_cap

logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')


class PatchedEnv:
    """Set environment variables for the duration of a with-block."""

    def __init__(self, **values):
        self.values = values
        self.saved = {}

    def __enter__(self):
        for key, value in self.values.items():
            self.saved[key] = os.environ.get(key)
            os.environ[key] = value
        return self

    def __exit__(self, *exc):
        for key, value in self.saved.items():
            if value is None:
                del os.environ[key]
            else:
                os.environ[key] = value


def test_defaults_are_not_shared():
    config = get_config()
    config["spectral"]["safety_factor"] = 99.0
    assert DEFAULT_CONFIG["spectral"]["safety_factor"] == 1.1
    assert get_config()["spectral"]["safety_factor"] == 1.1


def test_environment_overrides():
    with PatchedEnv(ATTRACTORKIT_THREADS="4", ATTRACTORKIT_LOGGING__LEVEL="DEBUG",
                    ATTRACTORKIT_SPECTRAL__SAFETY_FACTOR="1.25", ATTRACTORKIT_BOUNDS__SLACK="1e-2",
                    ATTRACTORKIT_RUN__EPS_LADDER="[0.2, 0.1, 0.05, 0.025]", ATTRACTORKIT_RUN__T_GRID="none"):
        config = get_config()
    assert config["threads"] == 4
    assert config["logging"]["level"] == "DEBUG"
    assert config["spectral"]["safety_factor"] == 1.25
    assert config["bounds"]["slack"] == 0.01
    assert config["run"]["eps_ladder"] == [0.2, 0.1, 0.05, 0.025]
    assert config["run"]["t_grid"] is None
    assert thread_cap(config) == 4


def test_config_file_layering():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "custom.json")
        with open(path, "w") as f:
            json.dump({"covering": {"max_levels": 5}, "run": {"seed": 11}}, f)
        config = get_config(path)
        assert config["covering"]["max_levels"] == 5
        assert config["covering"]["max_dim"] == DEFAULT_CONFIG["covering"]["max_dim"]
        assert config["run"]["seed"] == 11

        saved = os.path.join(tmp, "nested", "saved.json")
        assert save_settings(config, saved)
        assert get_config(saved)["run"]["seed"] == 11

        broken = os.path.join(tmp, "broken.json")
        with open(broken, "w") as f:
            f.write("[1, 2]")
        for path in (broken, os.path.join(tmp, "absent.json")):
            try:
                get_config(path)
            except ConfigError as e:
                assert e.field_path == "config"
            else:
                raise AssertionError(f"{path} must be rejected")


def test_thread_cap():
    assert thread_cap({"threads": 0}) == 1
    assert thread_cap({"threads": "many"}) == 1
    assert thread_cap({}) == 1
    assert thread_cap({"threads": 8}) == 8


def main():
    """Run the configuration tests"""
    print("\n=== Testing configuration ===")
    tests = [test_defaults_are_not_shared, test_environment_overrides, test_config_file_layering,
             test_thread_cap]
    for test in tests:
        print(f"\nRunning {test.__name__}")
        test()
        print("  ok")
    print("\n=== All configuration tests passed ===")


if __name__ == "__main__":
    main()
