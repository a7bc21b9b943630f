#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Base module for AttractorKit.

This module provides a base class for all numerical modules.
"""

import logging
from typing import Any, Dict, Optional


class BaseModule:
    """Base class for all toolkit modules"""

    #: config section read by ``setting``; subclasses override
    section = ""

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize the base module.

        Args:
            config: Configuration dictionary
        """
        self.config = config
        self.logger = logging.getLogger(f"attractorkit.{self.__class__.__name__.lower()}")

    def setting(self, key: str, default: Any = None, section: Optional[str] = None) -> Any:
        """
        Read one value from this module's config section.

        Args:
            key: Key inside the section
            default: Value returned when the key is absent
            section: Section name, defaults to the module's own section

        Returns:
            The configured value or the default
        """
        return self.config.get(section or self.section, {}).get(key, default)
