"""Configuration.

- settings: numeric tolerances and run defaults (frozen, no environment input)
- examples: built-in reference models used by tests and ``generate --example``
  (import ``config.examples`` directly; it depends on ``model``, which
  itself imports ``config.settings``)
"""
from config.settings import Settings, settings

__all__ = ["Settings", "settings"]
