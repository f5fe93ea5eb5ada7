"""Scenario configuration files, named presets, and the command line."""
