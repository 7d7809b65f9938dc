"""Rack-aware MSR array codes."""
