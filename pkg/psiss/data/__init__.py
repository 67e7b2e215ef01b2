"""Bundled project configurations."""
