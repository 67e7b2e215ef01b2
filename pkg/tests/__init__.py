"""PRSW test suite."""
