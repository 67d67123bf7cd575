"""Reporting module package."""
