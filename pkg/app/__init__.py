"""Renewable capacity sizing package."""
