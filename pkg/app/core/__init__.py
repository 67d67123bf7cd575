"""Scenario model, LP formulation and solver."""
