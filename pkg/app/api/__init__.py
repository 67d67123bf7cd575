"""HTTP routes for the sizing service."""
