"""Series and scenario readers, writers and sources."""
