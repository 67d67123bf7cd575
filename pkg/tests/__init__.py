"""Test suite for the sizing toolkit."""
