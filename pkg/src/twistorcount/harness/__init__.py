"""Sampling, oracles, caching, reporting and the command line."""
