"""Shared helpers: exceptions, seeded streams, samplers, statistics and I/O."""
