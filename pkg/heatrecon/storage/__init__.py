"""Persistence of run artifacts."""
