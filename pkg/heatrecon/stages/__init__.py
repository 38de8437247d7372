"""Stages of an experiment run."""
