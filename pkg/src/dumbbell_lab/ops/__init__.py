"""Provenance, artifact writers, claim checks and exit-code evaluation."""
