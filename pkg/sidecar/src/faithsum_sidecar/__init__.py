"""Scoring sidecar: NLI and BERTScore over HTTP."""

__version__ = "0.1.0"
