"""faithsum: faithful summarization of consumer health questions.

Pipeline: entity-aware TextRank context extraction, best-of-N candidate
generation against a pluggable backend, faithfulness-driven selection,
and quality/faithfulness scoring (ROUGE, readability, NLI-based
consistency, entity retention).
"""

__version__ = "0.1.0"
