"""Lasserre-hierarchy graph distinguishability toolkit."""
