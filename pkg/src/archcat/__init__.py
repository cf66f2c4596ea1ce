"""Entity catalogues over transcribed archival documents.

Extracts interrelated entity tables from JSON transcripts according to a
declarative configuration bundle, and serves interactive browsing,
filtering, grouping, provenance lookup and CSV export over them.
"""

__version__ = "0.1.0"
