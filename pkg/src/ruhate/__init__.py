"""Roman-Urdu hostile-speech corpus laboratory.

Subpackages cover the full workflow: raw tweet ingestion and cleansing,
spelling standardization, guideline-driven annotation, inter-annotator
agreement, vectorization, from-scratch classifiers, and stratified
cross-validation with error tagging.
"""

__version__ = "0.1.0"
