"""litmap: literature cartography.

Ingests article metadata, embeds it into a vector space, projects and
clusters the corpus into subfields, computes descriptive analytics, trains
a relevance classifier for feed filtering, and serves an interactive map
with similarity search.
"""

__version__ = "0.1.0"
