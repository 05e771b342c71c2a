"""explabox: transparency and audit toolkit for black-box text models.

Four analyses turn datasets and models into reproducible digestibles:
explore (statistics), examine (performance), explain (attributions and
prototypes) and expose (robustness, security, fairness).
"""

__version__ = "0.1.0"
