"""Start-point temporal relation toolkit.

Library for building, annotating, and evaluating start-point temporal
relation corpora: interval/point algebra, a multi-axis corpus model,
a crowd annotation engine with gold-based quality control, agreement
metrics, corpus format converters, and a linear baseline classifier.
"""

__version__ = "0.1.0"
