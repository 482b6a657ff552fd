"""Class-conditional diffusion on long-tailed 2-D/toy data, plus the
overlap-penalty training objective and the evaluation stack used to
compare plain / penalized / reweighted training."""

__version__ = "0.1.0"
