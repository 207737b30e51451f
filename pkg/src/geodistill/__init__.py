"""geodistill: turn domain textbooks into instruction-tuning data and a vetted benchmark."""

__version__ = "0.1.0"
