"""Enhanced generalized OFDM index modulation: mappers, PHY chain,
autoencoder codec, closed-form analysis and Monte Carlo harness."""

__version__ = "0.1.0"
