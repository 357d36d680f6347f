"""Language-model feature extraction for the hinglishqe pipeline."""

from .provider import FeatureProvider, ProviderConfig, emit_features

__version__ = "0.1.0"
