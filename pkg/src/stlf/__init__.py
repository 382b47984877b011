"""Short-term load forecasting with neural, fuzzy and fuzzy-neural models."""
