from .generator import TrueFunction, ar1_features, generate, log_price_path

__all__ = ["TrueFunction", "ar1_features", "generate", "log_price_path"]
