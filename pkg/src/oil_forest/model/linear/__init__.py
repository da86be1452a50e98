from .least_squares import fit_ar1, fit_ols, least_squares_qr, linear_predict, rmse

__all__ = ["fit_ar1", "fit_ols", "least_squares_qr", "linear_predict", "rmse"]
