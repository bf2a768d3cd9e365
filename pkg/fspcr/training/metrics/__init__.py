from fspcr.training.metrics.integrated_squared_error import IntegratedSquaredError
