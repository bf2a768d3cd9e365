from fspcr.predictors.curve_predictor import CurvePredictor, load_model, save_model
