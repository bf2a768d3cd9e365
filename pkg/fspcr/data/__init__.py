from fspcr.data.dataset import FunctionalDataset, Grid, center, integrate_curve, trapezoid_weights
