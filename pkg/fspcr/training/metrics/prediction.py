from fspcr.common.checks import GridMismatchError
from fspcr.data.dataset import FunctionalDataset
from fspcr.models.model import SpcrModel, predict
from fspcr.training.metrics.integrated_squared_error import IntegratedSquaredError


def prediction_error(model: SpcrModel, test: FunctionalDataset) -> float:
    """
    Mean integrated squared error of the model's predictions on ``test``, on the original
    (uncentered) scale of the test curves.
    """
    if not test.grid.same_as(model.grid):
        raise GridMismatchError("test curves live on a different grid than the model")
    raw = test.uncentered()
    metric = IntegratedSquaredError()
    metric(predict(model, raw.X), raw.Y, raw.grid)
    return metric.get_metric(reset=True)
