import numpy

from fspcr.common.checks import check_same_size
from fspcr.data.dataset import Grid, integrate_curve


class IntegratedSquaredError:
    """
    Accumulates ``int (Y_i(t) - Yhat_i(t))^2 dt`` over curves and reports the mean. The integral
    is the trapezoid quadrature of the grid the curves live on.
    """
    def __init__(self) -> None:
        self._total = 0.0
        self._count = 0

    def __call__(self,
                 predictions: numpy.ndarray,
                 gold_curves: numpy.ndarray,
                 grid: Grid) -> None:
        """
        Parameters
        ----------
        predictions : ``numpy.ndarray``, required.
            Predicted curves of shape (num_curves, num_points).
        gold_curves : ``numpy.ndarray``, required.
            Observed curves of the same shape.
        grid : ``Grid``, required.
        """
        predictions = numpy.atleast_2d(predictions)
        gold_curves = numpy.atleast_2d(gold_curves)
        check_same_size(predictions.shape[0], gold_curves.shape[0],
                        "number of predicted curves", "number of observed curves")
        squared = (gold_curves - predictions) ** 2
        self._total += float(integrate_curve(squared, grid).sum())
        self._count += gold_curves.shape[0]

    def get_metric(self, reset: bool = False) -> float:
        mean = self._total / self._count if self._count else 0.0
        if reset:
            self.reset()
        return mean

    def reset(self) -> None:
        self._total = 0.0
        self._count = 0
