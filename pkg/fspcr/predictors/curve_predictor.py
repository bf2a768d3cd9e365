from typing import Any, Dict, List, Optional

import numpy

from fspcr.common.checks import ConfigurationError
from fspcr.common.file_utils import read_json, write_json
from fspcr.models.model import SpcrModel, predict

JsonDict = Dict[str, Any]  # pylint: disable=invalid-name


def save_model(path: str, model: SpcrModel, provenance: Optional[JsonDict] = None) -> None:
    document = model.to_dict()
    if provenance is not None:
        document["provenance"] = provenance
    write_json(path, document)


def load_model(path: str) -> SpcrModel:
    return SpcrModel.from_dict(read_json(path))


class CurvePredictor:
    """Predictor wrapper for a fitted :class:`SpcrModel`, read from its JSON document."""
    def __init__(self, model: SpcrModel) -> None:
        self._model = model

    @property
    def model(self) -> SpcrModel:
        return self._model

    @classmethod
    def from_path(cls, path: str) -> 'CurvePredictor':
        return cls(load_model(path))

    def predict_matrix(self, X_new: numpy.ndarray) -> numpy.ndarray:
        return predict(self._model, X_new)

    def predict_json(self, json_dict: JsonDict) -> JsonDict:
        """``{"x": [...]}`` for one sample, or ``{"x": [[...], ...]}`` for several."""
        if "x" not in json_dict:
            raise ConfigurationError("prediction input needs an 'x' field")
        X_new = numpy.asarray(json_dict["x"], dtype=float)
        curves = self.predict_matrix(X_new)
        result: List[List[float]] = curves.tolist()
        return {"grid": self._model.grid.points.tolist(),
                "curve": result[0] if X_new.ndim == 1 else result}
