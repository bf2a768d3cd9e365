import json
import os

import numpy
import pytest

from fspcr.common.checks import ConfigurationError, MissingFileError
from fspcr.dataset_readers import ManifestReader, read_truth, write_dataset, write_truth


class TestManifestReader:
    def test_round_trip(self, tmp_path, small_setting1):
        dataset, _ = small_setting1
        path = write_dataset(str(tmp_path), dataset, {"config_hash": "abc", "seed": 3})
        assert os.path.basename(path) == "manifest.json"
        restored = ManifestReader(quiet=True).read(str(tmp_path))
        numpy.testing.assert_array_equal(restored.X, dataset.X)
        numpy.testing.assert_array_equal(restored.Y, dataset.Y)
        numpy.testing.assert_array_equal(restored.grid.points, dataset.grid.points)
        assert not restored.centered

    def test_centered_datasets_are_written_on_their_original_scale(self, tmp_path, small_setting1, centered_small):
        dataset, _ = small_setting1
        write_dataset(str(tmp_path), centered_small)
        restored = ManifestReader(quiet=True).read(os.path.join(str(tmp_path), "manifest.json"))
        numpy.testing.assert_allclose(restored.X, dataset.X, atol=1e-12)

    def test_headers(self, tmp_path, linear_dataset):
        dataset, _, _ = linear_dataset
        write_dataset(str(tmp_path), dataset)
        with open(os.path.join(str(tmp_path), "X.csv")) as x_file:
            assert x_file.readline().strip() == "x1,x2,x3,x4,x5"
        with open(os.path.join(str(tmp_path), "grid.csv")) as grid_file:
            assert grid_file.readline().strip() == "t"

    def test_missing_grid_names_the_file(self, tmp_path, linear_dataset):
        dataset, _, _ = linear_dataset
        write_dataset(str(tmp_path), dataset)
        grid_path = os.path.join(str(tmp_path), "grid.csv")
        os.remove(grid_path)
        with pytest.raises(MissingFileError) as error:
            ManifestReader(quiet=True).read(str(tmp_path))
        assert grid_path in str(error.value)

    def test_manifest_without_a_key(self, tmp_path):
        with open(os.path.join(str(tmp_path), "manifest.json"), "w") as manifest:
            json.dump({"x": "X.csv", "y": "Y.csv"}, manifest)
        with pytest.raises(ConfigurationError):
            ManifestReader(quiet=True).read(str(tmp_path))

    def test_centered_flag(self, centered_small, small_setting1):
        reader = ManifestReader(quiet=True)
        grid_column = centered_small.grid.points[:, numpy.newaxis]
        dataset = reader.matrices_to_dataset(centered_small.X, centered_small.Y, grid_column, centered=True)
        assert dataset.centered
        raw, _ = small_setting1
        with pytest.raises(ConfigurationError):
            reader.matrices_to_dataset(raw.X, raw.Y, grid_column, centered=True)


class TestTruth:
    def test_round_trip(self, tmp_path, small_setting1):
        _, truth = small_setting1
        path = write_truth(str(tmp_path), truth)
        restored = read_truth(path)
        numpy.testing.assert_array_equal(restored.beta, truth.beta)
        numpy.testing.assert_array_equal(restored.v_star.columns, truth.v_star.columns)
        assert restored.true_dimension == 3

    def test_missing_field(self, tmp_path):
        path = os.path.join(str(tmp_path), "truth.json")
        with open(path, "w") as truth_file:
            json.dump({"beta": [[1.0]]}, truth_file)
        with pytest.raises(ConfigurationError):
            read_truth(path)
