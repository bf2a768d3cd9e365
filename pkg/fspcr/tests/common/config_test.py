import json

import pytest
from pyhocon import ConfigTree

from fspcr.common.checks import ConfigurationError, MissingFileError
from fspcr.common.config import as_config, check_keys, config_hash, load_config, reading, sub_config, to_dict


class TestLoadConfig:
    def test_parses_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"type": "spcr", "k_max": 3, "band_config": {"n_splits": 5}}))
        config = load_config(str(path))
        assert config.get_int("k_max") == 3
        assert config.get_int("band_config.n_splits") == 5
        assert to_dict(config) == {"type": "spcr", "k_max": 3, "band_config": {"n_splits": 5}}

    def test_parses_hocon(self, tmp_path):
        path = tmp_path / "config.conf"
        path.write_text("type = upcr\nk_max = 4\n")
        assert to_dict(load_config(str(path))) == {"type": "upcr", "k_max": 4}

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFileError):
            load_config(str(tmp_path / "absent.json"))

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{\"k_max\": ")
        with pytest.raises(ConfigurationError):
            load_config(str(path))


class TestConfigHelpers:
    def test_as_config(self):
        config = as_config({"k_max": "4", "flag": "true", "nested": {"a": 1}})
        assert isinstance(config, ConfigTree)
        assert config.get_int("k_max") == 4
        assert config.get_bool("flag") is True
        assert sub_config(config, "nested").get_int("a") == 1
        assert sub_config(config, "absent") is None
        assert to_dict(as_config(None)) == {}

    def test_sub_config_must_be_a_block(self):
        with pytest.raises(ConfigurationError):
            sub_config(as_config({"nested": 3}), "nested")

    def test_unknown_keys(self):
        check_keys(as_config({"a": 1}), ("a", "b"), "Test")
        with pytest.raises(ConfigurationError):
            check_keys(as_config({"typo": 1}), ("a", "b"), "Test")

    def test_reading_wraps_missing_keys(self):
        with pytest.raises(ConfigurationError):
            with reading("Test"):
                as_config({}).get_int("seed")


class TestConfigHash:
    def test_independent_of_key_order(self):
        assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})

    def test_changes_with_content(self):
        assert config_hash({"a": 1}) != config_hash({"a": 2})

    def test_same_for_a_tree_and_its_dict(self):
        assert config_hash(as_config({"a": 1, "b": {"c": [1, 2]}})) == config_hash({"b": {"c": [1, 2]}, "a": 1})
