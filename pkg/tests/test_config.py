"""
Configuration tests: caps from lab_config.yaml, the LDLAB_CAP override,
experiment defaults and missing files.
"""
import pytest

from ldlab import config


class TestCaps:
    """caps section and environment override"""

    def test_defaults(self):
        assert config.cap('field_order') == 4096
        assert config.cap('enumeration') == 2 ** 20
        assert config.cap('exhaustive_received_words') == 65536

    def test_unknown_cap(self):
        with pytest.raises(KeyError):
            config.cap('nonsense')

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(config.CAP_ENV_VAR, '128')
        assert config.cap('enumeration') == 128
        assert config.cap('advice') == 128
        # only the enumeration-style caps follow the variable
        assert config.cap('field_order') == 4096

    def test_env_override_must_be_integer(self, monkeypatch):
        monkeypatch.setenv(config.CAP_ENV_VAR, 'lots')
        with pytest.raises(ValueError):
            config.cap('enumeration')

    def test_tolerances_and_logging(self):
        assert config.tolerance('float_abs') == pytest.approx(1e-12)
        assert config.tolerance('standard_errors') == 3.0
        assert config.log_level() == 'INFO'

    def test_cached(self):
        assert config.load_config() is config.load_config()


class TestExperimentDefaults:
    """experiments.yaml"""

    def test_names(self):
        names = config.experiment_names()
        assert len(names) == 17
        assert 'ghw_hadamard' in names
        assert len(set(names)) == len(names)

    def test_every_experiment_has_a_seed(self):
        for name in config.experiment_names():
            assert isinstance(config.experiment_defaults(name).get('seed'), int)

    def test_unknown_experiment_is_empty(self):
        assert config.experiment_defaults('missing') == {}

    def test_defaults_are_copies(self):
        block = config.experiment_defaults('ghw_hadamard')
        block['seed'] = -1
        assert config.experiment_defaults('ghw_hadamard')['seed'] != -1


class TestMissingFiles:
    """Missing YAML raises FileNotFoundError"""

    def test_missing_config(self, monkeypatch, tmp_path):
        monkeypatch.setattr(config, 'CFG_PATH', tmp_path / 'absent.yaml')
        config.reset_cache()
        with pytest.raises(FileNotFoundError):
            config.load_config()

    def test_empty_file_is_empty_config(self, monkeypatch, tmp_path):
        path = tmp_path / 'empty.yaml'
        path.write_text('', encoding='utf-8')
        monkeypatch.setattr(config, 'CFG_PATH', path)
        config.reset_cache()
        assert config.load_config() == {}
        assert config.log_level() == 'INFO'
