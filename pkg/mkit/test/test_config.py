"""Engine settings loaded from config.yaml."""

import dataclasses
import os

import pytest
import yaml

from mkit.config import config
import mkit.config

VALID = {
    'max_order': 32, 'normal_form_order': 6, 'normalizer_headroom': 4, 'milnor_cap_quasidegree': 10,
    'quadrature_nodes': 64, 'fd_step': 1.0e-5, 'tolerance': 1.0e-6, 'condition_limit': 1.0e8,
    'parallel_processing': False, 'log_level': 'INFO', 'logs_dir': 'mkit/logs',
}


def _write(tmp_path, values) -> str:
    path = tmp_path / 'config.yaml'
    path.write_text(yaml.safe_dump(values))
    return str(path)


def test_defaults():
    assert config.max_order == 32
    assert config.normal_form_order == 6
    assert config.quadrature_nodes == 64
    assert config.tolerance == pytest.approx(1e-6)
    assert config.fd_step == pytest.approx(1e-5)


def test_shipped_file_loads_numbers_as_floats():
    shipped = os.path.join(os.path.dirname(mkit.config.__file__), 'config.yaml')
    with open(shipped) as f:
        raw = yaml.safe_load(f)
    for name in ('fd_step', 'tolerance', 'condition_limit'):
        assert isinstance(raw[name], float), name
    fresh = dataclasses.replace(config)
    fresh.load_from_yaml(shipped)
    assert fresh.condition_limit == pytest.approx(1e8)
    assert config.condition_limit == pytest.approx(1e8)


def test_load_valid_file(tmp_path):
    fresh = dataclasses.replace(config)
    fresh.load_from_yaml(_write(tmp_path, dict(VALID, max_order=12, parallel_processing=True)))
    assert fresh.max_order == 12
    assert fresh.parallel_processing is True
    assert config.max_order == 32


@pytest.mark.parametrize("field,value", [
    ('max_order', 0),
    ('quadrature_nodes', 4),
    ('tolerance', -1.0),
    ('normalizer_headroom', -2),
])
def test_critical_values_rejected(tmp_path, field, value):
    fresh = dataclasses.replace(config)
    with pytest.raises(RuntimeError, match=field):
        fresh.load_from_yaml(_write(tmp_path, dict(VALID, **{field: value})))


def test_missing_field(tmp_path):
    values = dict(VALID)
    del values['fd_step']
    with pytest.raises(RuntimeError, match="fd_step"):
        dataclasses.replace(config).load_from_yaml(_write(tmp_path, values))


def test_bad_log_level_only_warns(tmp_path):
    fresh = dataclasses.replace(config)
    fresh.load_from_yaml(_write(tmp_path, dict(VALID, log_level='LOUD')))
    assert fresh.log_level == 'LOUD'


def test_logs_path_is_absolute():
    assert config.logs_path.endswith('logs')
