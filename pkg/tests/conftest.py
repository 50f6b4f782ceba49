import importlib.resources

import pytest

from qcsim import DeviceConfig, load_device

CONFIG_PATH = str(importlib.resources.files("qcsim").joinpath("data/reference_device.json"))


@pytest.fixture(scope="session")
def config_path() -> str:
    return CONFIG_PATH


@pytest.fixture(scope="session")
def device(config_path) -> DeviceConfig:
    """Bundled reference device: 4.0/4.1 GHz qubits (100/90 fF), 4.87 mm
    line terminated by an asymmetric SQUID, r_L = 0.02, r_C = 0.1."""
    return load_device(config_path)
