import pytest
from fastapi.testclient import TestClient

from noveltysidecar.app import create_app
from noveltysidecar.config import ServingConfig


@pytest.fixture()
def echo_config():
    return ServingConfig(model="echo", max_tokens=500, max_request_pairs=50)


@pytest.fixture()
def echo_client(echo_config):
    app = create_app(echo_config)
    with TestClient(app, raise_server_exceptions=False) as client:
        yield client
