import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-scale acceptance and protocol runs")
