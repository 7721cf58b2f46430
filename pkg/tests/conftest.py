def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: desk-scale but multi-second enumeration checks")
