"""
Shared pytest configuration.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: end-to-end training runs and timing checks (deselect with -m 'not slow')")
