"""
Pytest configuration and fixtures for genlame tests.
"""

import sys
from pathlib import Path

import pytest

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from src.elliptic.gen_jacobi import ModulusPair  # noqa: E402
from src.spectral.catalog import catalog  # noqa: E402

# Modulus pairs at which the catalog is checked
REFERENCE_MODULI = [(0.8, 0.3), (0.6, 0.5), (0.9, 0.1)]


@pytest.fixture
def moduli():
    """The default modulus pair k1 = 0.8, k2 = 0.3."""
    return ModulusPair(0.8, 0.3)


@pytest.fixture(params=REFERENCE_MODULI, ids=lambda pair: f"k1={pair[0]},k2={pair[1]}")
def reference_moduli(request):
    """Each reference modulus pair in turn."""
    return ModulusPair(*request.param)


@pytest.fixture(scope="session")
def catalog_entries():
    """The fifteen polynomial eigenpairs."""
    return catalog()


@pytest.fixture
def temp_log_dir(tmp_path):
    """Create temporary directory for logging tests."""
    log_dir = tmp_path / "logs"
    log_dir.mkdir()
    return log_dir
