import subprocess

import pytest


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """Simulator outputs for the bundled fig2 preset, generated once per session."""
    root = tmp_path_factory.mktemp("figkit-fixtures")
    subprocess.run(
        ["trimerpump", "simulate", "--preset", "fig2", "--dt", "0.05",
         "--out", str(root / "sim")],
        check=True, capture_output=True,
    )
    subprocess.run(
        ["trimerpump", "winding", "--preset", "fig2", "--out", str(root / "wind")],
        check=True, capture_output=True,
    )
    return root


@pytest.fixture(scope="session")
def trajectory_csv(fixture_dir):
    return next((fixture_dir / "sim").glob("trajectory_*.csv"))


@pytest.fixture(scope="session")
def manifest_json(fixture_dir):
    return next((fixture_dir / "sim").glob("manifest_*.json"))


@pytest.fixture(scope="session")
def winding_csv(fixture_dir):
    return next((fixture_dir / "wind").glob("winding_seed*.csv"))


@pytest.fixture(scope="session")
def curves_csv(fixture_dir):
    return next((fixture_dir / "wind").glob("curves_*.csv"))
