import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("quick", parent=settings.get_profile("repo"), max_examples=15)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    # landmark tables are cached per test session, never in the user's home
    root = tmp_path_factory.getbasetemp() / "landmark-cache"
    monkeypatch.setenv("MGPF_CACHE_DIR", str(root))
