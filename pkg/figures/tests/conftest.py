import pytest

from figdata import gaussian_snapshot


@pytest.fixture
def make_snapshot(tmp_path):
    def _write(name="snap.bin", **kwargs):
        path = tmp_path / name
        path.write_bytes(gaussian_snapshot(**kwargs))
        return path
    return _write
