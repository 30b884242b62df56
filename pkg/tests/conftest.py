import pytest


@pytest.fixture
def write_file(tmp_path):
    """Grava `content` em tmp_path/name e devolve o caminho."""
    def _write(name, content):
        path = tmp_path / name
        path.write_text(content, encoding='utf-8')
        return path
    return _write
