import pytest

from app.config import settings
from app.core.cache_service import cache_manager
from app.services.logical_service import load_logical
from app.services.parser_service import parse_uiml_file
from app.services.vocabulary_service import builtin_generic_vocabulary
from tests.helpers import data_path


@pytest.fixture
def sample_path():
    return data_path("sample.uiml")


@pytest.fixture
def sample_bytes(sample_path):
    with open(sample_path, "rb") as f:
        return f.read()


@pytest.fixture
def sample_doc(sample_path):
    doc, _ = parse_uiml_file(sample_path)
    return doc


@pytest.fixture
def address_form():
    return load_logical(data_path("address_form.json"))


@pytest.fixture
def generic_vocab():
    return builtin_generic_vocabulary()


@pytest.fixture
def override_settings():
    """Set settings attributes for one test and restore them afterwards"""
    saved = {}

    def apply(**values):
        for name, value in values.items():
            saved.setdefault(name, getattr(settings, name))
            setattr(settings, name, value)

    yield apply
    for name, value in saved.items():
        setattr(settings, name, value)


@pytest.fixture(autouse=True)
def clear_render_cache():
    cache_manager.clear_namespace("render")
    yield
