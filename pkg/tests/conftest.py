import pytest

from c3monge.pipeline import Engine, catalog_descriptor, get_engine, run_class


@pytest.fixture(scope="session")
def engine() -> Engine:
    return get_engine()


@pytest.fixture(scope="session")
def c3(engine):
    return engine.c3


@pytest.fixture(scope="session")
def dec(engine):
    return engine.dec


@pytest.fixture(scope="session")
def class_reports(engine):
    """run_class output for all six catalog labels, computed once."""
    labels = ["N3", "N2a", "N2a_inf", "N2b", "IV2", "F2"]
    return {label: run_class(catalog_descriptor(label), engine) for label in labels}
