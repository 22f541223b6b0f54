from pathlib import Path

import pytest

from gbsn import gogfile

DATA = Path(__file__).resolve().parent.parent / "data"


def load_spec(name):
    doc = gogfile.parse((DATA / name).read_text())
    return doc.to_spec()


@pytest.fixture(scope="session")
def spec_a():
    return load_spec("specA.gog")


@pytest.fixture(scope="session")
def spec_b():
    return load_spec("specB.gog")


@pytest.fixture(scope="session")
def spec_bs12():
    return load_spec("bs12.gog")


@pytest.fixture(scope="session")
def spec_ascend2():
    return load_spec("ascend2.gog")
