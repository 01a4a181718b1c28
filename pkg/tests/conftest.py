import pytest

from interoplab import DatasetVersion, generate_dataset, synthesize_boundaries

FULL_COUNT = 222
FULL_SEED = 42
SMALL_COUNT = 6
SMALL_SEED = 1234


@pytest.fixture(scope="session")
def small_boundaries():
    # one extra boundary becomes the unscored target example
    return synthesize_boundaries(SMALL_COUNT + 1, SMALL_SEED)


@pytest.fixture(scope="session")
def small_corpora(small_boundaries, tmp_path_factory):
    root = tmp_path_factory.mktemp("corpora-small")
    return {
        version: generate_dataset(
            small_boundaries[:SMALL_COUNT],
            small_boundaries[SMALL_COUNT],
            version,
            root / version.value,
        )
        for version in DatasetVersion
    }


@pytest.fixture(scope="session")
def full_boundaries():
    return synthesize_boundaries(FULL_COUNT + 1, FULL_SEED)


@pytest.fixture(scope="session")
def full_corpora(full_boundaries, tmp_path_factory):
    root = tmp_path_factory.mktemp("corpora-full")
    return {
        version: generate_dataset(
            full_boundaries[:FULL_COUNT],
            full_boundaries[FULL_COUNT],
            version,
            root / version.value,
        )
        for version in DatasetVersion
    }
