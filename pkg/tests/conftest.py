import numpy as np
import pytest

from fgfusion.corpus import load_offline, match_counts
from fgfusion.graphset import ingest_records
from fgfusion.keywords import expand_keywords, load_taxonomy


def data_path(name):
    import fgfusion

    return fgfusion.__path__[0] + "/data/" + name


@pytest.fixture(scope="session")
def k6_profile():
    docs = load_offline(data_path("corpus_k6.jsonl"))
    pool = expand_keywords(load_taxonomy(data_path("taxonomy_k6.txt")))
    return match_counts(docs, pool)


@pytest.fixture(scope="session")
def demo_profile():
    docs = load_offline(data_path("corpus_200.jsonl"))
    pool = expand_keywords(load_taxonomy(data_path("taxonomy.txt")))
    return match_counts(docs, pool)


@pytest.fixture(scope="session")
def demo_docs():
    return load_offline(data_path("corpus_200.jsonl"))


@pytest.fixture(scope="session")
def demo_records():
    return ingest_records(data_path("records_demo.csv")).records


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
