import pytest

import synthgen
from bimine.classifier import train
from bimine.corpus import SeedCorpus, load_seed_corpus
from bimine.lexicon import load_lexicon

VOCAB_SIZE = 500
SEED_PAIRS = 2000


@pytest.fixture(scope="session")
def vocab():
    return synthgen.make_vocab(VOCAB_SIZE)


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("synth")


@pytest.fixture(scope="session")
def lexicon_path(data_dir, vocab):
    path = data_dir / "lexicon.tsv"
    synthgen.write_lexicon_tsv(str(path), vocab)
    return str(path)


@pytest.fixture(scope="session")
def lex(lexicon_path):
    return load_lexicon(lexicon_path, synthgen.SRC_LANG, synthgen.TGT_LANG)


@pytest.fixture(scope="session")
def seed_paths(data_dir, vocab):
    pairs = synthgen.make_seed_corpus(SEED_PAIRS, vocab, seed=11, noise=0.1)
    src = data_dir / "seed.src"
    tgt = data_dir / "seed.tgt"
    synthgen.write_seed_files(pairs, str(src), str(tgt))
    return str(src), str(tgt)


@pytest.fixture(scope="session")
def seed_corpus(seed_paths):
    return load_seed_corpus(*seed_paths)


@pytest.fixture(scope="session")
def forward_model(seed_corpus, lex):
    return train(seed_corpus, lex, seed=42)


@pytest.fixture(scope="session")
def backward_model(seed_corpus, lex):
    swapped = SeedCorpus(
        pairs=[(t, s) for s, t in seed_corpus.pairs], dropped=seed_corpus.dropped
    )
    return train(swapped, lex.reversed(), seed=43)


@pytest.fixture(scope="session")
def comparable_docs(vocab):
    return synthgen.make_comparable_corpus(40, vocab, seed=21, noise=0.1)


@pytest.fixture(scope="session")
def docs_path(data_dir, comparable_docs):
    path = data_dir / "docs.jsonl"
    synthgen.write_docs_jsonl(str(path), comparable_docs)
    return str(path)


@pytest.fixture(scope="session")
def gold_path(data_dir, comparable_docs):
    path = data_dir / "gold.jsonl"
    synthgen.write_docs_jsonl(str(path), comparable_docs[:10], with_gold=True)
    return str(path)
