import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bimine.errors import DataError
from bimine.lexicon import Lexicon, coverage, load_lexicon


def write_lex(tmp_path, lines, name="lex.tsv"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


class TestLoadLexicon:
    def test_single_entry(self, tmp_path):
        path = write_lex(tmp_path, ["hund\tdog\t0.9"])
        lex = load_lexicon(path, src_lang="de", tgt_lang="en")
        assert lex.translations("hund") == [("dog", 0.9)]
        assert lex.direction == ("de", "en")

    def test_multiple_translations_sorted_desc(self, tmp_path):
        path = write_lex(tmp_path, ["bank\tbench\t0.3", "bank\tbank\t0.6"])
        lex = load_lexicon(path)
        assert lex.translations("bank") == [("bank", 0.6), ("bench", 0.3)]

    def test_duplicate_entry_keeps_max_probability(self, tmp_path):
        path = write_lex(tmp_path, ["a\tb\t0.4", "a\tb\t0.7", "a\tb\t0.5"])
        lex = load_lexicon(path)
        assert lex.translations("a") == [("b", 0.7)]

    def test_comments_and_blanks_ignored(self, tmp_path):
        path = write_lex(tmp_path, ["# header", "", "a\tb\t1.0", "# trailer"])
        lex = load_lexicon(path)
        assert lex.translations("a") == [("b", 1.0)]

    def test_words_normalized(self, tmp_path):
        path = write_lex(tmp_path, ["Hund\tDog\t0.9"])
        lex = load_lexicon(path)
        assert lex.translations("hund") == [("dog", 0.9)]

    def test_unknown_word_empty(self, tmp_path):
        path = write_lex(tmp_path, ["a\tb\t0.9"])
        assert load_lexicon(path).translations("zzz") == []

    @pytest.mark.parametrize(
        "bad",
        ["a\tb\t1.5", "a\tb\t0", "a\tb\t-0.2", "a\tb\tnan"],
    )
    def test_out_of_range_probability_rejected(self, tmp_path, bad):
        path = write_lex(tmp_path, ["ok\tfine\t0.5", bad])
        with pytest.raises(DataError, match="line 2"):
            load_lexicon(path)

    def test_too_few_columns_rejected(self, tmp_path):
        path = write_lex(tmp_path, ["a\tb"])
        with pytest.raises(DataError, match="line 1"):
            load_lexicon(path)

    def test_non_numeric_probability_rejected(self, tmp_path):
        path = write_lex(tmp_path, ["a\tb\thigh"])
        with pytest.raises(DataError, match="line 1"):
            load_lexicon(path)

    def test_empty_word_rejected(self, tmp_path):
        path = write_lex(tmp_path, [" \tb\t0.5"])
        with pytest.raises(DataError, match="line 1"):
            load_lexicon(path)


class TestReversed:
    def _lex(self):
        return Lexicon(
            direction=("xx", "yy"),
            entries={
                "a": [("p", 0.9), ("q", 0.2)],
                "b": [("p", 0.5)],
            },
        )

    def test_inverts_direction_and_entries(self):
        rev = self._lex().reversed()
        assert rev.direction == ("yy", "xx")
        assert rev.translations("p") == [("a", 0.9), ("b", 0.5)]
        assert rev.translations("q") == [("a", 0.2)]

    def test_round_trip_is_cached_identity(self):
        lex = self._lex()
        rev = lex.reversed()
        assert lex.reversed() is rev
        assert rev.reversed() is lex


class TestCoverage:
    def _lex(self):
        return Lexicon(
            direction=("xx", "yy"),
            entries={"hund": [("dog", 0.9)], "katze": [("cat", 0.8)]},
        )

    def test_full_coverage(self):
        assert coverage(self._lex(), ["hund", "katze"], ["dog", "cat"]) == 1.0

    def test_no_coverage(self):
        assert coverage(self._lex(), ["hund"], ["fish"]) == 0.0

    def test_half_coverage(self):
        assert coverage(self._lex(), ["hund", "katze"], ["dog", "fish"]) == 0.5

    def test_non_alphabetic_tokens_excluded_from_denominator(self):
        lex = self._lex()
        assert coverage(lex, ["hund", "42", "."], ["dog"]) == 1.0

    def test_no_alphabetic_source_tokens(self):
        assert coverage(self._lex(), ["42", "."], ["dog"]) == 0.0

    def test_case_insensitive(self):
        assert coverage(self._lex(), ["Hund"], ["DOG"]) == 1.0

    @given(
        src=st.lists(st.sampled_from(["hund", "katze", "xyz"]), max_size=6),
        tgt=st.lists(st.sampled_from(["dog", "cat", "fish"]), max_size=6),
        extra=st.sampled_from(["dog", "cat", "fish"]),
    )
    @settings(max_examples=200)
    def test_monotone_in_target_tokens(self, src, tgt, extra):
        lex = self._lex()
        assert coverage(lex, src, tgt + [extra]) >= coverage(lex, src, tgt)

    @given(
        src=st.lists(st.sampled_from(["hund", "katze", "xyz", "7"]), max_size=6),
        tgt=st.lists(st.sampled_from(["dog", "cat", "fish"]), max_size=6),
    )
    @settings(max_examples=200)
    def test_range(self, src, tgt):
        val = coverage(self._lex(), src, tgt)
        assert 0.0 <= val <= 1.0
