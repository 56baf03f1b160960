import json
import random
import string

import pytest

from wikimon.edit_classifier import (
    MAJOR,
    MINOR,
    TRIVIAL,
    UNAVAILABLE_DIFF,
    ClassifierConfig,
    DiffClient,
    EditClass,
    RevisionDiff,
    classify,
    compare_url,
    diff_is_stale,
    parse_compare_response,
)


def make_diff(added=(), removed=(), net=None):
    if net is None:
        net = sum(len(a.encode()) for a in added) - sum(len(r.encode()) for r in removed)
    return RevisionDiff(1, 2, tuple(added), tuple(removed), net)


class TestCompareUrl:
    def test_juniata_revisions(self):
        url = compare_url("en", 514659029, 516269072)
        assert url == (
            "http://en.wikipedia.org/w/api.php"
            "?action=compare&torev=516269072&fromrev=514659029&format=json"
        )

    def test_same_revision_valid(self):
        assert "torev=5&fromrev=5" in compare_url("de", 5, 5)

    @pytest.mark.parametrize("pair", [(0, 1), (1, 0), (-3, 7)])
    def test_nonpositive_rejected(self, pair):
        with pytest.raises(ValueError):
            compare_url("en", *pair)


class TestClassify:
    def test_living_people_removed_is_major(self):
        diff = make_diff(removed=["[[Category:Living people]]"])
        assert classify(diff, "", -30) == EditClass(MAJOR, frozenset({"living-people-removed"}))

    def test_living_people_precedes_other_rules(self):
        # also adds a paragraph; rule order keeps the fatality signal
        diff = make_diff(added=["x" * 400], removed=["foo [[Category:Living people]] bar"])
        assert classify(diff, "", 400).signals == {"living-people-removed"}

    def test_new_paragraph_is_major(self):
        diff = make_diff(added=["A new paragraph. " * 20])
        assert classify(diff, "", 340) == EditClass(MAJOR, frozenset({"new-paragraph"}))

    def test_empty_diff_zero_delta_trivial(self):
        assert classify(make_diff(), "", 0) == EditClass(TRIVIAL)

    def test_punctuation_only_trivial(self):
        diff = make_diff(removed=["Hello world"], added=["Hello, world."])
        assert classify(diff, "", 2) == EditClass(TRIVIAL)

    def test_punctuation_change_with_big_delta_not_trivial(self):
        diff = make_diff(removed=["Hello world"], added=["Hello, world."])
        assert classify(diff, "", 200).level == MINOR

    def test_tense_change_is_major(self):
        diff = make_diff(removed=["X is a singer"], added=["X was a singer"])
        assert classify(diff, "", 1) == EditClass(MAJOR, frozenset({"tense-change"}))

    def test_tense_table_variants(self):
        for old, new in [("are", "were"), ("has", "had")]:
            diff = make_diff(removed=[f"they {old} here"], added=[f"they {new} here"])
            assert classify(diff, "", 1).signals == {"tense-change"}

    def test_unrelated_substitution_not_tense(self):
        diff = make_diff(removed=["X is a singer"], added=["X is a dancer"])
        assert classify(diff, "", 0).level == MINOR

    def test_fallback_without_diff(self):
        assert classify(None, "", 0) == EditClass(TRIVIAL)
        assert classify(None, "fixed infobox", 42).level == MINOR
        assert classify(UNAVAILABLE_DIFF, "c", -8).level == MINOR

    def test_total_and_pure(self):
        diff = make_diff(removed=["a"], added=["b"])
        assert classify(diff, "c", 1) == classify(diff, "c", 1)

    def test_punctuation_mutations_all_trivial(self):
        rng = random.Random(3)
        words = ["wiki", "river", "pope", "meteor", "edit", "spike", "news"]
        misfires = 0
        for _ in range(500):
            sentence = " ".join(rng.choices(words, k=rng.randint(3, 10)))
            mutated = list(sentence)
            for _ in range(rng.randint(1, 3)):
                pos = rng.randrange(len(mutated) + 1)
                mutated.insert(pos, rng.choice(".,;:!?'\"()- "))
            mutated = "".join(mutated)
            delta = len(mutated.encode()) - len(sentence.encode())
            got = classify(make_diff(removed=[sentence], added=[mutated]), "", delta)
            if got.level != TRIVIAL:
                misfires += 1
        assert misfires == 0

    def test_threshold_config(self):
        diff = make_diff(added=["x" * 150])
        assert classify(diff, "", 150).level == MINOR
        assert classify(diff, "", 150, ClassifierConfig(new_paragraph_bytes=100)).level == MAJOR


class TestEditClassInvariants:
    def test_signals_require_major(self):
        with pytest.raises(ValueError):
            EditClass(TRIVIAL, frozenset({"tense-change"}))


class TestDiffIsStale:
    def test_mismatch_flags_stale(self):
        assert diff_is_stale(make_diff(added=["abcd"]), 3)
        assert not diff_is_stale(make_diff(added=["abcd"]), 4)
        assert not diff_is_stale(UNAVAILABLE_DIFF, 99)


COMPARE_BODY = {
    "compare": {
        "*": (
            '<tr><td class="diff-deletedline"><div>X is a singer</div></td>'
            '<td class="diff-addedline"><div>X was a singer</div></td></tr>'
            '<tr><td class="diff-addedline"><div>[[Category:2013 deaths]]</div></td></tr>'
        )
    }
}


class TestFetchDiff:
    def test_fixture_roundtrip(self, tmp_path):
        d = tmp_path / "compare" / "en"
        d.mkdir(parents=True)
        (d / "10_20.json").write_text(json.dumps(COMPARE_BODY))
        diff = DiffClient(fixture_root=tmp_path).fetch_diff("en", 10, 20)
        assert diff.available
        assert diff.added == ("X was a singer", "[[Category:2013 deaths]]")
        assert diff.removed == ("X is a singer",)

    def test_missing_fixture_degrades(self, tmp_path):
        diff = DiffClient(fixture_root=tmp_path).fetch_diff("en", 10, 20)
        assert not diff.available

    def test_same_revision_empty(self, tmp_path):
        d = tmp_path / "compare" / "en"
        d.mkdir(parents=True)
        (d / "7_7.json").write_text(json.dumps({"compare": {"*": ""}}))
        diff = DiffClient(fixture_root=tmp_path).fetch_diff("en", 7, 7)
        assert diff.added == () and diff.removed == ()

    def test_parse_compare_net_delta(self):
        diff = parse_compare_response(10, 20, COMPARE_BODY)
        assert diff.net_delta == (
            len("X was a singer") + len("[[Category:2013 deaths]]") - len("X is a singer")
        )
