import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitextforge.corpus import TextDocument
from bitextforge.docalign import align_documents, score_pair, size_ratio, write_manifest


def make(doc_id, text, pad_to=None):
    lines = text.split("\n")
    if pad_to is not None:
        # filler made of short words and no digits: never an anchor
        need = pad_to - sum(len(l) for l in lines)
        if need > 0:
            lines.append(("xy " * (need // 3 + 1))[:need])
    return TextDocument(doc_id, tuple(lines))


def test_identical_documents_score_one():
    d = make("a", "Report 2020 on Covid in Galway")
    assert score_pair(d, make("b", d.text)) == pytest.approx(1.0)


def test_no_anchors_scores_zero():
    assert score_pair(make("a", "the cat sat"), make("b", "an cat ar an mata")) == 0.0
    assert score_pair(make("a", "Galway report"), make("b", "tuarascáil Gaillimh")) == 0.0
    assert score_pair(make("a", ""), make("b", "")) == 0.0


def test_decoy_scores_lower():
    src = make("s", "Tuarascáil 2020 covid")
    tgt = make("t", "Report 2020")
    decoy = make("d", "Report 1999")
    assert score_pair(src, tgt) > score_pair(src, decoy)


def test_number_separators_are_ignored():
    assert score_pair(make("a", "cost 1,234.5 euro"), make("b", "costas 1.234,5 euro")) == pytest.approx(1.0)


def test_score_symmetric_and_bounded():
    a, b = make("a", "Cork 2019 2020 report"), make("b", "Corcaigh 2020 tuarascáil report report")
    assert score_pair(a, b) == pytest.approx(score_pair(b, a))
    assert 0.0 <= score_pair(a, b) <= 1.0


def test_single_pair_accepted():
    src = make("en/a", "HSE 2021", pad_to=800)
    tgt = make("ga/a", "FSS 2021", pad_to=1000)
    res = align_documents([src], [tgt])
    assert [(p.source_id, p.target_id) for p in res.pairs] == [("en/a", "ga/a")]
    assert res.pairs[0].size_ratio == pytest.approx(0.8)
    assert res.unmapped == []


def test_ratio_out_of_bounds():
    src = make("en/a", "HSE 2021", pad_to=2000)
    tgt = make("ga/a", "FSS 2021", pad_to=1000)
    res = align_documents([src], [tgt])
    assert res.pairs == [] and res.unmapped == ["en/a", "ga/a"]


def test_no_stealing():
    a = make("en/A", "2020 2021 2022 Galway", pad_to=500)
    b = make("en/B", "2020 Mayo", pad_to=500)
    t = make("ga/T", "2020 2021 2022 Galway", pad_to=500)
    res = align_documents([a, b], [t])
    assert [(p.source_id, p.target_id) for p in res.pairs] == [("en/A", "ga/T")]
    assert res.unmapped == ["en/B"]


def test_threshold_respected():
    a = make("en/a", "2020 " + " ".join(f"w{i}" for i in range(50)), pad_to=400)
    t = make("ga/t", "2020 1999 1998 1997 1996 1995 1994", pad_to=400)
    s = score_pair(a, t)
    assert align_documents([a], [t], threshold=s + 0.01).pairs == []


def test_zero_score_pairs_never_accepted():
    res = align_documents([make("en/a", "nothing here")], [make("ga/a", "rud ar bith")], threshold=0.0)
    assert res.pairs == []


def test_empty_inputs():
    res = align_documents([], [])
    assert res.pairs == [] and res.unmapped == [] and res.iterations_used == 0


def test_duplicate_ids_rejected():
    with pytest.raises(ValueError):
        align_documents([make("x", "1")], [make("x", "1")])


def test_later_iteration_recovers_pair():
    # "Galway" is common to every document, so IDF down-weights it in the full pool; once the
    # strong pair is taken, the remaining documents are re-scored over a smaller pool.
    a = make("en/a", "Galway 1111 2222 3333 4444", pad_to=300)
    ta = make("ga/a", "Galway 1111 2222 3333 4444", pad_to=300)
    b = make("en/b", "Galway 5555", pad_to=300)
    tb = make("ga/b", "Galway 6666", pad_to=300)
    # full pool: idf(galway) = 1, idf(5555) = ln(5/2) + 1, cosine(b, tb) = 1 / (idf(5555)^2 + 1) ~ 0.214
    # two-document pool: idf(5555) = ln(3/2) + 1, cosine ~ 0.336
    res = align_documents([a, b], [ta, tb], threshold=0.3)
    assert [(p.source_id, p.target_id, p.iteration) for p in res.pairs] == [
        ("en/a", "ga/a", 1), ("en/b", "ga/b", 2)]
    assert res.pairs[1].score == pytest.approx(1 / ((math.log(1.5) + 1) ** 2 + 1))
    assert res.iterations_used == 2
    assert align_documents([a, b], [ta, tb], threshold=0.3, max_iter=1).unmapped == ["en/b", "ga/b"]


anchor = st.sampled_from([str(n) for n in range(1990, 2030)] + ["galway", "covid", "dublin", "health", "report"])
docs_strategy = st.lists(st.lists(anchor, min_size=0, max_size=8), min_size=0, max_size=5)


def build(anchor_lists, prefix, rng):
    out = []
    for k, anchors in enumerate(anchor_lists):
        out.append(make(f"{prefix}/{k}", " ".join(anchors), pad_to=rng.randint(300, 500)))
    return out


@settings(max_examples=80, deadline=None)
@given(docs_strategy, docs_strategy, st.integers(0, 1000), st.floats(0.0, 0.5))
def test_matching_invariants(src_anchors, tgt_anchors, seed, threshold):
    rng = random.Random(seed)
    sources, targets = build(src_anchors, "en", rng), build(tgt_anchors, "ga", rng)
    res = align_documents(sources, targets, threshold=threshold)
    used_src = [p.source_id for p in res.pairs]
    used_tgt = [p.target_id for p in res.pairs]
    assert len(set(used_src)) == len(used_src) and len(set(used_tgt)) == len(used_tgt)
    all_ids = {d.doc_id for d in sources + targets}
    assert set(used_src) | set(used_tgt) | set(res.unmapped) == all_ids
    assert not (set(used_src) | set(used_tgt)) & set(res.unmapped)
    assert res.iterations_used <= 3
    for p in res.pairs:
        assert 0.75 <= p.size_ratio <= 1.33
        assert p.score >= threshold and p.score > 0

    # permutation invariance
    rng.shuffle(sources)
    rng.shuffle(targets)
    assert align_documents(sources, targets, threshold=threshold).pairs == res.pairs

    # iterating past the fixpoint changes nothing
    more = align_documents(sources, targets, threshold=threshold, max_iter=10)
    if res.iterations_used < 3:
        assert more.pairs == res.pairs


def test_size_ratio():
    assert size_ratio(make("a", "abcd"), make("b", "ab")) == 2.0
    assert size_ratio(make("a", "abcd"), make("b", "")) == math.inf


def test_manifest(tmp_path):
    src = TextDocument("en/a", ("HSE 2021", "x" * 790), origin="in/en/a.txt")
    tgt = TextDocument("ga/a", ("FSS 2021", "y" * 992), origin="in/ga/a.txt")
    extra = TextDocument("ga/b", ("nothing",), origin="in/ga/b.txt")
    res = align_documents([src], [tgt, extra])
    path = tmp_path / "docalign.jsonl"
    write_manifest(res, {d.doc_id: d for d in (src, tgt, extra)}, path)
    rows = [json.loads(l) for l in path.read_text(encoding="utf-8").splitlines()]
    assert rows[0]["source_path"] == "in/en/a.txt" and rows[0]["target_path"] == "in/ga/a.txt"
    assert set(rows[0]) >= {"score", "size_ratio", "iteration"}
    assert rows[1] == {"unmapped": "ga/b", "path": "in/ga/b.txt"}
