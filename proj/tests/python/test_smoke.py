# Copyright 2026 the pseudoqe authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import pytest

try:
    import pseudoqe as pq
except ImportError:
    import _pseudoqe as pq


def test_normalize_and_tokenize():
    assert pq.normalize("Hello,  world!") == "hello , world !"
    assert pq.tokenize("Don't stop") == ["don", "'", "t", "stop"]
    assert pq.tokenize("") == []
    assert pq.normalize("Hello", lowercase=False) == "Hello"


def test_levenshtein_script():
    res = pq.levenshtein_align(["a", "b", "c"], ["a", "x", "c"])
    assert res["cost"] == 1
    ops = [op["op"] for op in res["script"]]
    assert ops == ["match", "sub", "match"]


def test_ter_rotation_uses_one_shift():
    res = pq.ter_score(["c", "a", "b"], ["a", "b", "c"])
    assert res["total_edits"] == 1
    assert res["num_shift"] == 1
    assert res["hter"] == pytest.approx(1 / 3)
    assert res["hyp_order"] == [1, 2, 0]

    identity = pq.ter_score(["x"], ["x"])
    assert identity["total_edits"] == 0
    assert identity["hter"] == 0.0


def test_word_tags():
    tags = pq.word_tags(["a", "b", "c"], ["a", "x", "c"])
    assert tags["word"] == ["OK", "BAD", "OK"]
    assert tags["gap"] == ["OK"] * 4
    assert len(tags["interleaved"]) == 7


def test_source_tags():
    tags = pq.source_tags([(0, 0), (1, 1)], ["a", "b"], ["a", "x"], 2)
    assert tags == ["OK", "BAD"]


def test_aligner_roundtrip():
    bitext = [(["x1"], ["y1"])] * 50
    model, loglik = pq.train_aligner(bitext, iterations=3)
    assert len(loglik) == 3
    assert loglik[-1] >= loglik[0]
    assert model.viterbi(["x1"], ["y1"]) == [(0, 0)]
    row = dict(model.ttable_row("x1"))
    assert row["y1"] > 0.99


def test_symmetrize():
    links = pq.symmetrize([(0, 0), (1, 1)], [(0, 0), (1, 2)], 2, 3)
    assert links == [(0, 0), (1, 1), (1, 2)]
    assert pq.symmetrize([(0, 0)], [], 1, 1, heuristic="intersection") == []


def test_mock_noise_is_deterministic():
    tokens = ["t%d" % i for i in range(10)]
    out1, log1 = pq.mock_noise_apply(tokens, 0.4, 7, 99)
    out2, log2 = pq.mock_noise_apply(tokens, 0.4, 7, 99)
    assert out1 == out2
    assert log1 == log2
    unchanged, empty_log = pq.mock_noise_apply(tokens, 0.0, 7, 99)
    assert unchanged == tokens and empty_log == []


def test_build_mono_identity():
    corpus = ["the cat sat", "a small dog barks", "hello there friend"] * 10
    result = pq.build_mono(corpus, src_lang="en", tgt_lang="de")
    assert result["stats"]["records_emitted"] == 30
    assert result["stats"]["mean_hter"] == 0.0
    for rec in result["records"]:
        assert rec["hter"] == 0.0
        assert set(rec["mt_word_tags"]) <= {"OK"}
        assert len(rec["gap_tags"]) == len(rec["mt"]) + 1
        assert rec["meta"]["engine"] == "mock-identity"


def test_build_parallel_with_noise():
    corpus = [("a b c d e f", "a b c d e f")] * 5
    result = pq.build_parallel(
        corpus,
        src_lang="en",
        tgt_lang="de",
        engine="mock-noise",
        noise_rate=0.3,
        seed=11,
        noise_ops="s",
    )
    for rec in result["records"]:
        bad = rec["mt_word_tags"].count("BAD")
        assert rec["hter"] == pytest.approx(bad / len(rec["pe"]))


def test_errors_are_typed():
    with pytest.raises(pq.PseudoqeError):
        pq.build_mono(["hi"], src_lang="en", tgt_lang="en")
    with pytest.raises(pq.PseudoqeError):
        pq.build_mono(["", "   "], src_lang="en", tgt_lang="de")
