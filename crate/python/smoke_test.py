"""Smoke test for the tibcorpus Python bindings.

Build and install the extension first:

    cd crates/python && maturin develop --release

then run `python python/smoke_test.py` from the repository root.
"""

import json
import pathlib
import sys
import tempfile

import tibcorpus

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURE = ROOT / "crates" / "core" / "tests" / "fixtures" / "golden_input.jsonl"

BO = "བོད་ཀྱི་སྐད་ཡིག་ནི་རྒྱ་ཆེ། ང་ཚོས་དེ་ལ་སློབ་སྦྱོང་བྱེད། "


def check_segmentation():
    assert tibcorpus.words("ཀ་ཁ་ག") == ["ཀ", "ཁ", "ག"]
    assert tibcorpus.sentences("ཀ་ཁ། ག་ང།") == ["ཀ་ཁ།", "ག་ང།"]


def check_langid():
    scores = tibcorpus.classify(BO * 3)
    assert scores[0][0] == "bo", scores
    assert abs(sum(c for _, c in scores) - 1.0) < 1e-9
    try:
        tibcorpus.classify("")
    except ValueError:
        pass
    else:
        raise AssertionError("empty text must raise")


def check_quality():
    spam = tibcorpus.quality(" ".join(["ab cd"] * 40))
    assert spam["verdict"] == "removed", spam
    assert "reason" in spam and spam["measurements"]


def check_dedup():
    base = (BO * 20).split(" ")
    a = " ".join(f"{w}{i}" for i, w in enumerate(base))
    clusters = tibcorpus.near_duplicates([a, "something else entirely here today", a])
    assert clusters == [[0, 2]], clusters


def check_tokenizer(tmp):
    texts = [BO * 20, "hello world " * 50]
    tok = tibcorpus.Tokenizer.train(texts, vocab_size=400)
    # Training stops early once no pair is left to merge.
    assert 256 < tok.vocab_size <= 401
    assert tok.special_id("<|endoftext|>") == tok.vocab_size - 1
    text = BO + " mixed 🙂"
    assert tok.decode(tok.encode(text)) == text
    assert len(tok.encode(BO)) < len(BO.encode("utf-8"))
    merged = tibcorpus.Tokenizer.byte_level().merge(tok)
    assert merged.decode(merged.encode(text)) == text
    out = pathlib.Path(tmp) / "vocab"
    merged.save(str(out))
    again = tibcorpus.Tokenizer.load(str(out))
    assert again.fingerprint == merged.fingerprint
    assert again.encode(text) == merged.encode(text)


def check_pipeline(tmp):
    kept = pathlib.Path(tmp) / "kept.jsonl"
    report = tibcorpus.run_pipeline(str(FIXTURE), str(kept))
    assert report["input_documents"] == 1000
    manifest = json.loads((FIXTURE.parent / "golden_manifest.json").read_text())
    assert report["output_documents"] == manifest["kept"]
    assert sum(1 for _ in kept.open()) == manifest["kept"]
    try:
        tibcorpus.run_pipeline(str(pathlib.Path(tmp) / "missing.jsonl"), str(kept))
    except OSError:
        pass
    else:
        raise AssertionError("missing input must raise OSError")


def main():
    check_segmentation()
    check_langid()
    check_quality()
    check_dedup()
    with tempfile.TemporaryDirectory() as tmp:
        check_tokenizer(tmp)
        check_pipeline(tmp)
    print("python smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
