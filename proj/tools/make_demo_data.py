#!/usr/bin/env python3
"""Regenerates the bundled demo data under data/demo.

Writes demo.tsv (60 synthetic tweets with sarcasm and sentiment labels),
embeddings.vec (8-dim word2vec text format) and context.tsv (16-dim toy
context vectors keyed by tweet id). Output is deterministic.
"""

import argparse
import pathlib
import random

POSITIVE = ["رائع", "جميل", "ممتاز", "سعيد", "احب", "افضل", "حلو", "نجاح", "فرح", "مبدع"]
NEGATIVE = ["سيء", "حزين", "فاشل", "كارثه", "مزعج", "اكره", "غاضب", "ضعيف", "خساره", "ممل"]
TOPICS = ["اليوم", "الاجتماع", "الساعه", "الطريق", "المدينه", "الخبر", "الاسبوع", "التقرير",
          "المباراه", "الجامعه", "القطار", "المطعم"]
SARCASM_CUES = ["طبعا", "عبقري", "تحفه", "برافو", "هايل", "اكيد"]
# In the vocabulary but never used in a tweet.
DISTRACTORS = ["سماء", "بحر", "كتاب", "شجره", "نافذه", "قلم", "باب", "جبل"]
# Used in tweets but left out of the vocabulary.
OOV_WORDS = ["محمد", "تويتر", "فيسبوك", "سامي"]

# Surface forms that normalize to the vocabulary spelling.
SURFACE = {
    "احب": "أحب", "افضل": "أفضل", "كارثه": "كارثة", "اكره": "أكره", "خساره": "خسارة",
    "المدينه": "المدينة", "الساعه": "الساعة", "المباراه": "المباراة", "الجامعه": "الجامعة",
    "تحفه": "تحفة", "اكيد": "أكيد",
}
EMOJI = {"POS": ["😍", "👍", "❤️", "🌹"], "NEG": ["😡", "😢", "💔"], "NEU": ["🙄"]}
EMOJI_PHRASE_CLASS = {"اعجاب": 0, "ممتاز": 0, "حب": 0, "ورده": 0, "غضب": 1, "حزن": 1, "ملل": 2,
                      "ضحك": 3, "تصفيق": 3}
FATHA, SHADDA, DAMMA = "َ", "ّ", "ُ"
DIALECTS = ["msa", "egypt", "gulf", "levant", "maghreb"]


def decorate_word(word, rng):
    surface = SURFACE.get(word, word)
    roll = rng.random()
    if roll < 0.15 and len(surface) > 2:
        return surface[:2] + FATHA + surface[2:]
    if roll < 0.25 and len(surface) > 3:
        return surface[:2] + "ــ" + surface[2:]
    if roll < 0.30:
        return surface[:1] + SHADDA + DAMMA + surface[1:]
    return surface


def make_tweet(sentiment, sarcastic, rng, index):
    words = []
    if sentiment == "POS":
        words += rng.sample(POSITIVE, rng.randint(2, 3))
    elif sentiment == "NEG":
        words += rng.sample(NEGATIVE, rng.randint(2, 3))
    words += rng.sample(TOPICS, rng.randint(1, 2) if sentiment != "NEU" else rng.randint(3, 4))
    if sarcastic:
        words += rng.sample(SARCASM_CUES, rng.randint(1, 2))
    if rng.random() < 0.3:
        words.append(rng.choice(OOV_WORDS))
    if rng.random() < 0.4:
        words.append(rng.choice(["في", "من", "هذا", "مع", "كان"]))
    rng.shuffle(words)
    parts = [decorate_word(w, rng) for w in words]
    if rng.random() < 0.3:
        k = rng.randrange(len(parts))
        parts[k] = "#" + parts[k]
    if rng.random() < 0.35:
        parts.insert(0, "@user_%d" % index)
    if rng.random() < 0.5:
        parts.append(rng.choice(EMOJI[sentiment]))
    if sarcastic and rng.random() < 0.5:
        parts.append(rng.choice(["😂", "👏"]))
    if rng.random() < 0.25:
        parts.append("https://t.co/demo%d" % index)
    text = " ".join(parts)
    if rng.random() < 0.4:
        text += rng.choice(["!", "!!", "؟", "...", "،"])
    return text


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "demo"))
    ap.add_argument("--seed", type=int, default=20240607)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    # 20 per sentiment; 20 sarcastic, mostly negative.
    sarcastic_count = {"NEG": 12, "NEU": 5, "POS": 3}
    rows = []
    for sentiment in ["NEG", "NEU", "POS"]:
        for k in range(20):
            rows.append((sentiment, k < sarcastic_count[sentiment]))
    rng.shuffle(rows)

    tweets = []
    for i, (sentiment, sarcastic) in enumerate(rows, start=1):
        tid = "demo-%03d" % i
        tweets.append((tid, make_tweet(sentiment, sarcastic, rng, i), sarcastic, sentiment,
                       rng.choice(DIALECTS)))

    with open(out / "demo.tsv", "w", encoding="utf-8", newline="") as fh:
        fh.write("id\ttext\tsarcasm\tsentiment\tdialect\n")
        for tid, text, sarcastic, sentiment, dialect in tweets:
            fh.write("%s\t%s\t%s\t%s\t%s\n" % (tid, text, "TRUE" if sarcastic else "FALSE", sentiment, dialect))

    def vec(direction, scale=1.0, noise=0.15):
        v = [rng.gauss(0.0, noise) for _ in range(8)]
        if direction is not None:
            v[direction] += scale
        return v

    vocab = []
    vocab += [(w, vec(0)) for w in POSITIVE]
    vocab += [(w, vec(1)) for w in NEGATIVE]
    vocab += [(w, vec(2, 0.5)) for w in TOPICS]
    vocab += [(w, vec(3)) for w in SARCASM_CUES]
    vocab += [(w, vec(EMOJI_PHRASE_CLASS[w])) for w in EMOJI_PHRASE_CLASS if w != "ممتاز"]
    vocab += [(w, vec(None, noise=0.4)) for w in DISTRACTORS]
    with open(out / "embeddings.vec", "w", encoding="utf-8", newline="") as fh:
        fh.write("%d 8\n" % len(vocab))
        for word, v in vocab:
            fh.write(word + " " + " ".join("%.6f" % x for x in v) + "\n")

    sentiment_dim = {"POS": 0, "NEG": 1, "NEU": 2}
    with open(out / "context.tsv", "w", encoding="utf-8", newline="") as fh:
        for tid, _, sarcastic, sentiment, _ in tweets:
            v = [rng.gauss(0.0, 0.3) for _ in range(16)]
            v[sentiment_dim[sentiment]] += 0.5
            if sarcastic:
                v[3] += 0.5
            fh.write(tid + "\t" + ",".join("%.6f" % x for x in v) + "\n")


if __name__ == "__main__":
    main()
