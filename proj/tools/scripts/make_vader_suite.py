"""Regenerates data/vader_reference_suite.tsv from the vaderSentiment package."""
import random
import sys

from vaderSentiment.vaderSentiment import SentimentIntensityAnalyzer

HANDWRITTEN = [
    "I love this song so much!",
    "This is not good at all.",
    "The movie was VERY good, but the ending was terrible.",
    "I don't hate it.",
    "It was kind of okay.",
    "What a wonderful day!!!",
    "This is the worst thing ever :(",
    "Nothing special here.",
    "He is extremely happy and incredibly proud.",
    "She was not very sad.",
    "I never felt so alone",
    "The party was the bomb",
    "At least it isn't raining.",
    "The food was good but the service was bad",
    "You are the least helpful person",
    "We cried and cried all night",
    "Sunshine and rainbows, pure joy",
    "Darkness falls and fear takes hold",
    "I'm not sure if I like it?",
    "Without a doubt the best album of the year",
    "Heartbreak, tears and broken promises",
    "Dance with me, hold me tight, never let go",
    "This is kinda bad",
    "It is GREAT, really GREAT!",
    "no one cares",
    "Barely acceptable performance",
    "The band sounded fantastic?!",
    "ok",
    "I could not be happier",
    "Hate is a strong word but I really dislike it",
    "yeah right, sure",
    "The ending was a cut above the rest",
    "not bad at all",
    "Never ever going back there.",
    "Love, love, love!",
    "Sad songs make me feel so much better",
    "the lyrics are painfully beautiful",
    "angry and bitter and cold",
    "Smile though your heart is aching",
    "It's quite fun, though somewhat tiring",
]

def synthetic(rng, words):
    out = []
    fillers = ["the", "night", "we", "walk", "down", "road", "and", "you", "my", "heart",
               "very", "not", "never", "but", "so", "really", "extremely", "kind of", "barely"]
    while len(out) < 100 - len(HANDWRITTEN):
        n = rng.randint(3, 12)
        toks = [rng.choice(words) if rng.random() < 0.45 else rng.choice(fillers) for _ in range(n)]
        if rng.random() < 0.2:
            i = rng.randrange(n)
            toks[i] = toks[i].upper()
        s = " ".join(toks)
        s += rng.choice(["", "", ".", "!", "!!", "?", "?!"])
        out.append(s)
    return out

def main():
    rng = random.Random(20240601)
    an = SentimentIntensityAnalyzer()
    words = sorted(w for w in an.lexicon if w.isalpha())
    sentences = HANDWRITTEN + synthetic(rng, words)
    out = sys.stdout
    out.write("compound\tsentence\n")
    for s in sentences:
        assert "\t" not in s and s.isascii()
        out.write("%.6f\t%s\n" % (an.polarity_scores(s)["compound"], s))

if __name__ == "__main__":
    main()
