"""Hand-built fixtures shared by the unit and acceptance tests."""

from sectag.session import TaggedTranscript

# word -> phones, fixed so that each ratio below can be worked out by hand
PRONUNCIATIONS = {
    "cat": ("K", "AE", "T"), "dog": ("D", "AO", "G"), "bat": ("B", "AE", "T"),
    "cap": ("K", "AE", "P"), "to": ("T", "UW"), "do": ("D", "UW"),
    "me": ("M", "IY"), "he": ("HH", "IY"), "you": ("Y", "UW"),
    "in": ("IH", "N"), "on": ("AA", "N"), "at": ("AE", "T"),
    "there": ("DH", "EH", "R"), "their": ("DH", "EH", "R"),
    "night": ("N", "AY", "T"), "knight": ("N", "AY", "T"), "kite": ("K", "AY", "T"),
    "sing": ("S", "IH", "NG"), "sting": ("S", "T", "IH", "NG"),
    "bake": ("B", "EY", "K"), "cake": ("K", "EY", "K"),
    "boat": ("B", "OW", "T"), "coat": ("K", "OW", "T"), "meet": ("M", "IY", "T"),
    "stop": ("S", "T", "AA", "P"), "spot": ("S", "P", "AA", "T"), "shop": ("SH", "AA", "P"),
    "hello": ("HH", "AH", "L", "OW"), "yellow": ("Y", "EH", "L", "OW"),
    "zoo": ("Z", "UW"), "cue": ("K", "Y", "UW"), "up": ("AH", "P"), "own": ("OW", "N"),
    "dig": ("D", "IH", "G"), "log": ("L", "AO", "G"),
}

# (ref, hyp, phone edit distance / longer length, kept?)
FILTER_CASES = [
    ("cat", "dog", 3 / 3, False),
    ("cat", "bat", 1 / 3, True),
    ("cat", "cap", 1 / 3, True),
    ("to", "do", 1 / 2, True),
    ("me", "he", 1 / 2, True),
    ("me", "you", 2 / 2, False),
    ("in", "on", 1 / 2, True),
    ("in", "at", 2 / 2, False),
    ("there", "their", 0 / 3, True),
    ("night", "knight", 0 / 3, True),
    ("night", "kite", 1 / 3, True),
    ("sing", "sting", 1 / 4, True),
    ("bake", "cake", 1 / 3, True),
    ("boat", "coat", 1 / 3, True),
    ("boat", "meet", 2 / 3, False),
    ("stop", "spot", 2 / 4, True),
    ("stop", "shop", 2 / 4, True),
    ("hello", "yellow", 2 / 4, True),
    ("zoo", "cue", 2 / 3, False),
    ("dig", "log", 2 / 3, False),
]


def _T(sid, ref, hyp):
    words = [f"{sid}w{i}" for i in range(len(ref))]
    return TaggedTranscript.from_pairs(zip(words, ref), sid), TaggedTranscript.from_pairs(zip(words, hyp), sid)


# ten sessions with hand-labelled error kinds, in turn order
TAXONOMY_CASES = [
    (*_T("t0", "AAAAABBBBBB", "AAAABBBBBBB"), ["b"]),
    (*_T("t1", "AAAAABBBBBB", "AAAAAABBBBB"), ["b"]),
    (*_T("t2", "AAAAAAABBBBBBB", "AAABAAABBBBBBB"), ["a"]),
    (*_T("t3", "AAAAABBBBAAAAAA", "AAAAAAAAAAAAAAA"), ["c"]),
    (*_T("t4", "AAAAAABBBBBB", "AAAAAABBBBBB"), []),
    (*_T("t5", "AAAAAAAABBBBBBBB", "ABAAAAABBBABBBBA"), ["a", "b", "a", "b"]),
    (*_T("t6", "AAAABBBBAAAABBBB", "AAAABBBBAAAABBBB"), []),
    (*_T("t7", "AAAAABBBBBAAAAA", "AAAAABBBBBBBAAA"), ["b"]),
    (*_T("t8", "AAAAAAAAAABBBBBBBBBB", "AABBAAAAAABBBBBAABBA"), ["a", "a", "b"]),
    (*_T("t9", "AAAABBBBBBBBAAAAAAAA", "AAAABBBBBBBBBBBAAAAA"), ["b"]),
]
