#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc from Python's unicodedata.

The tables pin three things the tokenizer depends on:
  * word code points: general categories L*, N*, M*
  * whitespace code points: White_Space (Zs/Zl/Zp plus 09-0D and 85)
  * one-to-one case folding: casefold() when it yields a single code
    point, otherwise lower(), otherwise identity

Run from the repo root:  python3 scripts/gen_unicode_tables.py
"""

import sys
import unicodedata

MAX_CP = 0x110000


def ranges(predicate):
    out = []
    start = None
    for cp in range(MAX_CP):
        if predicate(cp):
            if start is None:
                start = cp
        else:
            if start is not None:
                out.append((start, cp - 1))
                start = None
    if start is not None:
        out.append((start, MAX_CP - 1))
    return out


def is_word(cp):
    cat = unicodedata.category(chr(cp))
    return cat[0] in ("L", "N", "M")


def is_space(cp):
    if cp in (0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x85):
        return True
    return unicodedata.category(chr(cp)) in ("Zs", "Zl", "Zp")


def fold_pairs():
    pairs = []
    for cp in range(MAX_CP):
        ch = chr(cp)
        folded = ch.casefold()
        if len(folded) != 1:
            folded = ch.lower()
        if len(folded) == 1 and folded != ch:
            pairs.append((cp, ord(folded)))
    return pairs


def emit_ranges(f, name, rs):
    f.write(f"inline constexpr CodepointRange {name}[] = {{\n")
    for i in range(0, len(rs), 4):
        row = ", ".join(f"{{0x{lo:X}, 0x{hi:X}}}" for lo, hi in rs[i : i + 4])
        f.write(f"    {row},\n")
    f.write("};\n\n")


def main():
    word = ranges(is_word)
    space = ranges(is_space)
    folds = fold_pairs()
    with open("src/unicode_tables.inc", "w") as f:
        f.write("// Generated by scripts/gen_unicode_tables.py -- do not edit.\n")
        f.write(f"// Unicode data version: {unicodedata.unidata_version}\n\n")
        f.write(
            f'inline constexpr char kUnicodeDataVersion[] = "{unicodedata.unidata_version}";\n\n'
        )
        emit_ranges(f, "kWordRanges", word)
        emit_ranges(f, "kSpaceRanges", space)
        f.write("inline constexpr FoldPair kFoldPairs[] = {\n")
        for i in range(0, len(folds), 4):
            row = ", ".join(f"{{0x{a:X}, 0x{b:X}}}" for a, b in folds[i : i + 4])
            f.write(f"    {row},\n")
        f.write("};\n")
    print(
        f"wrote src/unicode_tables.inc: {len(word)} word ranges, "
        f"{len(space)} space ranges, {len(folds)} fold pairs",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
