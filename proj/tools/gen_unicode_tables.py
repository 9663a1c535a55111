#!/usr/bin/env python3
# Copyright 2026 the wwm-pipeline authors.
# SPDX-License-Identifier: Apache-2.0
"""Generates src/unicode_tables.cpp from Python's unicodedata module.

The emitted tables cover exactly what the text pipeline needs:

  * full canonical decompositions + one-level composition pairs (NFC/NFD)
  * nonzero canonical combining classes (canonical ordering)
  * the general categories used for character classification:
    Mn (accent stripping), P* (punctuation), Zs (whitespace), Cc/Cf (control)
  * a simple one-to-one lowercase map

Hangul syllables are intentionally absent: AC00..D7A3 decomposition and
composition are algorithmic and implemented directly in C++.

Regenerate with:  python3 tools/gen_unicode_tables.py > src/unicode_tables.cpp
"""

import sys
import unicodedata

MAX_CP = 0x110000
HANGUL_BASE, HANGUL_END = 0xAC00, 0xD7A3


def one_level_canonical(cp):
    """Canonical (non-compatibility) decomposition of cp, or None."""
    raw = unicodedata.decomposition(chr(cp))
    if not raw or raw.startswith("<"):
        return None
    return [int(piece, 16) for piece in raw.split()]


def full_canonical(cp, memo):
    """Recursively expanded canonical decomposition of cp (possibly [cp])."""
    if cp in memo:
        return memo[cp]
    one = one_level_canonical(cp)
    if one is None:
        memo[cp] = [cp]
        return memo[cp]
    out = []
    for piece in one:
        out.extend(full_canonical(piece, memo))
    memo[cp] = out
    return out


def category_ranges(predicate):
    """Sorted inclusive (lo, hi) ranges of codepoints matching predicate."""
    ranges = []
    run_start = None
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:  # surrogates never appear in valid UTF-8
            match = False
        else:
            match = predicate(cp)
        if match and run_start is None:
            run_start = cp
        elif not match and run_start is not None:
            ranges.append((run_start, cp - 1))
            run_start = None
    if run_start is not None:
        ranges.append((run_start, MAX_CP - 1))
    return ranges


def emit_ranges(name, ranges, out):
    out.write(f"const Range32 {name}[] = {{\n")
    for i in range(0, len(ranges), 4):
        row = ", ".join(f"{{0x{lo:04X}, 0x{hi:04X}}}" for lo, hi in ranges[i:i + 4])
        out.write(f"    {row},\n")
    out.write("};\n")
    out.write(f"const size_t {name}Count = {len(ranges)};\n\n")


def main():
    out = sys.stdout
    memo = {}
    decomp_entries = []   # (cp, offset, len) into pool
    pool = []
    comp_pairs = []       # (a, b, composed)
    ccc_ranges = []       # (lo, hi, ccc)
    lower_entries = []    # (cp, lower)

    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF or HANGUL_BASE <= cp <= HANGUL_END:
            continue
        expansion = full_canonical(cp, memo)
        if expansion != [cp]:
            decomp_entries.append((cp, len(pool), len(expansion)))
            pool.extend(expansion)

        one = one_level_canonical(cp)
        if one is not None and len(one) == 2 and unicodedata.combining(chr(one[0])) == 0:
            ch = chr(cp)
            # A pair recomposes under NFC unless it is a composition exclusion.
            if unicodedata.normalize("NFC", unicodedata.normalize("NFD", ch)) == ch:
                comp_pairs.append((one[0], one[1], cp))

        ccc = unicodedata.combining(chr(cp))
        if ccc != 0:
            if ccc_ranges and ccc_ranges[-1][1] == cp - 1 and ccc_ranges[-1][2] == ccc:
                ccc_ranges[-1] = (ccc_ranges[-1][0], cp, ccc)
            else:
                ccc_ranges.append((cp, cp, ccc))

        lowered = chr(cp).lower()
        if len(lowered) == 1 and lowered != chr(cp):
            lower_entries.append((cp, ord(lowered)))

    comp_pairs.sort(key=lambda e: (e[0] << 32) | e[1])

    cat = lambda cp: unicodedata.category(chr(cp))
    mn_ranges = category_ranges(lambda cp: cat(cp) == "Mn")
    p_ranges = category_ranges(lambda cp: cat(cp).startswith("P"))
    zs_ranges = category_ranges(lambda cp: cat(cp) == "Zs")
    cc_ranges = category_ranges(lambda cp: cat(cp) == "Cc")
    cf_ranges = category_ranges(lambda cp: cat(cp) == "Cf")

    out.write("// Copyright 2026 the wwm-pipeline authors.\n")
    out.write("// SPDX-License-Identifier: Apache-2.0\n//\n")
    out.write("// GENERATED FILE - DO NOT EDIT.\n")
    out.write("// Produced by tools/gen_unicode_tables.py from Python %s "
              "(Unicode %s data).\n\n" % (
                  ".".join(map(str, sys.version_info[:3])),
                  unicodedata.unidata_version))
    out.write('#include "wwm/unicode_tables.hpp"\n\n')
    out.write("namespace wwm::uni::tables {\n\n")

    emit_ranges("kMnRanges", mn_ranges, out)
    emit_ranges("kPunctRanges", p_ranges, out)
    emit_ranges("kZsRanges", zs_ranges, out)
    emit_ranges("kCcRanges", cc_ranges, out)
    emit_ranges("kCfRanges", cf_ranges, out)

    out.write("const CccRange kCccRanges[] = {\n")
    for i in range(0, len(ccc_ranges), 4):
        row = ", ".join(f"{{0x{lo:04X}, 0x{hi:04X}, {c}}}" for lo, hi, c in ccc_ranges[i:i + 4])
        out.write(f"    {row},\n")
    out.write("};\n")
    out.write(f"const size_t kCccRangesCount = {len(ccc_ranges)};\n\n")

    out.write("const DecompEntry kDecomp[] = {\n")
    for i in range(0, len(decomp_entries), 4):
        row = ", ".join(f"{{0x{cp:04X}, {off}, {n}}}" for cp, off, n in decomp_entries[i:i + 4])
        out.write(f"    {row},\n")
    out.write("};\n")
    out.write(f"const size_t kDecompCount = {len(decomp_entries)};\n\n")

    out.write("const uint32_t kDecompPool[] = {\n")
    for i in range(0, len(pool), 8):
        row = ", ".join(f"0x{cp:04X}" for cp in pool[i:i + 8])
        out.write(f"    {row},\n")
    out.write("};\n\n")

    out.write("const CompEntry kComp[] = {\n")
    for i in range(0, len(comp_pairs), 3):
        row = ", ".join(
            f"{{(uint64_t(0x{a:04X}) << 32) | 0x{b:04X}, 0x{c:04X}}}"
            for a, b, c in comp_pairs[i:i + 3])
        out.write(f"    {row},\n")
    out.write("};\n")
    out.write(f"const size_t kCompCount = {len(comp_pairs)};\n\n")

    out.write("const CaseEntry kLower[] = {\n")
    for i in range(0, len(lower_entries), 4):
        row = ", ".join(f"{{0x{cp:04X}, 0x{lo:04X}}}" for cp, lo in lower_entries[i:i + 4])
        out.write(f"    {row},\n")
    out.write("};\n")
    out.write(f"const size_t kLowerCount = {len(lower_entries)};\n\n")

    out.write("}  // namespace wwm::uni::tables\n")

    sys.stderr.write(
        "decomp=%d pool=%d comp=%d ccc_ranges=%d mn=%d p=%d zs=%d cc=%d cf=%d lower=%d\n"
        % (len(decomp_entries), len(pool), len(comp_pairs), len(ccc_ranges),
           len(mn_ranges), len(p_ranges), len(zs_ranges), len(cc_ranges),
           len(cf_ranges), len(lower_entries)))


if __name__ == "__main__":
    main()
