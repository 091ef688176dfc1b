"""Rebuild the bundled en/ga seed text and the held-out evaluation sets.

Sources (all redistributable, see src/bitextforge/data/seed/NOTICE):
  * Weblate gettext catalog, Irish locale (django.mo + djangojs.mo)
  * Django gettext catalogs, Irish locale (*.po)
  * Universal Declaration of Human Rights, Irish (udhr npm package, gle.html)

Usage:
    python tools/build_seed_data.py --weblate weblate.whl --django django.whl \
        --udhr-gle gle.html --out-seed src/bitextforge/data/seed --out-test tests/data

Entries are split deterministically on a SHA-1 of the English message id, so
no held-out sentence ever appears in the seed text.
"""

import argparse
import hashlib
import html
import re
import tempfile
import zipfile
from pathlib import Path

import polib

PLACEHOLDER = re.compile(r"%\(\w+\)[sdfr]|%[sdfr]|\{[^}]*\}|\$\w+|\[\[|\]\]")
TAG = re.compile(r"<[^>]+>")
HELDOUT_MIN_CHARS = 40
HELDOUT_SHARE = 0.7


def clean(s):
    s = html.unescape(TAG.sub(" ", s)).replace("`", "").replace("\xa0", " ")
    s = re.sub(r"\s+", " ", s).strip()
    return re.sub(r" ([.,;:!?])", r"\1", s)


def catalog_pairs(catalog):
    for entry in catalog:
        if entry.msgid_plural or not entry.msgstr or entry.obsolete:
            continue
        if "fuzzy" in entry.flags:
            continue
        if PLACEHOLDER.search(entry.msgid) or PLACEHOLDER.search(entry.msgstr):
            continue
        en, ga = clean(entry.msgid), clean(entry.msgstr)
        if en and ga and en != ga and "\t" not in en + ga:
            yield en, ga


def wheel_catalogs(wheel):
    with zipfile.ZipFile(wheel) as z, tempfile.TemporaryDirectory() as tmp:
        for name in sorted(z.namelist()):
            if "/locale/ga/LC_MESSAGES/" not in name:
                continue
            if name.endswith(".po"):
                yield polib.pofile(z.read(name).decode("utf-8"))
            elif name.endswith(".mo"):
                path = Path(tmp) / "x.mo"
                path.write_bytes(z.read(name))
                yield polib.mofile(str(path))


def udhr_paragraphs(path):
    text = Path(path).read_text(encoding="utf-8")
    for para in re.findall(r"<p>(.*?)</p>", text, re.S):
        para = clean(para)
        if para:
            yield para


def heldout_bucket(en):
    digest = hashlib.sha1(en.encode("utf-8")).digest()
    return digest[0] / 256.0 < HELDOUT_SHARE


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weblate", required=True)
    ap.add_argument("--django", required=True)
    ap.add_argument("--udhr-gle", required=True)
    ap.add_argument("--out-seed", required=True)
    ap.add_argument("--out-test", required=True)
    args = ap.parse_args()

    pairs = {}
    for wheel in (args.weblate, args.django):
        for catalog in wheel_catalogs(wheel):
            for en, ga in catalog_pairs(catalog):
                pairs.setdefault(en, ga)

    seed_en, seed_ga, heldout = [], [], []
    for en in sorted(pairs):
        ga = pairs[en]
        long_enough = min(len(en), len(ga)) >= HELDOUT_MIN_CHARS
        if long_enough and heldout_bucket(en):
            heldout.append((en, ga))
        else:
            seed_en.append(en)
            seed_ga.append(ga)
    seed_ga.extend(udhr_paragraphs(args.udhr_gle))

    # drop held-out strings that also occur verbatim on the seed side
    seen = set(seed_en) | set(seed_ga)
    heldout = [(en, ga) for en, ga in heldout if en not in seen and ga not in seen]

    seed_dir, test_dir = Path(args.out_seed), Path(args.out_test)
    seed_dir.mkdir(parents=True, exist_ok=True)
    test_dir.mkdir(parents=True, exist_ok=True)
    (seed_dir / "en.txt").write_text("\n".join(seed_en) + "\n", encoding="utf-8")
    (seed_dir / "ga.txt").write_text("\n".join(seed_ga) + "\n", encoding="utf-8")
    with open(test_dir / "heldout_pairs.tsv", "w", encoding="utf-8") as f:
        for en, ga in heldout:
            f.write(f"{en}\t{ga}\n")
    print(f"seed: en={len(seed_en)} ga={len(seed_ga)} heldout pairs={len(heldout)}")


if __name__ == "__main__":
    main()
