#!/usr/bin/env python3
"""Regenerate the bundled demo corpus (deterministic).

Writes ``src/lexevo/data/mini_corpus.csv`` — a small synthetic
bibliographic export in the common Title/Abstract/Author Keywords/Year/
Document Type/Cited by layout — plus ``tests/data/mini_corpus_expected.json``
with the bookkeeping the generator knows by construction (row counts,
exclusions, per-year and per-period document counts). Tests compare the
pipeline against that fixture, so regenerate both together.

The corpus is built so every pipeline feature has something to chew on:
two malformed rows (bad year, negative citations) for the rejects
report, three non-research rows (one of them also abstract-less, which
pins the filter precedence), two empty-abstract research rows, era-themed
vocabulary that drifts across 2009-2022, quoted/accented text, and a
citation gradient that makes early documents the most cited.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
SEED = 20240917

YEAR_ROWS = {
    2009: 1, 2010: 1, 2011: 2, 2012: 2, 2013: 2, 2014: 3, 2015: 3,
    2016: 4, 2017: 4, 2018: 5, 2019: 6, 2020: 8, 2021: 9, 2022: 10,
}

COMMON = ["data", "health", "system", "analysis", "study", "patient",
          "hospital", "research", "information", "care"]
ERA_POOLS = {
    "early": ["statistics", "mining", "warehouse", "database", "regression",
              "survey", "record", "clinical", "registry", "coding"],
    "mid": ["big", "analytics", "cloud", "hadoop", "volume", "velocity",
            "processing", "platform", "stream", "infrastructure"],
    "late": ["machine", "learning", "deep", "neural", "network",
             "prediction", "covid", "model", "intelligence", "screening"],
}
FILLERS = ["the", "of", "in", "and", "with", "for", "on", "to", "from", "by"]
DOMAINS = ["primary care", "oncology", "public health", "epidemiology",
           "radiology", "nursing", "emergency services", "salud pública"]
RESEARCH_TYPES = ["Article", "Conference Paper", "Review"]


def era_of(year: int) -> str:
    if year <= 2012:
        return "early"
    if year <= 2018:
        return "mid"
    return "late"


def make_sentence(rng: random.Random, words: list[str], n: int) -> str:
    parts: list[str] = []
    for i in range(n):
        if i > 0 and rng.random() < 0.45:
            parts.append(rng.choice(FILLERS))
        parts.append(rng.choice(words))
    sentence = " ".join(parts)
    return sentence[0].upper() + sentence[1:] + "."


def make_abstract(rng: random.Random, era: str) -> str:
    words = ERA_POOLS[era] * 3 + COMMON
    n_sentences = rng.randint(2, 3)
    return " ".join(make_sentence(rng, words, rng.randint(9, 14))
                    for _ in range(n_sentences))


def make_title(rng: random.Random, era: str, seq: int) -> str:
    a, b = rng.sample(ERA_POOLS[era], 2)
    domain = rng.choice(DOMAINS)
    return f"{a.capitalize()} and {b} in {domain} ({seq:02d})"


def make_citations(rng: random.Random, era: str) -> int:
    lo, hi = {"early": (40, 220), "mid": (10, 120), "late": (0, 40)}[era]
    return rng.randint(lo, hi)


def build_rows() -> tuple[list[list[str]], dict]:
    rng = random.Random(SEED)
    rows: list[list[str]] = []
    retained_by_year: dict[int, int] = {}

    # (year, doc_type, empty_abstract) for the rows the filters remove.
    non_research = [(2020, "Editorial", False), (2021, "Note", True),
                    (2022, "Erratum", False)]
    empty_abstract = [(2021, "Article"), (2022, "Conference Paper")]

    seq = 0
    for year in sorted(YEAR_ROWS):
        era = era_of(year)
        specials = [s for s in non_research if s[0] == year]
        blanks = [t for y, t in empty_abstract if y == year]
        n_regular = YEAR_ROWS[year] - len(specials) - len(blanks)
        assert n_regular >= 0
        for _ in range(n_regular):
            seq += 1
            rows.append([
                make_title(rng, era, seq),
                make_abstract(rng, era),
                "; ".join(rng.sample(ERA_POOLS[era], 3)),
                str(year),
                rng.choice(RESEARCH_TYPES),
                str(make_citations(rng, era)),
            ])
            retained_by_year[year] = retained_by_year.get(year, 0) + 1
        for _, doc_type, blank in specials:
            seq += 1
            rows.append([
                make_title(rng, era, seq),
                "" if blank else make_abstract(rng, era),
                "",
                str(year),
                doc_type,
                str(make_citations(rng, era)),
            ])
        for doc_type in blanks:
            seq += 1
            rows.append([
                make_title(rng, era, seq),
                "",
                "",
                str(year),
                doc_type,
                str(make_citations(rng, era)),
            ])

    # Two malformed rows for the rejects report: a free-text year and a
    # negative citation count. Inserted at fixed positions.
    reject_rows = [
        (10, ['Mining the "gray" literature', make_abstract(rng, "early"),
              "", "in press", "Article", "12"]),
        (40, ["Velocity benchmarks revisited", make_abstract(rng, "mid"),
              "", "2016", "Article", "-3"]),
    ]
    for pos, row in reject_rows:
        rows.insert(pos, row)

    expected = {
        "csv_rows": len(rows),
        "loaded": len(rows) - len(reject_rows),
        "rejected": len(reject_rows),
        "excluded_non_research": len(non_research),
        "excluded_no_abstract": len(empty_abstract),
        "retained": sum(retained_by_year.values()),
        "retained_by_year": {str(y): n for y, n in sorted(retained_by_year.items())},
        "period_doc_counts": {
            "Surgimiento": sum(n for y, n in retained_by_year.items() if y <= 2012),
            "Crecimiento": sum(n for y, n in retained_by_year.items()
                               if 2013 <= y <= 2018),
            "Auge": sum(n for y, n in retained_by_year.items() if y >= 2019),
        },
    }
    return rows, expected


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", type=Path,
                        default=REPO / "src" / "lexevo" / "data" / "mini_corpus.csv")
    parser.add_argument("--expected", type=Path,
                        default=REPO / "tests" / "data" / "mini_corpus_expected.json")
    args = parser.parse_args()

    rows, expected = build_rows()
    args.dest.parent.mkdir(parents=True, exist_ok=True)
    with open(args.dest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["Title", "Abstract", "Author Keywords", "Year",
                         "Document Type", "Cited by"])
        writer.writerows(rows)
    args.expected.parent.mkdir(parents=True, exist_ok=True)
    args.expected.write_text(json.dumps(expected, indent=2) + "\n",
                             encoding="utf-8")
    print(f"wrote {args.dest} ({len(rows)} data rows)")
    print(f"wrote {args.expected}")


if __name__ == "__main__":
    main()
