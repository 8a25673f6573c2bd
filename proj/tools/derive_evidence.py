#!/usr/bin/env python3
"""Derive evidence annotations for the temporal benchmark fixture.

For every question the evidence is the latest statement (or statements, for
list questions) that carries the fact named by the reference answer. Each
question is described by one or more rules: a subject that must appear in the
statement, cue phrases of which at least one must appear, and an optional
upper bound on the timestep ("the latest such statement before t").

Usage:
    derive_evidence.py FIXTURE            print the annotated question sections
    derive_evidence.py --check FIXTURE    exit 1 if the fixture disagrees
"""

import argparse
import re
import sys

EMPLOYMENT = ["works for", "working for", "job", "employed", "laid off", "quit"]

# (subject, cues, before) triples; a question with several rules gets one
# evidence timestep per rule.
STANDARD_RULES = [
    [("Brandon", EMPLOYMENT, None)],
    [("Brandon", EMPLOYMENT, None)],
    [("Brandon", EMPLOYMENT, None)],
    [("Brandon", ["works for", "working for", "job at"], None)],
    [("Brandon", ["works for", "working for", "job at"], None)],
    [("Brandon", ["laid off"], None)],
    [("Brandon", ["Lightbulb"], None)],
    [("Brandon", ["Cisco"], 53)],
    [("Brandon", ["quit"], None)],
    [("Brandon", ["weeks"], None)],
    [("Brandon", ["hiking"], None)],
    [("Brandon", ["gym"], None)],
    [("Brandon", ["music", "country", "Rock"], None)],
    [("Brandon", ["vacation", "Paris", "Brazil"], None)],
    [("Brandon", ["weekend"], None)],
    [("Brandon", ["bowling"], 70)],
    [("Brandon", ["bowling"], None)],
    [("Brandon", ["favorite color"], None)],
    [("Brandon", ["ate a"], None)],
    [("Brandon", ["ate a"], 50)],
    [("Brandon", ["tired"], None)],
]

LONG_RANGE_RULES = [
    [("Brandon", ["South African", "nationality"], None)],
    [("Brandon", ["Townhome"], None)],
    [("Hugo", ["Cisco"], None), ("Brandon", ["Cisco"], None)],
    [("Brandon", ["coffee"], None)],
    [("Brandon", ["PENCIL"], None), ("Brandon", ["Lightbulb"], None),
     ("Brandon", ["Cisco"], None)],
    [("Brandon", ["speak"], None)],
    [("Brandon", ["speak"], None)],
    [("Brandon", ["leg"], None)],
    [("Brandon", ["leg"], None)],
    [("Brandon", ["brother"], None)],
    [("Brandon", ["brother", "sibling"], None)],
]


def parse_fixture(text):
    sections = {}
    current = None
    for raw in text.splitlines():
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        m = re.match(r"^\[([A-Z_]+)\]", line)
        if m:
            current = m.group(1)
            sections[current] = []
            continue
        sections[current].append(line)
    return sections


def timeline(sections):
    # One pass of the benchmark: t=1..10 initial, t=11..72 loop.
    return sections["INITIAL"] + sections["LOOP"]


def latest(statements, subject, cues, before):
    best = None
    for t, s in enumerate(statements, start=1):
        if before is not None and t >= before:
            break
        if subject.split("'")[0] not in s:
            continue
        if any(c in s for c in cues):
            best = t
    if best is None:
        raise SystemExit(f"no statement for subject={subject!r} cues={cues!r}")
    return best


def derive(sections, section, rules):
    statements = timeline(sections)
    rows = sections[section]
    if len(rows) != len(rules):
        raise SystemExit(f"{section}: {len(rows)} questions, {len(rules)} rules")
    out = []
    for row, rule in zip(rows, rules):
        question, reference = row.split("\t")[:2]
        ts = sorted({latest(statements, *r) for r in rule})
        out.append((question, reference, ",".join(str(t) for t in ts)))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("fixture")
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()

    with open(args.fixture, encoding="utf-8") as f:
        sections = parse_fixture(f.read())

    mismatches = 0
    for section, rules in (("STANDARD", STANDARD_RULES),
                           ("LONG_RANGE", LONG_RANGE_RULES)):
        derived = derive(sections, section, rules)
        if not args.check:
            print(f"[{section}] {len(derived)}")
            for q, ref, ev in derived:
                print(f"{q}\t{ref}\t{ev}")
            print()
            continue
        for row, (q, _, ev) in zip(sections[section], derived):
            have = row.split("\t")[2] if row.count("\t") >= 2 else ""
            if have != ev:
                mismatches += 1
                print(f"{section}: {q!r}: fixture={have!r} derived={ev!r}")

    if args.check:
        if mismatches:
            sys.exit(1)
        print("evidence annotations match")


if __name__ == "__main__":
    main()
