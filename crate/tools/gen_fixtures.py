#!/usr/bin/env python3
"""Regenerates the checked-in test fixtures.

    python3 tools/gen_fixtures.py

Writes crates/refmap/fixtures/bundled/* (pipeline corpus) and
crates/refmap/tests/data/resolution/* (labeled citation corpus). Output is
deterministic; rerunning leaves the files unchanged.
"""

import csv
import io
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
BUNDLED = ROOT / "crates/refmap/fixtures/bundled"
RESOLUTION = ROOT / "crates/refmap/tests/data/resolution"

SURNAMES = """Abrams Baker Castillo Dubois Eriksen Fujita Garcia Haddad Ibrahim Jensen Kowalski
Lindqvist Moreau Nakamura Okafor Petrov Quinn Rossi Schmidt Tanaka Ueda Varga Weber Xu Yilmaz
Zhang Albrecht Brennan Chowdhury Delgado Esposito Fischer Gallagher Horvath Iversen Jovanovic
Keller Lambert Mendez Novak Olsen Patel Ramirez Sato Thompson Underwood Vasquez Wagner Young
Ziegler Ahmed Bianchi Costa Dunn Engel Ferreira Grant Hughes Ishikawa Janssen Khan Lopez Martin
Nguyen Ortiz Park Reyes Silva Turner Vogel Walsh Yamamoto Zimmermann Müller Søndergaard Ó'Brien
Łukasik Öztürk""".split()

JOURNALS = [
    "N Engl J Med", "JAMA", "Lancet", "Circulation", "Stroke", "J Am Coll Cardiol",
    "Ann Intern Med", "BMJ", "Neurology", "J Clin Oncol", "Kidney Int", "Blood",
    "Am J Kidney Dis", "Radiology", "J Nucl Med", "Arch Neurol", "Diabetes Care",
    "J Vasc Surg", "Ann Neurol", "Am J Epidemiol",
]

ADJ = """randomized prospective multicenter long-term comparative observational pooled
population-based retrospective pragmatic blinded nationwide""".split()
INTERVENTIONS = """stenting endarterectomy angioplasty erythropoietin darbepoetin amyloid-imaging
florbetapir statin aspirin clopidogrel dialysis hemofiltration thrombolysis anticoagulation
rehabilitation transplantation chemotherapy immunotherapy radiotherapy screening""".split()
CONDITIONS = """carotid-stenosis stroke anemia dementia alzheimer myeloma lymphoma heart-failure
hypertension diabetes nephropathy atrial-fibrillation osteoarthritis sleep-apnea obesity
cognitive-impairment restenosis neuropathy sepsis""".split()
POPULATIONS = """elderly-patients veterans women adults children medicare-beneficiaries
dialysis-patients cancer-patients community-cohorts symptomatic-patients
asymptomatic-patients high-risk-patients""".split()
DESIGNS = """trial cohort-study meta-analysis registry-analysis case-control-study
cost-effectiveness-analysis systematic-review""".split()
OUTCOMES = """mortality outcomes survival safety efficacy hospitalization quality-of-life
recurrence progression adherence""".split()


def words(s):
    return s.replace("-", " ")


def make_title(rng):
    form = rng.randrange(3)
    if form == 0:
        return (f"{rng.choice(ADJ).capitalize()} {words(rng.choice(INTERVENTIONS))} versus "
                f"{words(rng.choice(INTERVENTIONS))} for {words(rng.choice(CONDITIONS))} in "
                f"{words(rng.choice(POPULATIONS))}: a {words(rng.choice(DESIGNS))}")
    if form == 1:
        return (f"{words(rng.choice(OUTCOMES)).capitalize()} after {words(rng.choice(INTERVENTIONS))} "
                f"among {words(rng.choice(POPULATIONS))} with {words(rng.choice(CONDITIONS))}")
    return (f"Effect of {words(rng.choice(INTERVENTIONS))} on {words(rng.choice(OUTCOMES))} in "
            f"{words(rng.choice(CONDITIONS))}: {rng.choice(ADJ)} {words(rng.choice(DESIGNS))}")


def make_authors(rng, n):
    names = rng.sample(SURNAMES, n)
    return [{"surname": s, "initials": "".join(rng.choice("ABCDEFGHJKLMNPRSTW") for _ in range(rng.randint(1, 2)))}
            for s in names]


def cite(rec, authors=None, year=None, title=None, et_al_after=6):
    authors = rec["authors"] if authors is None else authors
    names = [f"{a['surname']} {a['initials']}" for a in authors]
    if len(names) > et_al_after:
        names = names[:et_al_after - 3] + ["et al"]
    title = rec["title"] if title is None else title
    year = rec["pub_year"] if year is None else year
    vol = rec.get("volume") or "1"
    pages = rec.get("pages") or "1-10"
    return f"{', '.join(names)}. {title}. {rec['journal']}. {year};{vol}:{pages}."


def jsonl(items):
    return "".join(json.dumps(x, ensure_ascii=False, sort_keys=False) + "\n" for x in items)


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------- aliases

IC_NAMES = {
    "NCATS": "National Center for Advancing Translational Sciences",
    "NCI": "National Cancer Institute",
    "NHLBI": "National Heart, Lung, and Blood Institute",
    "NIA": "National Institute on Aging",
    "NIAID": "National Institute of Allergy and Infectious Diseases",
    "NIAMS": "National Institute of Arthritis and Musculoskeletal and Skin Diseases",
    "NIDDK": "National Institute of Diabetes and Digestive and Kidney Diseases",
    "NINDS": "National Institute of Neurological Disorders and Stroke",
    "NIMH": "National Institute of Mental Health",
    "NCRR": "National Center for Research Resources",
}

NON_IC_CODES = {
    "Agency for Healthcare Research & Quality": "AHRQ",
    "Arthritis Research UK": "ARUK",
    "Agency for Toxic Substances & Disease Registry": "ATSDR",
    "Austrian Science Fund FWF": "FWF",
    "Bureau of Health Professions": "BHPR",
    "Brazilian National Council for Scientific and Technological Development": "CNPQ",
    "British Heart Foundation": "BHF",
    "Canadian Institutes of Health Research": "CIHR",
    "Cancer Research UK": "CRUK",
    "Chief Scientist Office": "CSO",
    "Fundação de Apoio à Pesquisa do RN": "FAPERN",
    "U.S. Food & Drug Administration": "FDA",
    "The São Paulo Research Foundation": "FAPESP",
    "U.S. Centers for Disease Control & Prevention": "CDC",
    "Intramural NIH": "NIH-INTRAMURAL",
    "Medical Research Council": "MRC",
    "Ministry of Health and Welfare": "MHW",
    "Ministry of Science and Technology, Taiwan": "MOST-TW",
    "Multiple Sclerosis Society": "MSS",
    "Office of Chief of Public Health Practice": "OCPHP",
    "Coord. for the Improvement of Higher Education Personnel Nat. Postdoc. Program": "CAPES",
    "SingHealth Foundation Research Grant": "SINGHEALTH",
    "Telethon": "TELETHON",
    "UK Department of Health": "UKDH",
    "U.S. Dept. of Veterans Affairs": "VA",
    "Wellcome Trust": "WT",
}


def alias_rows():
    rows = []
    shares = ROOT / "crates/refmap/tests/data/funder_award_shares.csv"
    for row in csv.DictReader(shares.open(encoding="utf-8")):
        name = row["funder"]
        code = NON_IC_CODES.get(name, name)
        rows.append((name, code))
    for code, name in IC_NAMES.items():
        rows.append((name, code))
        rows.append((f"{code} NIH HHS", code))
    rows.append(("NIH HHS", "NIH"))
    rows.append(("Department of Veterans Affairs", "VA"))
    return sorted(set(rows))


def csv_text(header, rows):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return out.getvalue()


# ---------------------------------------------------------------- bundled corpus

ORGS = {
    "A": ("044387793", "Duke University"),
    "B": ("001910777", "Johns Hopkins University"),
    "C": ("073133571", "University of Michigan"),
    "D": ("605799469", "University of Washington"),
    "G": ("009214214", "Stanford University"),
    "H": ("004514360", "University of Pittsburgh"),
    "I": ("094878337", "University of California San Francisco"),
    "J": ("073130411", "Massachusetts General Hospital"),
}

CORES = {
    # key: (core number, funder code, fiscal years)
    "A": ("R01CA100001", "NCI", range(2003, 2009)),
    "B": ("R01HL200002", "NHLBI", range(2004, 2009)),
    "C": ("P01AG300003", "NIA", range(2005, 2008)),
    "D": ("R01DK400004", "NIDDK", range(2006, 2008)),
    "E": ("R01NS500005", "NINDS", [2004]),
    "F": ("R01MH600006", "NIMH", [2005]),
    "G": ("UL1TR700007", "NCATS", [2007, 2008]),
    "H": ("M01RR800008", "NCRR", [2003, 2004]),
    "I": ("R01AI900009", "NIAID", [2006]),
    "J": ("R01CA110010", "NCI", [2005, 2006]),
}

# article slot -> (pub_year, award-database cores, grant tags as (award_text, funder_text))
FUNDING = {
    0: (2004, "A", []),
    1: (2005, "A", [("R01 CA100001", "NCI NIH HHS")]),
    2: (2006, "AB", []),
    3: (2007, "A", []),
    4: (2008, "A", [("R01 CA100001-05", "NCI NIH HHS")]),
    5: (2009, "A", []),
    6: (2005, "B", []),
    7: (2006, "B", [("R01HL200002-02", "National Heart, Lung, and Blood Institute")]),
    8: (2007, "B", []),
    9: (2008, "B", []),
    10: (2009, "B", []),
    11: (2006, "C", []),
    12: (2008, "C", [("AG300003", "NIA NIH HHS")]),
    13: (2007, "D", []),
    14: (2008, "D", []),
    15: (2005, "", [("NS500005", "NINDS NIH HHS")]),
    16: (2006, "F", []),
    17: (2008, "GH", []),
    18: (2005, "H", [("RR800008", "NCRR NIH HHS")]),
    19: (2007, "I", []),
    20: (2006, "J", []),
    21: (2007, "J", []),
    22: (2006, "", [("HL999999", "NHLBI NIH HHS")]),
    23: (2004, "", [("081234", "Wellcome Trust")]),
    24: (2009, "", [("G0501234", "Medical Research Council")]),
    25: (None, "", [("CA777777", "NCI NIH HHS")]),
}

MEMOS = [
    ("CAG-00085R", "Decision Memo for Carotid Artery Stenting (CAG-00085R)", "2005-03-17"),
    ("CAG-00383N", "Decision Memo for Erythropoiesis Stimulating Agents for non-renal disease indications (CAG-00383N)", "2007-07-30"),
    ("CAG-00431N", "Decision Memo for Beta Amyloid Positron Emission Tomography in Dementia (CAG-00431N)", "2013-09-27"),
]

# memo -> article slots cited, in order
CITED = {
    "CAG-00085R": [0, 2, 6, 7, 8, 17, 20, 22, 23, 26, 27, 28, 29, 30, 31],
    "CAG-00383N": [1, 3, 9, 11, 13, 16, 18, 24, 25, 32, 33, 34, 2],
    "CAG-00431N": [4, 5, 10, 12, 14, 15, 19, 21, 35, 36, 37, 38],
}

NON_PUBMED = {
    "CAG-00085R": [
        "Food and Drug Administration. Guidance for industry: carotid stent premarket notification. Rockville, MD; 2004.",
        "Centers for Medicare & Medicaid Services. National coverage analysis tracking sheet for carotid stenting. Available at the CMS website.",
        "American Heart Association. Heart disease and stroke statistics update. Dallas, TX; 2004.",
    ],
    "CAG-00383N": [
        "Food and Drug Administration. Oncologic Drugs Advisory Committee briefing document on erythropoiesis stimulating agents. 2007.",
        "Amgen Inc. Aranesp (darbepoetin alfa) prescribing information. Thousand Oaks, CA; 2007.",
    ],
    "CAG-00431N": [
        "Alzheimer's Association. Alzheimer's disease facts and figures. Chicago, IL; 2013.",
        "Eli Lilly and Company. Amyvid (florbetapir F 18 injection) prescribing information. 2012.",
    ],
}


def bundled():
    rng = random.Random(85)
    records = []
    for slot in range(40):
        pub_year, cores, tags = FUNDING.get(slot, (rng.randint(2001, 2012), "", []))
        rec = {
            "article_id": str(15000000 + 7919 * slot),
            "title": make_title(rng),
            "authors": make_authors(rng, rng.randint(2, 7)),
            "journal": rng.choice(JOURNALS),
            "pub_year": pub_year,
            "volume": str(rng.randint(10, 400)),
            "pages": f"{(p := rng.randint(100, 2000))}-{p + rng.randint(4, 14)}",
            "grant_tags": [{"award_text": a, "funder_text": f} for a, f in tags],
            "retracted": slot in (8, 36),
        }
        if pub_year is None:
            del rec["pub_year"]
        records.append(rec)
    # two near-identical titles: a companion report one year apart
    records[37]["title"] = records[12]["title"] + ": extended follow-up"
    records[37]["authors"] = records[12]["authors"][:2] + make_authors(rng, 2)
    records[37]["journal"] = records[12]["journal"]

    awards = []
    for key, (core, funder, years) in CORES.items():
        org = ORGS.get(key)
        for i, fy in enumerate(years, start=1):
            cited = [records[s]["article_id"] for s, (_, cs, _) in sorted(FUNDING.items())
                     if key in cs and (s + i) % 2 == 0 or (key in cs and i == 1)]
            award = {
                "full_project_number": f"{core}-{i:02d}",
                "core_project_number": core,
                "funder_code": funder,
                "fiscal_year": fy,
                "cited_article_ids": sorted(set(cited)),
            }
            if org:
                award["org_id"], award["org_name"] = org
            awards.append(award)
    assert len(awards) == 25, len(awards)
    assert len({a["funder_code"] for a in awards} - {"NCRR"}) == 8

    memos = []
    for memo_id, title, date in MEMOS:
        lines = []
        for n, slot in enumerate(CITED[memo_id], start=1):
            rec = records[slot]
            if slot == 25:
                text = cite(rec, year=2006)
            elif n % 5 == 0:
                # reversed author order and a publication-year slip
                text = cite(rec, authors=list(reversed(rec["authors"])), year=(rec.get("pub_year") or 2006) + 1)
            elif n % 4 == 0:
                t = rec["title"].split()
                text = cite(rec, title=" ".join(t[: max(4, len(t) * 2 // 3)]))
            else:
                text = cite(rec)
            lines.append(f"{n}. {text}")
        for extra in NON_PUBMED[memo_id]:
            lines.append(f"{len(lines) + 1}. {extra}")
        intro = (f"{title}\n\nDecision Summary\n\nCMS has reviewed the evidence and determined the "
                 f"coverage position described below. The evidence is summarized in the analysis "
                 f"section; sources are listed in the references.\n\nAnalysis\n\nThe evidence base "
                 f"includes trials, registries and observational studies.\n\n")
        if memo_id == "CAG-00383N":
            body = intro + "Bibliography\n" + "\n".join(lines) + \
                "\n\nAppendix\nPublic comments were received during the comment period.\n"
        elif memo_id == "CAG-00431N":
            # long citations wrapped over two lines
            wrapped = []
            for l in lines:
                if len(l) > 110:
                    cut = l.rfind(" ", 0, 90)
                    wrapped += [l[:cut], "   " + l[cut + 1:]]
                else:
                    wrapped.append(l)
            body = intro + "References:\n\n" + "\n".join(wrapped) + "\n"
        else:
            body = intro + "References\n" + "\n".join(lines) + "\n"
        memos.append({"memo_id": memo_id, "title": title, "decision_date": date, "body_text": body})

    write(BUNDLED / "records.jsonl", jsonl(records))
    write(BUNDLED / "awards.jsonl", jsonl(awards))
    write(BUNDLED / "memos.jsonl", jsonl(memos))
    write(BUNDLED / "aliases.csv", csv_text(["raw_name", "canonical_code"], alias_rows()))


# ---------------------------------------------------------------- resolution corpus

DISTRACTOR_SOURCES = [
    "Food and Drug Administration. Guidance for industry: {x}. Silver Spring, MD; {y}.",
    "Centers for Medicare & Medicaid Services. Technology assessment of {x}. Baltimore, MD; {y}.",
    "Agency for Healthcare Research and Quality. Comparative effectiveness review: {x}. Rockville, MD; {y}.",
    "National Institute for Health and Care Excellence. Clinical guideline on {x}. London; {y}.",
    "World Health Organization. Global report on {x}. Geneva; {y}.",
]


def resolution():
    rng = random.Random(200)
    records = []
    for i in range(150):
        records.append({
            "article_id": str(20000000 + 104729 * i % 9000000),
            "title": make_title(rng),
            "authors": make_authors(rng, rng.randint(1, 8)),
            "journal": rng.choice(JOURNALS),
            "pub_year": rng.randint(1985, 2019),
            "volume": str(rng.randint(1, 400)),
            "pages": f"{(p := rng.randint(1, 2000))}-{p + rng.randint(2, 15)}",
        })
    assert len({r["article_id"] for r in records}) == 150

    fragments = []
    kinds = ["exact", "truncated", "reordered", "year", "truncated+year", "reordered+year", "truncated+reordered"]
    for n in range(160):
        rec = records[rng.randrange(150)]
        kind = kinds[n % len(kinds)]
        authors, year, title = rec["authors"], rec["pub_year"], rec["title"]
        if "truncated" in kind:
            t = title.split()
            title = " ".join(t[: max(3, int(len(t) * rng.uniform(0.6, 0.8)))])
        if "reordered" in kind:
            authors = authors[:]
            rng.shuffle(authors)
        if "year" in kind:
            year += rng.choice((-1, 1))
        fragments.append({"raw_text": cite(rec, authors, year, title), "expected": rec["article_id"], "kind": kind})
    for n in range(40):
        if n % 2 == 0:
            x = f"{words(rng.choice(INTERVENTIONS))} for {words(rng.choice(CONDITIONS))}"
            text = rng.choice(DISTRACTOR_SOURCES).format(x=x, y=rng.randint(1995, 2019))
        else:
            fake = {
                "title": make_title(rng),
                "authors": make_authors(rng, rng.randint(1, 6)),
                "journal": rng.choice(JOURNALS),
                "pub_year": rng.randint(1985, 2019),
                "volume": str(rng.randint(1, 400)),
                "pages": f"{(p := rng.randint(1, 2000))}-{p + rng.randint(2, 15)}",
            }
            text = cite(fake)
        fragments.append({"raw_text": text, "expected": None, "kind": "distractor"})
    rng.shuffle(fragments)
    out = []
    for i, f in enumerate(fragments):
        out.append({"memo_id": f"R{i // 20:02d}", "ordinal": i % 20, **f})
    write(RESOLUTION / "records.jsonl", jsonl(records))
    write(RESOLUTION / "fragments.jsonl", jsonl(out))


if __name__ == "__main__":
    bundled()
    resolution()
