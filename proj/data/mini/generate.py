#!/usr/bin/env python3
"""Regenerates the mini fixture. Deterministic: python3 generate.py in this dir."""

import random

R = random.Random(20260823)

FILLER = """company business report year quarter market product customer operation result
growth strategy plan revenue cost investment team program service region segment
performance development management board committee policy process goal initiative effort
support value risk change impact level rate share increase focus review approach practice
standard measure resource priority update annual financial statement disclosure item
period condition demand supply capital? contract agreement sale margin expense asset
liability cash flow earnings outlook guidance target objective milestone partner vendor
supplier client brand channel platform technology system datum model facility plant
warehouse office location network capacity volume unit price inventory order backlog
pipeline launch rollout upgrade maintenance quality control audit compliance regulation
requirement framework structure function role responsibility oversight governance
decision action step phase stage cycle trend factor driver outcome benefit gain loss
decline improvement reduction expansion acquisition divestiture integration transition
transformation innovation research insight analysis forecast estimate assumption basis
scenario alternative option? position presence footprint scale reach base portfolio mix
balance exposure concentration dependence relationship arrangement commitment obligation
covenant provision reserve allowance charge adjustment impairment depreciation
amortization valuation pricing discount premium incentive? fee commission royalty
license patent trademark dispute proceeding settlement claim matter event circumstance
situation environment landscape sector industry economy inflation currency exchange
interest credit funding liquidity leverage rating covenant? horizon duration timing
sequence schedule calendar deadline window? opportunity? threshold ceiling floor limit
range band tier class category? group cluster? family line series? generation version
release edition variant configuration feature attribute specification parameter metric
indicator index benchmark baseline reference standardization harmonization alignment""".split()
FILLER = [w for w in FILLER if not w.endswith("?")]

TOPICS = {
    "dei": """diversity inclusion equity belonging minority gender ethnicity inclusive
              representation equality accessibility mentorship""".split(),
    "safety": """safety injury hazard accident protective incident wellness illness
                 ergonomic inspection prevention quarantine distancing vaccination
                 sanitation ventilation""".split(),
    "labor": """culture training engagement turnover morale union talent retention
                onboarding apprenticeship grievance recognition flexibility""".split(),
    "comp": """compensation salary bonus pension wellbeing payroll deferral severance
               stipend reimbursement perquisite healthcare insurance""".split(),
    "demo": """employee workforce headcount staff personnel recruiter tenure attrition
               demographic occupation fulltime parttime contractor""".split(),
}

# Multi-word expressions; their parts never appear elsewhere, so the
# collocation score (count-min)*N/(ca*cb) clears the threshold.
PHRASES = [
    (["human", "capital"], 30),
    (["minimum", "wage"], 26),
    (["collective", "bargaining"], 24),
    (["equal", "employment", "opportunity"], 26),
]

RARE = """abatement abeyance accession accrual adjudication affidavit amalgamation
annuity apportionment appraisal arbitrage assay attestation bailment bevel bilge
bobbin bollard brokerage bulwark cadence caisson caliper camber cantilever capstan
carapace catalysis chamfer chassis cistern cladding cofferdam cog conduit conveyance
cordage cornice crucible culvert cupola darning datum? derrick dovetail dredge duct
easement effluent embankment escrow estoppel fathom ferrule flange flotsam flume
forfeiture freehold fulcrum gabion gantry gasket gimbal girder grommet groyne gusset
hawser hopper hull indemnity ingot invoice? jetty jib joist keel kiln lathe ledger?
lien lintel mandrel manifold masonry mast mezzanine moorage mortise novation nozzle
pallet parapet pawl pediment pier pinion piston plinth pontoon portico pulley pumice
purlin pylon quay quoin rafter ratchet rebar recourse remand rivet rotunda sconce
scow seawall sextant shim sluice solvent? spar spigot splice sprocket stanchion
strut subrogation sump surety swale tackle tailings tariff tenon tiller tranche
trellis trestle truss turbine usufruct valve vane veneer vestibule viaduct wharf
winch windlass""".split()
RARE = [w for w in RARE if not w.endswith("?")]

SECTORS = ["industrials", "technology", "services"]
NAMES1 = ["Alder", "Birch", "Cedar", "Dunmore", "Elmont", "Fairview", "Granite",
          "Harbor", "Ironwood", "Juniper", "Keystone", "Larkspur", "Maplecrest",
          "Northgate", "Oakfield", "Pinehill", "Quarry", "Ridgeline", "Stonebridge",
          "Tallgrass", "Umber", "Vantage", "Westbrook", "Yellowpine", "Zephyr"]
NAMES2 = ["Holdings", "Industries", "Systems", "Group", "Partners", "Manufacturing",
          "Logistics", "Materials", "Networks", "Labs"]


def sentence(topic, rng, decorations):
    n = rng.randint(9, 17)
    words = []
    for _ in range(n):
        if topic and rng.random() < 0.42:
            words.append(rng.choice(TOPICS[topic]))
        else:
            words.append(rng.choice(FILLER))
    if rng.random() < 0.30:
        words.insert(rng.randrange(len(words)), rng.choice(RARE))
    if decorations and rng.random() < 0.08:
        words.insert(rng.randrange(len(words)), rng.choice(decorations))
    text = " ".join(words)
    text = text[0].upper() + text[1:]
    end = "." if rng.random() < 0.94 else rng.choice("?!")
    return text + end


def make_doc(idx, rng):
    dominant = rng.sample(list(TOPICS), k=rng.randint(1, 2))
    decorations = ["the company’s", "each employee's", "full-time", "401k",
                   "Acme Inc. affiliates", "co-investment"]
    sentences = []
    for _ in range(rng.randint(26, 34)):
        topic = rng.choice(dominant) if rng.random() < 0.72 else \
            (rng.choice(list(TOPICS)) if rng.random() < 0.55 else None)
        sentences.append(sentence(topic, rng, decorations))
    return dominant, sentences


def wrap(sentences, width=90):
    lines, line = [], ""
    for s in sentences:
        if line and len(line) + 1 + len(s) > width * 2:
            lines.append(line)
            line = s
        else:
            line = (line + " " + s).strip()
    if line:
        lines.append(line)
    return lines


def main():
    docs = []
    for i in range(50):
        name = f"{NAMES1[i % len(NAMES1)]} {NAMES2[i % len(NAMES2)]} Inc."
        cik = str(1000001 + i)
        month = 1 + (i * 3) // 28
        day = 2 + (i * 3) % 28
        date = f"2020-{month:02d}-{day:02d}"
        fp = "2019-12-31" if month <= 3 else f"2020-{((month - 1) // 3) * 3:02d}-30"
        _, sentences = make_doc(i, R)
        docs.append((cik, name, date, fp, sentences))

    # Spread phrase emissions over documents.
    for parts, total in PHRASES:
        for _ in range(total):
            cik, name, date, fp, sentences = docs[R.randrange(len(docs))]
            lead = R.choice(["Our", "The", "This"])
            tail = R.choice(["framework", "program", "review", "commitment"])
            sentences.insert(R.randrange(len(sentences)),
                             f"{lead} {' '.join(parts)} {tail} continued.")

    with open("corpus.txt", "w") as f:
        for cik, name, date, fp, sentences in docs:
            f.write(f"#DOC|{cik}|{name}|{date}|{fp}\n")
            for line in wrap(sentences):
                f.write(line + "\n")
            f.write("#END\n")

    with open("groups.csv", "w") as f:
        f.write("doc_id,group\n")
        for i, (cik, *_rest) in enumerate(docs):
            f.write(f"{cik},{SECTORS[i % 3]}\n")

    # Small corpus of purely HC-flavored docs for classifier evaluation.
    with open("eval_corpus.txt", "w") as f:
        for j in range(6):
            cik = str(2000001 + j)
            f.write(f"#DOC|{cik}|Eval Sample {j + 1} Corp.|2021-0{j + 1}-15|2020-12-31\n")
            topic = list(TOPICS)[j % len(TOPICS)]
            sentences = [sentence(topic, R, []) for _ in range(10)]
            for line in wrap(sentences):
                f.write(line + "\n")
            f.write("#END\n")

    with open("pool.txt", "w") as f:
        for _ in range(180):
            f.write(sentence(None, R, []) + "\n")

    seeds = [
        ("Diversity, Equity, and Inclusion (DEI)", ["diversity", "inclusion"]),
        ("Health and Safety", ["safety", "injury", "quarantine"]),
        ("Labor Relations and Culture", ["training", "culture"]),
        ("Compensation and Benefits", ["compensation", "salary"]),
        ("Demographics and Others", ["employee", "workforce", "telecommuting"]),
    ]
    with open("seeds.csv", "w") as f:
        f.write("category,seed\n")
        for cat, terms in seeds:
            for t in terms:
                f.write(f'"{cat}",{t}\n')

    with open("ledger.csv", "w") as f:
        f.write("term,decision,target_category,note\n")
        f.write("headcount,reject,,generic counting term\n")
        f.write('quarantine,reassign,"Health and Safety:covid",pandemic-specific\n')
        f.write('distancing,reassign,"Health and Safety:covid",pandemic-specific\n')
        f.write("culture,accept,,core concept\n")
        f.write("zzznotacandidate,reject,,exercises the unknown-term warning\n")

    # Sanity: planted collocations must clear the default threshold of 10.
    import collections
    uni = collections.Counter()
    bi = collections.Counter()
    for path in ("corpus.txt",):
        body = []
        for line in open(path):
            if line.startswith("#DOC|") or line.startswith("#END"):
                continue
            body.append(line)
        toks = []
        for line in body:
            for raw in line.split():
                t = "".join(c for c in raw.lower() if c.isalnum() or c in "-_")
                if t:
                    toks.append(t)
        for t in toks:
            uni[t] += 1
        for a, b in zip(toks, toks[1:]):
            bi[(a, b)] += 1
    n = len(uni)
    for parts, total in PHRASES:
        for a, b in zip(parts, parts[1:]):
            score = (bi[(a, b)] - 5) * n / (uni[a] * uni[b])
            print(f"{a} {b}: pair={bi[(a, b)]} N={n} score={score:.2f}")
            assert score > 10.5, (a, b, score)
    for cat, terms in seeds:
        for t in terms:
            if t != "telecommuting":
                assert uni[t] >= 8, (t, uni[t])
    print(f"distinct={n} tokens={sum(uni.values())}")


if __name__ == "__main__":
    main()
