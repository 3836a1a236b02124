#!/usr/bin/env python3
"""Synthesize data/world.json: a 59-resident town in 11 families.

The roster is fictional. Structure (family shapes, generation depth, relationship
coverage) is fixed by hand; only friend/neighbor sampling uses a seeded RNG, so
rerunning the script reproduces the file byte for byte.

    python3 tools/synth_world.py > data/world.json
"""
import json
import random
import sys

rng = random.Random(20240611)

TOPICS = ["research", "sports", "music", "cooking"]

# Each family: surname, residence, list of members.
# Member: (key, first name, age, gender, job, workplace, income, education, hand, generation)
# Parent links are declared separately per family as (parent_key, child_key).
FAMILIES = [
    ("Zhang", "house_01", [
        ("zg1", "Wei", 88, "male", "retired", "home", 1, 1, "right"),
        ("zg2", "Guo", 64, "male", "retired", "home", 2, 2, "right"),
        ("zg3", "Lan", 61, "female", "doctor", "hospital", 3, 3, "right"),
        ("zg4", "Ming", 38, "male", "engineer", "factory", 3, 3, "left"),
        ("zg5", "Hui", 36, "female", "teacher", "school", 2, 3, "right"),
        ("zg6", "Yue", 11, "female", "student", "school", 1, 1, "right"),
        ("zg7", "Tao", 9, "male", "student", "school", 1, 1, "left"),
        ("zg8", "Rui", 9, "male", "student", "school", 1, 1, "right"),
        ("zg9", "Ning", 34, "female", "nurse", "hospital", 2, 2, "right"),
    ], [("zg1", "zg2"), ("zg2", "zg4"), ("zg3", "zg4"), ("zg2", "zg9"), ("zg3", "zg9"),
        ("zg4", "zg6"), ("zg5", "zg6"), ("zg4", "zg7"), ("zg5", "zg7"), ("zg4", "zg8"), ("zg5", "zg8")],
     [("zg2", "zg3"), ("zg4", "zg5")]),
    ("Li", "house_02", [
        ("li1", "Jun", 70, "male", "retired", "home", 2, 2, "right"),
        ("li2", "Fang", 68, "female", "retired", "home", 1, 1, "right"),
        ("li3", "Qiang", 42, "male", "manager", "office", 3, 3, "right"),
        ("li4", "Mei", 40, "female", "researcher", "university", 3, 3, "left"),
        ("li5", "Xin", 16, "female", "student", "high_school", 1, 2, "right"),
        ("li6", "Hao", 44, "male", "clerk", "office", 2, 2, "right"),
        ("li7", "Jing", 14, "female", "student", "high_school", 1, 2, "right"),
        ("li8", "Bo", 10, "male", "student", "school", 1, 1, "right"),
    ], [("li1", "li3"), ("li2", "li3"), ("li1", "li6"), ("li2", "li6"),
        ("li3", "li5"), ("li4", "li5"), ("li6", "li7"), ("li6", "li8")],
     [("li1", "li2"), ("li3", "li4")]),
    ("Wang", "house_03", [
        ("wa1", "Lei", 47, "male", "professor", "university", 3, 3, "right"),
        ("wa2", "Yan", 45, "female", "accountant", "office", 3, 3, "right"),
        ("wa3", "Kai", 20, "male", "student", "university", 1, 3, "left"),
        ("wa4", "Lin", 17, "female", "student", "high_school", 1, 2, "right"),
        ("wa5", "Shu", 73, "female", "retired", "home", 1, 1, "right"),
        ("wa6", "Peng", 22, "male", "researcher", "university", 1, 3, "right"),
        ("wa7", "Dan", 50, "male", "farmer", "farm", 1, 1, "right"),
    ], [("wa5", "wa1"), ("wa1", "wa3"), ("wa2", "wa3"), ("wa1", "wa4"), ("wa2", "wa4"),
        ("wa5", "wa7"), ("wa7", "wa6")],
     [("wa1", "wa2")]),
    ("Chen", "house_04", [
        ("ch1", "Gang", 55, "male", "chef", "restaurant", 2, 1, "right"),
        ("ch2", "Li", 53, "female", "chef", "restaurant", 2, 1, "right"),
        ("ch3", "Yu", 30, "female", "doctor", "hospital", 3, 3, "right"),
        ("ch4", "Feng", 32, "male", "engineer", "factory", 2, 3, "left"),
        ("ch5", "Xiao", 4, "female", "child", "kindergarten", 1, 1, "right"),
        ("ch6", "Long", 27, "male", "shopkeeper", "shop", 2, 2, "right"),
    ], [("ch1", "ch3"), ("ch2", "ch3"), ("ch1", "ch6"), ("ch2", "ch6"), ("ch3", "ch5"), ("ch4", "ch5")],
     [("ch1", "ch2"), ("ch3", "ch4")]),
    ("Liu", "house_05", [
        ("lu1", "Bin", 39, "male", "driver", "transport", 1, 1, "right"),
        ("lu2", "Ying", 37, "female", "nurse", "hospital", 2, 2, "right"),
        ("lu3", "Jie", 10, "female", "student", "school", 1, 1, "left"),
        ("lu4", "Ping", 63, "female", "retired", "home", 1, 1, "right"),
        ("lu5", "Cheng", 66, "male", "retired", "home", 1, 2, "right"),
    ], [("lu4", "lu1"), ("lu5", "lu1"), ("lu1", "lu3"), ("lu2", "lu3")],
     [("lu1", "lu2"), ("lu4", "lu5")]),
    ("Yang", "house_06", [
        ("ya1", "Hong", 41, "female", "shopkeeper", "shop", 2, 2, "right"),
        ("ya2", "Le", 15, "male", "student", "high_school", 1, 2, "right"),
        ("ya3", "Xue", 15, "female", "student", "high_school", 1, 2, "left"),
        ("ya4", "Qing", 67, "female", "retired", "home", 1, 1, "right"),
        ("ya5", "Song", 36, "male", "police officer", "police_station", 2, 2, "right"),
    ], [("ya4", "ya1"), ("ya4", "ya5"), ("ya1", "ya2"), ("ya1", "ya3")],
     []),
    ("Huang", "house_07", [
        ("hu1", "Zhi", 58, "male", "principal", "school", 3, 3, "right"),
        ("hu2", "Juan", 56, "female", "teacher", "high_school", 2, 3, "right"),
        ("hu3", "Wen", 29, "female", "lawyer", "office", 3, 3, "right"),
        ("hu4", "Hua", 26, "male", "researcher", "university", 2, 3, "left"),
        ("hu5", "An", 31, "male", "doctor", "hospital", 3, 3, "right"),
    ], [("hu1", "hu3"), ("hu2", "hu3"), ("hu1", "hu4"), ("hu2", "hu4")],
     [("hu1", "hu2"), ("hu3", "hu5")]),
    ("Zhao", "house_08", [
        ("zh1", "Yong", 45, "male", "farmer", "farm", 1, 1, "right"),
        ("zh2", "Xia", 43, "female", "farmer", "farm", 1, 1, "right"),
        ("zh3", "Jia", 12, "female", "student", "school", 1, 1, "right"),
        ("zh4", "Ke", 11, "male", "student", "school", 1, 1, "right"),
    ], [("zh1", "zh3"), ("zh2", "zh3"), ("zh1", "zh4"), ("zh2", "zh4")],
     [("zh1", "zh2")]),
    ("Wu", "house_09", [
        ("wu1", "Sheng", 35, "male", "engineer", "factory", 2, 3, "right"),
        ("wu2", "Lu", 34, "female", "clerk", "office", 2, 2, "left"),
        ("wu3", "Ran", 5, "female", "child", "kindergarten", 1, 1, "right"),
        ("wu4", "Chao", 60, "male", "factory foreman", "factory", 2, 1, "right"),
    ], [("wu4", "wu1"), ("wu1", "wu3"), ("wu2", "wu3")],
     [("wu1", "wu2")]),
    ("Zhou", "house_10", [
        ("zo1", "Tian", 28, "male", "musician", "theater", 1, 2, "left"),
        ("zo2", "Qian", 26, "female", "researcher", "university", 2, 3, "right"),
        ("zo3", "Jian", 54, "male", "shopkeeper", "shop", 2, 1, "right"),
    ], [("zo3", "zo1")],
     [("zo1", "zo2")]),
    ("Xu", "house_11", [
        ("xu1", "Ling", 48, "female", "nurse", "hospital", 2, 2, "right"),
        ("xu2", "Hai", 19, "male", "student", "university", 1, 3, "right"),
        ("xu3", "Lian", 76, "female", "retired", "home", 1, 1, "right"),
    ], [("xu3", "xu1"), ("xu1", "xu2")],
     []),
]

INTEREST_BY_JOB = {
    "researcher": "research", "professor": "research", "doctor": "research",
    "chef": "cooking", "musician": "music", "farmer": "cooking",
}


def main():
    residents = []
    families = {}
    relationships = []
    by_key = {}
    for fi, (surname, house, members, parents, spouses) in enumerate(FAMILIES):
        fid = "family_%02d" % (fi + 1)
        families[fid] = []
        for (key, first, age, gender, job, workplace, income, edu, hand) in members:
            rid = "r_" + key
            interests = set()
            if job in INTEREST_BY_JOB:
                interests.add(INTEREST_BY_JOB[job])
            if age < 23:
                interests.add(rng.choice(["sports", "music"]))
            while len(interests) < 2:
                interests.add(rng.choice(TOPICS))
            res = {
                "id": rid,
                "name": "%s %s" % (first, surname),
                "age": age,
                "gender": gender,
                "job": job,
                "workplace": workplace,
                "residence": house,
                "income_level": income,
                "education_level": edu,
                "interests": sorted(interests),
                "dominant_hand": hand,
                "family_id": fid,
                "avatar_tag": "avatar_%s" % key,
            }
            residents.append(res)
            families[fid].append(rid)
            by_key[key] = res
        for p, c in parents:
            relationships.append({"a": "r_" + p, "b": "r_" + c, "kind": "parent_of"})
        for a, b in spouses:
            relationships.append({"a": "r_" + a, "b": "r_" + b, "kind": "spouse"})

    rel_set = {(r["a"], r["b"], r["kind"]) for r in relationships}

    def add(a, b, kind):
        if a == b:
            return
        sym = kind not in ("parent_of", "grandparent_of", "superior_of", "teacher_of")
        if (a, b, kind) in rel_set or (sym and (b, a, kind) in rel_set):
            return
        rel_set.add((a, b, kind))
        relationships.append({"a": a, "b": b, "kind": kind})

    parent_of = {}
    for r in list(relationships):
        if r["kind"] == "parent_of":
            parent_of.setdefault(r["a"], []).append(r["b"])
    spouse_of = {}
    for r in list(relationships):
        if r["kind"] == "spouse":
            spouse_of[r["a"]] = r["b"]
            spouse_of[r["b"]] = r["a"]
    # grandparents
    for gp, kids in sorted(parent_of.items()):
        for k in kids:
            for gk in parent_of.get(k, []):
                add(gp, gk, "grandparent_of")
    # siblings: share a parent
    children_of = {p: set(ks) for p, ks in parent_of.items()}
    sib_pairs = set()
    for p, ks in sorted(children_of.items()):
        ks = sorted(ks)
        for i in range(len(ks)):
            for j in range(i + 1, len(ks)):
                sib_pairs.add((ks[i], ks[j]))
    for a, b in sorted(sib_pairs):
        add(a, b, "sibling")
    # in-laws: a person and their spouse's parents
    for person, sp in sorted(spouse_of.items()):
        for par, ks in sorted(parent_of.items()):
            if sp in ks and par != person:
                add(par, person, "in_law")

    ids = [r["id"] for r in residents]
    res_by_id = {r["id"]: r for r in residents}
    # neighbors: adults in adjacent houses
    houses = sorted({r["residence"] for r in residents})
    for i in range(len(houses) - 1):
        left = [r for r in residents if r["residence"] == houses[i] and r["age"] >= 18]
        right = [r for r in residents if r["residence"] == houses[i + 1] and r["age"] >= 18]
        for _ in range(2):
            add(rng.choice(left)["id"], rng.choice(right)["id"], "neighbor")
    # friends: similar age, different families
    for _ in range(30):
        a = rng.choice(residents)
        cands = [r for r in residents if r["family_id"] != a["family_id"] and abs(r["age"] - a["age"]) <= 10]
        if cands:
            add(a["id"], rng.choice(cands)["id"], "friend")
    # colleagues / superiors at workplaces with adults
    work = {}
    for r in residents:
        if r["job"] not in ("student", "child", "retired"):
            work.setdefault(r["workplace"], []).append(r)
    for place, staff in sorted(work.items()):
        staff = sorted(staff, key=lambda r: (-r["income_level"], -r["age"], r["id"]))
        if len(staff) < 2:
            continue
        boss = staff[0]
        for s in staff[1:]:
            if boss["income_level"] > s["income_level"] or boss["job"] in ("principal", "manager", "factory foreman", "professor"):
                add(boss["id"], s["id"], "superior_of")
            else:
                add(boss["id"], s["id"], "colleague")
        for i in range(1, len(staff)):
            for j in range(i + 1, len(staff)):
                add(staff[i]["id"], staff[j]["id"], "colleague")
    # teachers and classmates
    pupils = {}
    for r in residents:
        if r["job"] == "student":
            pupils.setdefault(r["workplace"], []).append(r)
    for place, group in sorted(pupils.items()):
        teachers = [r for r in residents if r["workplace"] == place and r["job"] in ("teacher", "professor")]
        for t in teachers:
            for p in group:
                add(t["id"], p["id"], "teacher_of")
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                if abs(group[i]["age"] - group[j]["age"]) <= 1:
                    add(group[i]["id"], group[j]["id"], "classmate")

    world = {
        "schema_version": 1,
        "residents": residents,
        "relationships": relationships,
        "families": families,
    }
    json.dump(world, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")
    kinds = sorted({r["kind"] for r in relationships})
    print("residents=%d families=%d relationships=%d kinds=%s" %
          (len(residents), len(families), len(relationships), kinds), file=sys.stderr)


if __name__ == "__main__":
    main()
