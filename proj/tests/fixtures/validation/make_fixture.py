"""Writes the validation-service fixture: 10 dev/test candidates and a
small train split whose source articles partly overlap the candidates."""

import json

URL = "https://en.wikipedia.org/wiki/"

PIVOTS = {
    0: ("2010 Haiti earthquake", "earthquake",
        "The 2010 Haiti earthquake was a catastrophic magnitude 7.0 earthquake."),
    1: ("Hurricane Fair 1999", "news event",
        "Hurricane Fair 1999 was a fundraising concert held after the storm."),
    2: ("2011 Norway attacks", "civilian attack",
        "The 2011 Norway attacks were two sequential lone wolf terrorist attacks."),
    3: ("83rd Academy Awards", "awards",
        "The 83rd Academy Awards ceremony honored the best films of 2010."),
    4: ("2004 Indian Ocean earthquake", "earthquake",
        "The 2004 Indian Ocean earthquake struck off the coast of Sumatra."),
}


def mention(mid, cluster, source, sentence, phrase):
    tokens = sentence.split()
    span_tokens = phrase.split()
    for i in range(len(tokens) - len(span_tokens) + 1):
        if tokens[i:i + len(span_tokens)] == span_tokens:
            first, last = i, i + len(span_tokens) - 1
            break
    else:
        raise ValueError(phrase)
    pivot, infobox, _ = PIVOTS[cluster]
    return {
        "mention_id": mid,
        "tokens": tokens,
        "span": [first, last],
        "mention_text": phrase,
        "source_title": source,
        "target_title": pivot,
        "cluster_id": cluster,
        "metadata": {
            "source_url": URL + source.replace(" ", "_"),
            "target_url": URL + pivot.replace(" ", "_"),
            "infobox_type": infobox,
        },
    }


CANDIDATES = [
    ("dev", mention(0, 0, "Jacmel", "Much of Jacmel was destroyed in the 2010 earthquake and rebuilt later .", "2010 earthquake")),
    ("dev", mention(1, 0, "Port-au-Prince", "The palace collapsed during the earthquake of January 2010 in the capital .", "earthquake")),
    ("dev", mention(2, 0, "Leogane", "Leogane was the town closest to the epicenter of the quake that year .", "quake")),
    ("dev", mention(3, 0, "Hope for Haiti Now", "The telethon raised money for victims of the Haiti earthquake across the island .", "Haiti earthquake")),
    ("dev", mention(4, 1, "Wyclef Jean", "Jean headlined the relief concert organised after the hurricane last autumn .", "relief concert")),
    ("dev", mention(5, 1, "Carnival Records", "The label released a live album from the benefit show in December .", "benefit show")),
    ("test", mention(6, 2, "Oslo", "The government quarter in Oslo was bombed in the 2011 attacks before the shooting .", "2011 attacks")),
    ("test", mention(7, 2, "Utoya", "The island became known worldwide after the massacre on 22 July that summer .", "massacre")),
    ("test", mention(8, 2, "Jens Stoltenberg", "Stoltenberg addressed the nation after the attacks of 22 July in his speech .", "attacks")),
    ("test", mention(9, 2, "Workers Youth League", "The league lost 69 members in the Utoya shooting during its summer camp .", "Utoya shooting")),
]

TRAIN = [
    mention(20, 3, "Jacmel", "A film shot in Jacmel was nominated at the 83rd Academy Awards in February .", "83rd Academy Awards"),
    mention(21, 3, "Colin Firth", "Firth won Best Actor at the Oscars ceremony that year for his role .", "Oscars ceremony"),
    mention(22, 3, "The Social Network", "The drama received eight nominations at the ceremony in Los Angeles .", "ceremony"),
    mention(23, 4, "Oslo", "Norway sent rescue teams after the 2004 tsunami devastated the coast .", "2004 tsunami"),
    mention(24, 4, "Banda Aceh", "The city was nearly flattened by the tsunami of December 2004 and its aftermath .", "tsunami"),
    mention(25, 4, "Phuket", "Beaches on the island were hit hard by the Boxing Day tsunami in Thailand .", "Boxing Day tsunami"),
]


def dump(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True, separators=(",", ":")) + "\n")


dump("candidates.jsonl", [
    {"split": split, "pivot_title": PIVOTS[m["cluster_id"]][0],
     "pivot_summary": PIVOTS[m["cluster_id"]][2], "mention": m}
    for split, m in CANDIDATES
])
dump("train.jsonl", TRAIN)
