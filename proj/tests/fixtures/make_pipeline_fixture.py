"""Writes the 50-row mock pipeline fixture (data, config, backend replies)."""
import csv
import json
import random
from pathlib import Path

out = Path(__file__).parent / "pipeline"
out.mkdir(exist_ok=True)
rng = random.Random(7)

areas = ["chemistry", "biology", "physics"]
rigor_levels = ["low", "medium", "high"]
openers = {
    "chemistry": "We synthesise a family of catalysts",
    "biology": "We sequence cell lines from a rare tissue",
    "physics": "We measure transport in layered crystals",
}
method_text = {
    "low": "Results are described informally without controls.",
    "medium": "A single experiment with basic controls is reported.",
    "high": "Replicated experiments, ablations and error analysis support the claims.",
}

rows = []
for i in range(50):
    row_id = f"p{i + 1:02d}"
    area = areas[i % 3]
    rigor = rng.choice(rigor_levels)
    grammar = "1" if rng.random() < 0.7 else "0"
    p_good = {"low": 0.15, "medium": 0.4, "high": 0.85}[rigor]
    if grammar == "0":
        p_good -= 0.1
    evaluation = "good" if rng.random() < p_good else "bad"
    abstract = f"{openers[area]} (study {i + 1}). {method_text[rigor]}"
    if grammar == "0":
        abstract += " the writing have several error"
    rows.append(dict(row_id=row_id, abstract=abstract, evaluation=evaluation,
                     area=area, rigor=rigor, grammar=grammar))

with open(out / "data.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["row_id", "abstract", "evaluation"])
    for r in rows:
        w.writerow([r["row_id"], r["abstract"], r["evaluation"]])

features = {"features": [
    {"feature_name": "area", "description": "Research area of the study.",
     "possible_values": areas,
     "extraction_query": "Which research area does the abstract belong to? Options: 'chemistry', 'biology', 'physics'"},
    {"feature_name": "rigor", "description": "Methodological rigor of the reported work.",
     "possible_values": rigor_levels,
     "extraction_query": "How rigorous is the methodology? Options: 'low', 'medium', 'high'"},
    {"feature_name": "grammar", "description": "Whether the abstract is grammatically correct.",
     "possible_values": ["0", "1"],
     "extraction_query": "Is the abstract free of grammar errors? Options: '0', '1'"},
]}

replies = {"discovery::features": "```json\n" + json.dumps(features, indent=2) + "\n```"}
poisoned = {"p07": "extreme", "p31": None}
for r in rows:
    answers = [{"feature_name": k, "answer": r[k]} for k in ("area", "rigor", "grammar")]
    if r["row_id"] in poisoned:
        if poisoned[r["row_id"]] is None:
            replies[f"{r['row_id']}::features"] = "I am unable to assess this abstract."
            continue
        answers[1]["answer"] = poisoned[r["row_id"]]
    replies[f"{r['row_id']}::features"] = json.dumps({"features": answers})

with open(out / "mock_replies.json", "w") as f:
    json.dump(replies, f, indent=2)
    f.write("\n")

config = {
    "dataset": {
        "name": "Synthetic abstracts",
        "description": "Fifty short synthetic research abstracts with a review outcome.",
        "text_column": "abstract",
        "target_column": "evaluation",
        "target_definition": "review outcome, good or bad",
        "columns": {"rigor": {"kind": "ordinal", "categories": rigor_levels}},
    },
    "llm": {"mode": "mock", "mock_fixture": "mock_replies.json", "model": "gpt-4o-mini-2024-07-18",
            "temperature": 0, "top_p": 0.9, "parallelism": 4},
    "discovery": {"sample_size": 40, "seed": 11, "expected_features": 3},
    "generation": {"workflow": "auto", "policy": "strict"},
    "split": {"train_fraction": 0.8, "seed": 42},
    "validation": {"alpha": 0.05, "bootstrap_reps": 500, "seed": 5, "threads": 2},
    "experiments": [{
        "id": "1",
        "stable_attributes": ["area"],
        "flexible_attributes": ["rigor", "grammar"],
        "min_stable_attributes": 0,
        "min_flexible_attributes": 1,
        "min_undesired_support": 2,
        "min_desired_support": 2,
        "min_undesired_confidence": 0.5,
        "min_desired_confidence": 0.5,
        "undesired_state": "bad",
        "desired_state": "good",
    }],
    "evaluation": {"representation": "llm", "classifier": "nb", "seed": 3},
}
with open(out / "config.json", "w") as f:
    json.dump(config, f, indent=2)
    f.write("\n")
