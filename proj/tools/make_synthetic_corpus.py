#!/usr/bin/env python3
"""Writes the bundled 30-patch synthetic corpus (data/synthetic_30.jsonl).

Files touching locking code or adding many lines tend to be revised or
commented, so both the text and the count features carry some signal.
"""
import json
import random
import sys

DAY = 86400
DIRS = ["core", "core/io", "net", "ui", "util"]
NAMES = ["buffer", "socket", "mutex", "widget", "parser", "config", "timer", "cache", "stream", "table"]
PLAIN = ["int count = {n};", "return value;", "size_t size = buffer.size();", "auto item = table.find(key);",
         "config.load(path);", "widget->show();", "stream << value;", "timer.start({n});", "cache.clear();",
         "index += {n};"]
RISKY = ["mutex.lock();", "mutex.unlock();", "std::lock_guard<std::mutex> guard(mutex);", "free(ptr);",
         "ptr = malloc(size);", "thread.join();"]


def lines(rng, n, risky):
    out = []
    for _ in range(n):
        pool = RISKY if risky and rng.random() < 0.6 else PLAIN
        out.append(rng.choice(pool).format(n=rng.randint(0, 99)))
    return out


def main(path, seed=30):
    rng = random.Random(seed)
    authors = ["alice", "bob", "carol", "dave"]
    reviewers = ["erin", "frank", "grace", "heidi", "ivan"]
    paths = [f"{d}/{n}.{ext}" for d in DIRS for n in NAMES for ext in ("cpp", "h")]
    t = 1_600_000_000
    patches = []
    for i in range(30):
        t += rng.randint(10, 40) * DAY
        pid = f"syn{i:03d}"
        author = rng.choice(authors)
        revs = sorted(rng.sample(reviewers, rng.randint(1, 3)))
        chosen = rng.sample(paths, rng.randint(2, 7))
        initial = {"commit_id": f"{pid}-1", "kind": "initial", "timestamp": t, "files": []}
        hot = []
        for p in chosen:
            risky = rng.random() < 0.35
            added = rng.randint(1, 14) + (8 if risky else 0)
            hunk = {"added": lines(rng, added, risky), "removed": lines(rng, rng.randint(0, 4), False),
                    "context_before": lines(rng, rng.randint(0, 3), False),
                    "context_after": lines(rng, rng.randint(0, 3), False)}
            initial["files"].append({"path": p, "hunks": [hunk]})
            if rng.random() < (0.75 if risky else 0.15):
                hot.append(p)
        commits = [initial]
        comments = []
        if hot:
            rev_time = t + rng.randint(1, 48) * 3600
            revised = [p for p in hot if rng.random() < 0.6]
            if revised:
                commits.append({"commit_id": f"{pid}-2", "kind": "revision", "timestamp": rev_time,
                                "files": [{"path": p, "hunks": [{"added": lines(rng, 2, False), "removed": [],
                                                                "context_before": [], "context_after": []}]}
                                          for p in revised]})
            for p in hot:
                if p not in revised or rng.random() < 0.3:
                    comments.append({"file_path": p, "line": rng.randint(1, 40), "commit_id": f"{pid}-1",
                                     "author_id": rng.choice(revs), "timestamp": t + 1800})
        if rng.random() < 0.5:
            comments.append({"file_path": None, "line": None, "commit_id": f"{pid}-1",
                             "author_id": rng.choice(revs), "timestamp": t + 600})
        patches.append({"patch_id": pid, "project": "synthetic", "author_id": author, "reviewer_ids": revs,
                        "submitted_at": t, "commits": commits, "comments": comments})
    with open(path, "w") as f:
        for p in patches:
            f.write(json.dumps(p, sort_keys=True) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/synthetic_30.jsonl")
