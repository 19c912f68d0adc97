#!/usr/bin/env python3
"""Writes the scripted mock dataset under data/mock/.

Task i asks for f(x) = x + offset_i. The session's code generation number
SOLVED_AT[i] is the first correct one; every other generation is wrong, so
with early stopping the trace ends exactly there.
"""
import json
import pathlib

SOLVED_AT = [1, 1, 2, 3, 4, 5, 7, 9, 12, 16]
OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "mock"


def code(body):
    return f"```python\ndef f(x):\n    return {body}\n```"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    responses = {
        "*/gen_directions/*": "1. Re-read the expected return value for small inputs.\n"
        "2. Check the constant offset against the examples.\n"
        "3. Simplify the arithmetic to a single expression.",
        "*/update_shared_info/*": "The refinement changed the offset; compare results before and after.",
        "*/scout_insight/*": "Offsets that ignore the task's constant keep failing.",
    }
    with open(OUT / "tasks.jsonl", "w") as tasks:
        for i, solved in enumerate(SOLVED_AT):
            tid = f"mock/{i}"
            offset = 10 * i + 1
            hidden = [
                {"test_id": f"h{n}", "kind": "assertion", "payload": f"assert f({x}) == {x + offset}"}
                for n, x in enumerate((0, 7, -3))
            ]
            tasks.write(json.dumps({"task_id": tid, "prompt": f"Write f(x) returning x + {offset}.",
                                    "hidden_tests": hidden, "entry_point": "f"}) + "\n")
            responses[f"{tid}/code/{solved}"] = code(f"x + {offset}")
            responses[f"{tid}/init_code/*"] = code(f"x + {offset + 1000}")
            responses[f"{tid}/refine_code/*"] = code(f"x - {offset}")
            responses[f"{tid}/gen_tests/*"] = "```python\n" + "\n".join(
                f"assert f({x}) == {x + offset}" for x in (1, 2, 5)) + "\n```"
    with open(OUT / "script.json", "w") as f:
        json.dump({"responses": responses}, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
