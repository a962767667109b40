#!/usr/bin/env python3
"""Regenerates the deterministic fixture set under fixtures/.

Usage: python3 tools/make_fixtures.py [--out fixtures]

Model files under fixtures/models are produced by the CLI afterwards:
  speakloop train-moderation --data fixtures/moderation/training.csv \
      --series fixtures/submission/analysis.json --out fixtures/models --seed 7
"""

import argparse
import io
import json
import math
import os
import struct
import tarfile
import wave

import numpy as np

RATE = 16000
SECONDS = 30.0
FPS = 5
N_FRAMES = 150
W, H = 80, 60

TRANSCRIPT = (
    "Um, so my name is Jordan and I am a software developer. I grew up in a small town, uh, "
    "near the lake. You know, I always liked building things with my hands. In college I studied "
    "computer science and I, like, worked on small robots. Now I build tools that help teams learn "
    "faster. I enjoy hiking, reading and cooking with friends. Um, I think my best skill is "
    "listening carefully. Thank you so much for your time today."
)

QUALITIES = ["eye contact", "pacing", "friendliness", "vocal variety", "avoiding filler words"]


def words():
    toks = TRANSCRIPT.split()
    assert len(toks) == 80, len(toks)
    return toks


def timings(rng, toks):
    raw = []
    t = 0.0
    for tok in toks:
        base = 0.16 + 0.045 * len(tok.strip(",.").replace("'", ""))
        dur = min(base, 0.55) * rng.uniform(0.9, 1.1)
        raw.append((t, t + dur))
        gap = 0.07 * rng.uniform(0.6, 1.4)
        if tok.endswith("."):
            gap += 0.45
        elif tok.endswith(","):
            gap += 0.2
        t += dur + gap
    scale = (SECONDS - 1.0) / t
    return [(0.5 + a * scale, 0.5 + b * scale) for a, b in raw]


def synth_audio(rng, toks, times):
    n = int(RATE * SECONDS)
    t = np.arange(n) / RATE
    audio = rng.normal(0.0, 0.002, n)
    for i, (tok, (a, b)) in enumerate(zip(toks, times)):
        s, e = int(a * RATE), int(b * RATE)
        seg = np.arange(e - s) / RATE
        filler = tok.strip(",.").lower() in ("um", "uh", "like")
        f0 = 118.0 if filler else 150.0 + 35.0 * math.sin(i * 0.7) + 20.0 * math.sin(i * 0.13)
        glide = f0 * (1.0 + (0.0 if filler else 0.06) * np.sin(2 * np.pi * seg / max(b - a, 1e-3)))
        phase = 2 * np.pi * np.cumsum(glide) / RATE
        tone = np.sin(phase) + 0.5 * np.sin(2 * phase) + 0.25 * np.sin(3 * phase)
        env = np.sin(np.pi * np.clip(seg / max(b - a, 1e-3), 0, 1)) ** 0.5
        amp = (0.12 if filler else rng.uniform(0.25, 0.5)) / 1.75
        audio[s:e] += amp * env * tone
    return np.clip(audio, -1.0, 1.0)


def write_wav(path, samples):
    pcm = np.round(samples * 32767).astype("<i2")
    with wave.open(path, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(RATE)
        w.writeframes(pcm.tobytes())


def synth_frames(rng):
    yy, xx = np.mgrid[0:H, 0:W]
    background = 40 + 30 * (xx / W) + 8 * ((xx // 8 + yy // 8) % 2)
    frames = []
    for i in range(N_FRAMES):
        t = i / FPS
        sway = 6 * math.sin(2 * math.pi * t / 7.0)
        if 8 <= t < 10 or 20 <= t < 22:
            sway += 8 * math.sin(2 * math.pi * t * 1.5)
        cx, cy = W / 2 + sway, H / 2 + 4
        body = ((xx - cx) / 14) ** 2 + ((yy - cy) / 22) ** 2 <= 1
        head = ((xx - cx) / 8) ** 2 + ((yy - (cy - 20)) / 9) ** 2 <= 1
        img = background.astype(float)
        img[body] = 170
        img[head] = 200
        img += rng.integers(-3, 4, size=img.shape)
        frames.append(np.clip(img, 0, 255).astype(np.uint8))
    return frames


def pgm(frame):
    return b"P5\n%d %d\n255\n" % (W, H) + frame.tobytes()


def smile_scores():
    out = []
    for i in range(N_FRAMES):
        t = i / FPS
        v = 0.35 + 0.2 * math.sin(2 * math.pi * t / 11.0)
        if 1.5 <= t < 4 or 27 <= t < 29.5:
            v += 0.3
        out.append(min(max(v, 0.0), 1.0))
    return out


def feedback():
    comments = [
        ("c1", "r-ana", "Great smile at the start, it made the intro feel warm and friendly!", "friendliness", 2.5, 1000),
        ("c2", "r-ana", "Try to reduce the um and uh sounds when you switch topics.", "speech", 1.0, 1001),
        ("c3", "r-ana", "good", "movement", None, 1002),
        ("c4", "r-ben", "Your hand gestures around the robot story were distracting; keep them lower.", "movement", 9.0, 1100),
        ("c5", "r-ben", "Nice pacing overall, and the ending sounded confident and clear.", "speech", 28.0, 1101),
        ("c6", "r-ben", "The middle part was boring and a bit flat.", "speech", 15.0, 1102),
    ]
    ratings = [
        {"reviewer_id": "r-ana", "ratings": dict(zip(QUALITIES, [4, 3, 5, 3, 2])), "overall_rating": 4},
        {"reviewer_id": "r-ben", "ratings": dict(zip(QUALITIES, [3, 4, 4, 3, 3])), "overall_rating": 3},
    ]
    return {
        "schema_version": 1,
        "video_id": "fixture-video",
        "condition": "treatment",
        "prompt_index": 1,
        "title": "Tell me about yourself, take one",
        "description": "First attempt; please comment on filler words.",
        "qualities": QUALITIES,
        "comments": [
            {"id": i, "author_id": a, "text": t, "category": c, "video_timestamp": ts, "created_at": cr}
            for i, a, t, c, ts, cr in comments
        ],
        "ratings": ratings,
    }


POSITIVE = ["great", "nice", "excellent", "clear", "confident", "love", "good", "strong", "engaging", "warm"]
NEGATIVE = ["bad", "boring", "weak", "distracting", "monotone", "awkward", "poor", "flat", "confusing", "nervous"]
TOPICS = {
    "movement": ["gestures", "posture", "hand movement", "body language", "eye contact", "swaying"],
    "friendliness": ["smile", "tone", "warmth", "expression", "energy", "attitude"],
    "speech": ["pacing", "volume", "filler words", "articulation", "pitch", "pauses"],
}
ADVICE = [
    "try to slow down in the middle",
    "keep your hands still while you explain the main point",
    "pause before the key sentence",
    "look at the camera more often",
    "practice the opening a few more times",
    "vary your pitch when you list examples",
]


def training_rows(rng):
    rows = []
    k = 0
    for category, topics in TOPICS.items():
        for j in range(60):
            positive = rng.random() < 0.5
            word = rng.choice(POSITIVE if positive else NEGATIVE)
            topic = rng.choice(topics)
            n_advice = int(rng.integers(0, 3))
            parts = [f"{word} {topic}"]
            for _ in range(n_advice):
                parts.append(str(rng.choice(ADVICE)))
            text = ", ".join(parts)
            punct = rng.random() < 0.6
            caps = rng.random() < 0.6
            if caps:
                text = text[0].upper() + text[1:]
            if punct:
                text += "." if rng.random() < 0.7 else "!"
            on_video = rng.random() < 0.7
            ts = float(np.round(rng.uniform(0.5, 29.5), 2)) if on_video else None
            score = 14 + 0.12 * len(text) + 3 * punct + 3 * caps + rng.normal(0, 1.5)
            score = float(np.clip(np.round(score, 1), 10, 40))
            sentiment = "positive" if positive else "negative"
            rows.append([f"t{k:03d}", "fixture-video" if on_video else f"other-{k % 7}", text, category,
                         "" if ts is None else f"{ts}", f"{score}", sentiment])
            k += 1
    return rows


def ratings_export(rng):
    header = "rater_id,video_id,user_id,prompt_index,condition,overall_rating,timestamp"
    users = [f"u{i:02d}" for i in range(1, 21)]
    condition = {u: ("treatment" if i % 2 == 0 else "control") for i, u in enumerate(users)}
    base = {u: rng.uniform(2.4, 3.8) for u in users}
    lines = [header]
    ts = 100000
    for prompt in range(1, 6):
        for u in users:
            video = f"{u}-p{prompt}"
            if prompt == 2 and u == "u03":
                # an earlier attempt, superseded by the final video below
                lines.append(f"u04,{u}-p2-draft,{u},2,{condition[u]},2,{ts}")
                ts += 1
            peers = [p for p in users if p != u and condition[p] == condition[u]]
            raters = rng.choice(peers, size=4, replace=False)
            gain = 0.25 if condition[u] == "treatment" else 0.05
            for r in raters:
                value = base[u] + gain * (prompt - 1) + rng.normal(0, 0.5)
                value = int(min(5, max(1, round(value))))
                lines.append(f"{r},{video},{u},{prompt},{condition[u]},{value},{ts}")
                ts += 1
    # a rater revising an earlier score: latest wins
    first = lines[1].split(",")
    first[5] = "5"
    first[6] = str(ts)
    lines.append(",".join(first))
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "fixtures"))
    args = ap.parse_args()
    out = os.path.abspath(args.out)
    rng = np.random.default_rng(20160401)

    sub = os.path.join(out, "submission")
    os.makedirs(sub, exist_ok=True)
    toks = words()
    times = timings(rng, toks)
    write_wav(os.path.join(sub, "audio.wav"), synth_audio(rng, toks, times))

    frames = synth_frames(rng)
    files = {f"frame_{i:03d}.pgm": pgm(f) for i, f in enumerate(frames)}
    files["manifest.json"] = json.dumps({"frame_rate": FPS}).encode() + b"\n"
    with tarfile.open(os.path.join(sub, "frames.tar"), "w", format=tarfile.USTAR_FORMAT) as tar:
        for name in sorted(files):
            info = tarfile.TarInfo(name)
            info.size = len(files[name])
            info.mtime = 0
            info.mode = 0o644
            tar.addfile(info, io.BytesIO(files[name]))

    conf_rng = np.random.default_rng(7)
    transcript = {
        "schema_version": 1,
        "language": "en",
        "words": [
            {"text": tok, "start": round(a, 3), "end": round(b, 3), "confidence": round(float(conf_rng.uniform(0.7, 0.99)), 3)}
            for tok, (a, b) in zip(toks, times)
        ],
    }
    with open(os.path.join(sub, "transcript.json"), "w") as fh:
        json.dump(transcript, fh, indent=1)
        fh.write("\n")
    with open(os.path.join(sub, "smile.txt"), "w") as fh:
        fh.write("range 0 1\n")
        for s in smile_scores():
            fh.write(f"{s:.4f}\n")
    with open(os.path.join(sub, "feedback.json"), "w") as fh:
        json.dump(feedback(), fh, indent=1)
        fh.write("\n")

    mod = os.path.join(out, "moderation")
    os.makedirs(mod, exist_ok=True)
    import csv

    with open(os.path.join(mod, "training.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["comment_id", "video_id", "text", "category", "timestamp", "score", "sentiment"])
        w.writerows(training_rows(rng))

    with open(os.path.join(out, "ratings_export.csv"), "w") as fh:
        fh.write(ratings_export(rng))


if __name__ == "__main__":
    main()
