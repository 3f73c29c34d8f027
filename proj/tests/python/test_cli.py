import json
import os
import shutil
import subprocess

import pytest

from fake_spotify_server import CLIENT_ID, CLIENT_SECRET, FakeSpotify, features


def run(cli, *args, env=None, cwd=None):
    base = {k: v for k, v in os.environ.items() if not k.startswith("SPOTIFY_")}
    base.update(env or {})
    return subprocess.run([cli, *args], capture_output=True, text=True, env=base, cwd=cwd, timeout=600)


def test_help_and_usage(mer_cli):
    assert run(mer_cli, "--help").returncode == 0
    assert run(mer_cli).returncode == 2
    assert run(mer_cli, "evaluate", "--modality", "video").returncode == 2


def test_config_errors_exit_2(mer_cli, tmp_path):
    r = run(mer_cli, "--set", "nonsense=1", "features")
    assert r.returncode == 2 and "unknown setting" in r.stderr
    conf = tmp_path / "bad.conf"
    conf.write_text("seed = 1\nfolds = one\n")
    r = run(mer_cli, "--config", str(conf), "features")
    assert r.returncode == 2 and "line 2" in r.stderr


def test_missing_features_exit_2(mer_cli, tmp_path):
    r = run(mer_cli, "--set", f"output_dir={tmp_path}", "evaluate")
    assert r.returncode == 2
    assert "features" in r.stderr


def test_features_evaluate_rerun_is_byte_identical(mer_cli, fixture_dir, tmp_path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name / "out"
        common = ["--config", str(fixture_dir / "mer.conf"), "--set", f"output_dir={out}", "--only", "mlr"]
        assert run(mer_cli, *common, "features").returncode == 0
        r = run(mer_cli, *common, "evaluate")
        assert r.returncode == 0, r.stderr
        assert "| Multi-modal | MLR |" in r.stdout
        outputs.append((out / "report" / "report.json").read_bytes())
        again = run(mer_cli, *common, "report")
        assert again.returncode == 0 and "| Audio | MLR |" in again.stdout
    assert outputs[0] == outputs[1]
    report = json.loads(outputs[0])
    assert len(report["modality_grid"]) == 6
    assert "jobs" not in report["metadata"]["config"]


def write_dataset(path, rows):
    lines = ["song_id,artist,title,valence,arousal"] + [f"{i},{a},{t},0.1,0.2" for i, a, t in rows]
    path.write_text("\n".join(lines) + "\n")


def test_fetch_without_credentials_exits_2(mer_cli, tmp_path):
    write_dataset(tmp_path / "songs.csv", [("s1", "Artist", "Title")])
    r = run(mer_cli, "--set", f"dataset_csv={tmp_path / 'songs.csv'}", "--set", f"audio_store={tmp_path / 'store.json'}",
            "--set", f"output_dir={tmp_path}", "fetch")
    assert r.returncode == 2
    assert "SPOTIFY_CLIENT_ID" in r.stderr


def test_fetch_against_local_server(mer_cli, tmp_path):
    write_dataset(tmp_path / "songs.csv", [("s1", "OutKast", "Hey Ya"), ("s2", "Nobody", "Nothing"), ("s3", "Band", "Odd")])
    catalog = [("t1", "Outkast", "Hey Ya!"), ("t3", "Band", "Odd")]
    audio = {"t1": features(0.9), "t3": features(1.7)}  # energy out of range: stored without features
    store = tmp_path / "store.json"
    with FakeSpotify(catalog, audio) as fake:
        args = ["--set", f"dataset_csv={tmp_path / 'songs.csv'}", "--set", f"audio_store={store}",
                "--set", f"output_dir={tmp_path / 'out'}", "--set", f"spotify_token_url={fake.base}/token",
                "--set", f"spotify_api_base={fake.base}/v1", "--log-level", "debug", "fetch"]
        env = {"SPOTIFY_CLIENT_ID": CLIENT_ID, "SPOTIFY_CLIENT_SECRET": CLIENT_SECRET}
        r = run(mer_cli, *args, env=env)
        assert r.returncode == 0, r.stderr
        assert CLIENT_SECRET not in r.stdout + r.stderr
        saved = json.loads(store.read_text())
        assert "s2" not in saved
        assert saved["s3"] is None
        assert "s1" in saved and saved["s1"] is not None
        assert "s2" in (tmp_path / "out" / "unmatched.csv").read_text()

        # Cached songs are not requested again.
        before = len(fake.requests)
        r = run(mer_cli, *args, env=env)
        assert r.returncode == 0
        searches = [p for m, p in fake.requests[before:] if p.startswith("/v1/search")]
        assert len(searches) == 1  # only the unmatched song

        bad = run(mer_cli, *args, env={"SPOTIFY_CLIENT_ID": CLIENT_ID, "SPOTIFY_CLIENT_SECRET": "wrong-secret-77"})
        assert bad.returncode == 2
        assert "wrong-secret-77" not in bad.stdout + bad.stderr
