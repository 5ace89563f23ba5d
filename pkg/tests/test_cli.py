import numpy as np
import pytest

from hotword import write_wav
from hotword.cli import main

from conftest import noise_clip
from test_stream import burst_clip, spliced_file


@pytest.fixture(scope="module")
def env(tmp_path_factory):
    """Model file, reference wav, spliced stream wav shared by CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    model = root / "model.ewn"
    assert main(["init-weights", "--out", str(model), "--seed", "0"]) == 0

    reference = burst_clip()
    ref_wav = root / "ref.wav"
    write_wav(ref_wav, reference)

    stream_wav = root / "stream.wav"
    write_wav(stream_wav, spliced_file(reference, total_s=4.0, at_s=2.0))
    return root, model, ref_wav, stream_wav


def test_enroll_then_detect_self_match(env, capsys):
    root, model, ref_wav, stream_wav = env
    template = root / "word.ewnt"
    assert main([
        "enroll", "--name", "word", "--refs", str(ref_wav),
        "--model", str(model), "--out", str(template),
    ]) == 0
    capsys.readouterr()

    assert main([
        "detect", "--wav", str(stream_wav), "--model", str(model),
        "--templates", str(template),
    ]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l]
    assert len(lines) == 1
    t_start, hotword, score, distance = lines[0].split("\t")
    assert hotword == "word"
    assert float(t_start) in (1.75, 2.0, 2.25)
    assert float(score) >= 0.999


def test_detect_templates_directory(env, capsys):
    root, model, ref_wav, stream_wav = env
    tdir = root / "templates"
    tdir.mkdir(exist_ok=True)
    assert main([
        "enroll", "--name", "word", "--refs", str(ref_wav),
        "--model", str(model), "--out", str(tdir / "word.ewnt"),
    ]) == 0
    capsys.readouterr()
    assert main([
        "detect", "--wav", str(stream_wav), "--model", str(model),
        "--templates", str(tdir),
    ]) == 0
    assert "word" in capsys.readouterr().out


def test_spectrogram_dump(env, tmp_path, capsys):
    _, _, ref_wav, _ = env
    out = tmp_path / "spec.f32"
    assert main(["spectrogram", "--wav", str(ref_wav), "--out", str(out)]) == 0
    assert out.stat().st_size == 98 * 64 * 4


def test_embed_from_dump(env, tmp_path, capsys):
    _, model, ref_wav, _ = env
    spec = tmp_path / "spec.f32"
    emb = tmp_path / "emb.f32"
    assert main(["spectrogram", "--wav", str(ref_wav), "--out", str(spec)]) == 0
    assert main(["embed", "--spec", str(spec), "--model", str(model), "--out", str(emb)]) == 0
    vector = np.frombuffer(emb.read_bytes(), dtype="<f4")
    assert vector.shape == (256,)
    assert abs(float(np.linalg.norm(vector.astype(np.float64))) - 1.0) <= 1e-5


def test_synth_command(tmp_path, capsys):
    words = tmp_path / "words"
    noises = tmp_path / "noises"
    words.mkdir()
    noises.mkdir()
    write_wav(words / "go.wav", burst_clip(5))
    write_wav(noises / "n.wav", noise_clip(1, duration_s=0.5))
    out = tmp_path / "data"
    assert main([
        "synth", "--words", str(words), "--noises", str(noises),
        "--out", str(out), "--seed", "3", "--per-word", "2",
    ]) == 0
    manifest = (out / "manifest.csv").read_text().splitlines()
    assert manifest[0] == "word,path,noise_path,alpha"
    assert len(manifest) == 3


def test_bench_command(env, tmp_path, capsys):
    root, model, ref_wav, _ = env
    template = root / "word.ewnt"
    if not template.exists():
        assert main([
            "enroll", "--name", "word", "--refs", str(ref_wav),
            "--model", str(model), "--out", str(template),
        ]) == 0

    positives = tmp_path / "pos"
    positives.mkdir()
    for i in range(2):
        write_wav(positives / f"p{i}.wav", burst_clip())
    background = tmp_path / "bg.wav"
    write_wav(background, noise_clip(9, duration_s=60.0, amplitude=0.05))

    report = tmp_path / "report.csv"
    assert main([
        "bench", "--positives", str(positives), "--background", str(background),
        "--model", str(model), "--template", str(template), "--out", str(report),
    ]) == 0
    lines = report.read_text().splitlines()
    assert lines[0] == "cutoff,frr,far_per_hour,n_positives,background_hours"
    assert len(lines) == 20
    assert report.with_suffix(".png").exists()  # figure rendered alongside


def test_bench_no_plot(env, tmp_path, capsys):
    root, model, ref_wav, _ = env
    template = root / "word2.ewnt"
    assert main([
        "enroll", "--name", "word2", "--refs", str(ref_wav),
        "--model", str(model), "--out", str(template),
    ]) == 0
    positives = tmp_path / "pos"
    positives.mkdir()
    write_wav(positives / "p.wav", burst_clip())
    background = tmp_path / "bg.wav"
    write_wav(background, noise_clip(10, duration_s=60.0, amplitude=0.05))
    report = tmp_path / "r.csv"
    assert main([
        "bench", "--positives", str(positives), "--background", str(background),
        "--model", str(model), "--template", str(template), "--out", str(report),
        "--no-plot", "--no-debounce",
    ]) == 0
    assert report.exists()
    assert not report.with_suffix(".png").exists()


def test_usage_errors_exit_1(capsys):
    assert main(["detect", "--bogus-flag"]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["no-such-command"]) == 1
    assert main([]) == 1


def test_data_errors_exit_2(env, tmp_path, capsys):
    _, model, ref_wav, _ = env
    bad_model = tmp_path / "bad.ewn"
    bad_model.write_bytes(b"not a weight file")
    assert main([
        "detect", "--wav", str(ref_wav), "--model", str(bad_model),
        "--templates", str(tmp_path),
    ]) == 2

    bad_wav = tmp_path / "bad.wav"
    bad_wav.write_bytes(b"junk")
    template = tmp_path / "t.ewnt"
    assert main([
        "enroll", "--name", "x", "--refs", str(bad_wav),
        "--model", str(model), "--out", str(template),
    ]) == 2


def test_missing_file_exit_3(env, capsys):
    _, model, _, _ = env
    assert main([
        "detect", "--wav", "/nonexistent/f.wav", "--model", str(model),
        "--templates", "/nonexistent",
    ]) == 3
