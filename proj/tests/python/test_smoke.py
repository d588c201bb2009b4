import math

import numpy as np
import pytest

import agesign


def circle_points(a, b, r, n=64):
    t = np.linspace(0, 2 * math.pi, n, endpoint=False)
    return np.stack([np.rint(a + r * np.cos(t)), np.rint(b + r * np.sin(t))], axis=1).astype(np.int32)


def test_ce_fit_recovers_lattice_circle():
    # 3-4-5 lattice points lie exactly on r = 5
    pts = np.array([[10 + dx, 20 + dy] for dx, dy in
                    [(5, 0), (-5, 0), (0, 5), (0, -5), (3, 4), (-3, 4), (3, -4), (-4, -3)]])
    circle, residual, z = agesign.ce_fit(pts)
    assert circle.a0 == pytest.approx(10, abs=1e-9)
    assert circle.b0 == pytest.approx(20, abs=1e-9)
    assert circle.r0 == pytest.approx(5, abs=1e-9)
    assert residual < 1e-9
    assert z == pytest.approx(10 ** 2 + 20 ** 2 - 25, abs=1e-6)


def test_ce_fit_collinear_raises():
    with pytest.raises(agesign.Error, match="singular-system"):
        agesign.ce_fit(np.array([[0, 0], [1, 1], [2, 2], [3, 3]]))


def test_cht_matches_ce_on_clean_circle():
    pts = circle_points(60, 40, 20)
    c = agesign.cht_unknown_radius(pts, r_min=10, r_max=30, width=120, height=90)
    assert abs(c.a0 - 60) <= 1 and abs(c.b0 - 40) <= 1 and abs(c.r0 - 20) <= 1
    k = agesign.cht_known_radius(pts, 20, 120, 90)
    assert (k.a0, k.b0) == (60.0, 40.0)


def test_sobel_of_constant_is_zero():
    mag = agesign.sobel_magnitude(np.full((20, 30), 128, dtype=np.uint8))
    assert mag.shape == (20, 30)
    assert not mag.any()


def test_extract_candidate_on_disc():
    yy, xx = np.mgrid[0:100, 0:120]
    gray = np.where((xx - 60) ** 2 + (yy - 50) ** 2 <= 25 ** 2, 220, 30).astype(np.uint8)
    obj = agesign.extract_candidate(gray)
    assert obj["mask"].shape == (100, 120)
    assert obj["area"] >= math.pi * 25 ** 2
    circle, _, _ = agesign.ce_fit(obj["boundary"])
    assert abs(circle.a0 - 60) < 1 and abs(circle.b0 - 50) < 1


def test_features_shape_and_range():
    crop = np.zeros((80, 40), dtype=np.uint8)
    crop[:, 10] = 1
    f = agesign.extract_features(crop)
    assert f.shape == (80,)
    assert (f == 10).all()


def test_image_round_trip(tmp_path):
    img = np.random.default_rng(0).integers(0, 256, (7, 9, 3), dtype=np.uint8)
    path = str(tmp_path / "x.ppm")
    agesign.save_image(path, img)
    assert np.array_equal(agesign.load_image(path), img)
    with pytest.raises(agesign.Error):
        agesign.load_image(str(tmp_path / "missing.ppm"))


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    corpus = tmp_path_factory.mktemp("corpus")
    n = agesign.generate_corpus(str(corpus), train_per_class=3, eval_counts=[1, 1, 1],
                                train_nc=3, eval_nc=1, seed=3)
    assert n == 3 * 3 + 3 + 3 + 1
    cfg = agesign.PipelineConfig()
    model, curve, converged = agesign.train_model(str(corpus), cfg, max_epochs=20000)
    assert converged and curve[-1] < curve[0]
    return corpus, cfg, model


def test_model_save_load(trained, tmp_path):
    _, _, model = trained
    path = str(tmp_path / "m.bin")
    model.save(path)
    assert agesign.load_model(path) == model
    assert (model.inputs, model.hidden, model.outputs) == (80, 15, 4)


def test_process_frame_and_annotate(trained):
    _, cfg, model = trained
    frame, truth = agesign.render_sign_frame(agesign.SignClass.AGE18, agesign.Corner.UPPER_RIGHT,
                                             radius=32, seed=5)
    assert frame.shape == (576, 720, 3)
    det, conflict = agesign.process_frame(frame, cfg, model)
    assert not conflict
    assert det.corner == agesign.Corner.UPPER_RIGHT
    assert abs(det.circle.a0 - truth.a0) <= 2 and abs(det.circle.b0 - truth.b0) <= 2
    out = agesign.annotate(frame, det)
    assert out.shape == frame.shape
    assert '"label"' in det.to_json()

    blank, none = agesign.render_sign_frame(agesign.SignClass.NONE)
    assert none is None
    det, _ = agesign.process_frame(blank, cfg, model)
    assert det.label == agesign.SignClass.NONE


def test_benchmark_rows(trained):
    corpus, _, model = trained
    rows = agesign.run_benchmark(str(corpus), model)
    assert [r["detector"] for r in rows] == ["cht"] * 4 + ["ce"] * 4
    assert all(0 <= r["accuracy_pct"] <= 100 for r in rows)
