from qmc import bench
from qmc.encoders import EncoderSpec


def test_synthetic_shape():
    data = bench.synthetic(10, 3, num_classes=4, seed=1)
    assert data.features.shape == (10, 3) and set(data.labels.tolist()) == {0, 1, 2, 3}


def test_training_scales_linearly():
    timing = bench.time_training(EncoderSpec("softmax", 2, 20), (2000, 4000, 8000), "mixed", repeats=3)
    assert 2.8 <= timing["train_ratios"]["8000/2000"] <= 5.6, timing


def test_fast_path_speedup():
    out = bench.time_prediction(EncoderSpec("softmax", 2, 16), "mixed")  # k l = 256 * 2
    assert out["predict_dims"]["kl"] == 512
    assert out["speedup"] >= 10, out
