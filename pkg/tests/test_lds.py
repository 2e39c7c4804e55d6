import numpy as np
import pytest

from oracles import lds_outputs_direct
from specfilt import lds


# ---------------------------------------------------------------- regions


def test_bad_band_frozen_endpoints():
    reg = lds.region_bounds(2 ** 14, 7 / 8)
    (lo, hi), = reg.components
    assert lo == pytest.approx(0.9997509732143779, abs=1e-15)
    assert hi == pytest.approx(0.9999973026016953, abs=1e-15)


def test_bad_band_left_endpoint_t2():
    # the band itself is empty at T = 2 but the raw endpoint is still exposed
    reg = lds.region_bounds(2, 0.0)
    assert reg.is_empty
    assert reg.left == pytest.approx(0.9133566024300068, abs=1e-15)


def test_two_ar_band_empty_at_third():
    assert lds.region_bounds(100, 1 / 3, "two-ar").is_empty


def test_two_ar_band_narrower_than_vanilla():
    # at q = 1/2 the vanilla band is wide open while the two-AR one vanishes
    assert not lds.region_bounds(4096, 0.5, "vanilla").is_empty
    assert lds.region_bounds(4096, 0.5, "two-ar").is_empty
    # where both exist, the two-AR right endpoint sits far lower
    van = lds.region_bounds(4096, 0.1, "vanilla")
    two = lds.region_bounds(4096, 0.1, "two-ar")
    assert not van.is_empty and not two.is_empty
    assert two.left == van.left
    assert two.right < van.right


def test_band_narrows_as_q_grows():
    widths = []
    for q in (0.5, 0.75, 1.0):
        (lo, hi), = lds.region_bounds(4096, q).components
        widths.append(hi - lo)
    assert widths[0] > widths[1] > widths[2] > 0


def test_region_a_components():
    reg = lds.region_a(4096)
    assert reg.kind == lds.REGION_HUG and len(reg.components) == 2
    (l0, h0), (l1, h1) = reg.components
    band = lds.region_b(4096).components[0]
    assert l0 == pytest.approx(0.9 * h0)
    assert h0 == pytest.approx(band[0])  # left component ends where the band starts
    assert l1 == pytest.approx(band[1])  # right component starts where it ends
    assert h1 == 1.0


def test_region_validation():
    with pytest.raises(ValueError):
        lds.region_bounds(1, 0.5)
    with pytest.raises(ValueError):
        lds.region_bounds(16, 0.5, variant="three-ar")
    with pytest.raises(ValueError):
        lds.explicit_interval(0.5, 0.2)
    with pytest.raises(ValueError):
        lds.explicit_interval(-0.1, 0.5)


def test_sample_region_containment_and_split():
    reg = lds.region_a(4096)
    vals = lds.sample_region(reg, 64, seed=3)
    assert vals.shape == (64,)
    (l0, h0), (l1, h1) = reg.components
    first, second = vals[:32], vals[32:]
    assert np.all((first >= l0) & (first <= h0))
    assert np.all((second >= l1) & (second <= h1))


def test_sample_region_odd_count_split():
    reg = lds.region_a(4096)
    vals = lds.sample_region(reg, 7, seed=0)
    (l0, h0), (l1, h1) = reg.components
    assert np.all((vals[:4] >= l0) & (vals[:4] <= h0))
    assert np.all((vals[4:] >= l1) & (vals[4:] <= h1))


def test_sample_region_strictly_inside_open_band():
    reg = lds.region_b(4096)
    (lo, hi), = reg.components
    vals = lds.sample_region(reg, 1000, seed=11)
    assert np.all((vals > lo) & (vals < hi))


def test_sample_region_deterministic():
    reg = lds.explicit_interval(0.2, 0.8)
    a = lds.sample_region(reg, 10, seed=5)
    b = lds.sample_region(reg, 10, seed=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, lds.sample_region(reg, 10, seed=6))


def test_sample_region_degenerate_interval():
    reg = lds.explicit_interval(0.5, 0.5)
    assert np.all(lds.sample_region(reg, 5, seed=0) == 0.5)


def test_sample_empty_region_raises():
    with pytest.raises(ValueError):
        lds.sample_region(lds.region_bounds(100, 1 / 3, "two-ar"), 4, seed=0)


# ---------------------------------------------------------------- systems


def test_make_random_system_norms():
    eig = np.linspace(0.1, 0.9, 16)
    sys = lds.make_random_system(16, 4, 3, eig, seed=0)
    assert sys.norm_b == pytest.approx(1.0, abs=1e-12)
    assert sys.norm_c == pytest.approx(1.0, abs=1e-12)
    assert np.all(sys.D == 0.0)
    assert (sys.d_hidden, sys.d_in, sys.d_out) == (16, 4, 3)


def test_make_random_system_identity_d():
    sys = lds.make_random_system(4, 3, 3, np.zeros(4), seed=1, d_kind="identity")
    assert np.array_equal(sys.D, np.eye(3))


def test_make_random_system_validation():
    with pytest.raises(ValueError):
        lds.make_random_system(4, 2, 2, np.zeros(3), seed=0)
    with pytest.raises(ValueError):
        lds.make_random_system(2, 2, 2, np.array([0.5, 1.5]), seed=0)
    with pytest.raises(ValueError):
        lds.make_random_system(2, 2, 2, np.zeros(2), seed=0, d_kind="full")


def test_make_random_system_deterministic():
    eig = np.full(8, 0.5)
    a = lds.make_random_system(8, 2, 2, eig, seed=9)
    b = lds.make_random_system(8, 2, 2, eig, seed=9)
    assert np.array_equal(a.B, b.B) and np.array_equal(a.C, b.C)


# ---------------------------------------------------------------- simulate


def _scalar_system(alpha):
    return lds.LdsSystem(
        eigenvalues=np.array([alpha]),
        B=np.array([[1.0]]),
        C=np.array([[1.0]]),
        D=np.array([[0.0]]),
    )


def test_simulate_scalar_impulse():
    u = np.zeros((6, 1))
    u[0, 0] = 1.0
    y = lds.simulate(_scalar_system(0.5), u)
    assert y[:, 0] == pytest.approx([0.0, 1.0, 0.5, 0.25, 0.125, 0.0625], abs=0)


def test_simulate_eigenvalue_one_ramp():
    u = np.full((8, 1), 0.3)
    y = lds.simulate(_scalar_system(1.0), u)
    assert y[:, 0] == pytest.approx(0.3 * np.arange(8), rel=1e-15)


def test_simulate_delay_line():
    # alpha = 0 gives y_t = u_{t-1}
    u = np.random.default_rng(0).standard_normal((10, 1))
    y = lds.simulate(_scalar_system(0.0), u)
    assert y[0, 0] == 0.0
    assert y[1:, 0] == pytest.approx(u[:-1, 0], abs=0)


def test_simulate_matches_closed_form_oracle():
    rng = np.random.default_rng(4)
    eig = rng.uniform(0.0, 1.0, 6)
    sys = lds.make_random_system(6, 3, 2, eig, seed=21)
    inputs = lds.gen_inputs("unit-sphere", 3, 40, seed=8)
    got = lds.simulate(sys, inputs)
    want = lds_outputs_direct(sys.eigenvalues, sys.B, sys.C, sys.D, inputs.values)
    assert np.max(np.abs(got - want)) <= 1e-12


def test_simulate_with_feedthrough_matches_oracle():
    sys = lds.make_random_system(5, 2, 2, np.full(5, 0.7), seed=3, d_kind="identity")
    inputs = lds.gen_inputs("rademacher-scaled", 2, 30, seed=12)
    got = lds.simulate(sys, inputs)
    want = lds_outputs_direct(sys.eigenvalues, sys.B, sys.C, sys.D, inputs.values)
    assert np.max(np.abs(got - want)) <= 1e-12


def test_simulate_initial_state():
    y = lds.simulate(_scalar_system(0.5), np.zeros((4, 1)), x0=np.array([2.0]))
    assert y[:, 0] == pytest.approx([2.0, 1.0, 0.5, 0.25], abs=0)


def test_simulate_shape_errors():
    with pytest.raises(ValueError):
        lds.simulate(_scalar_system(0.5), np.zeros((4, 2)))
    with pytest.raises(ValueError):
        lds.simulate(_scalar_system(0.5), np.zeros((4, 1)), x0=np.zeros(2))


# ---------------------------------------------------------------- inputs


@pytest.mark.parametrize("kind", list(lds.INPUT_KINDS))
def test_inputs_unit_norm(kind):
    seq = lds.gen_inputs(kind, 5, 50, seed=2)
    norms = np.linalg.norm(seq.values, axis=1)
    assert norms == pytest.approx(np.ones(50), rel=1e-12)


def test_inputs_rademacher_values():
    seq = lds.gen_inputs("rademacher-scaled", 4, 100, seed=0)
    assert np.unique(np.abs(seq.values)) == pytest.approx([0.5])
    assert np.any(seq.values > 0) and np.any(seq.values < 0)


def test_inputs_constant_repeats():
    seq = lds.gen_inputs("constant", 3, 10, seed=0)
    assert np.all(seq.values == seq.values[0])


def test_inputs_deterministic():
    a = lds.gen_inputs("unit-sphere", 4, 20, seed=13)
    b = lds.gen_inputs("unit-sphere", 4, 20, seed=13)
    assert np.array_equal(a.values, b.values)


def test_inputs_validation():
    with pytest.raises(ValueError):
        lds.gen_inputs("gaussian", 4, 10, seed=0)
    with pytest.raises(ValueError):
        lds.gen_inputs("constant", 0, 10, seed=0)


# ---------------------------------------------------------------- conditioning


def test_conditioning_constant_scalar_closed_form():
    T = 37
    seq = np.ones((T, 1))
    lam, ok = lds.conditioning_check(seq, threshold=0.0)
    assert lam == pytest.approx(T * (T + 1) / 2, rel=1e-14)
    assert ok


def test_conditioning_threshold_formula():
    sys = lds.make_random_system(8, 2, 2, np.zeros(8), seed=0)
    assert lds.conditioning_threshold(sys, 64) == pytest.approx(2.0 / 8.0)


def test_conditioning_pass_and_fail():
    seq = lds.gen_inputs("unit-sphere", 4, 400, seed=1)
    lam, ok = lds.conditioning_check(seq, threshold=1.0)
    assert ok and lam > 1.0
    lam2, ok2 = lds.conditioning_check(seq, threshold=lam + 1.0)
    assert not ok2 and lam2 == lam


def test_conditioning_requires_enough_steps():
    with pytest.raises(ValueError):
        lds.conditioning_check(np.ones((3, 4)), threshold=0.0)


# ---------------------------------------------------------------- system io


def test_system_roundtrip_exact(tmp_path):
    eig = np.random.default_rng(5).uniform(0, 1, 6)
    sys = lds.make_random_system(6, 3, 2, eig, seed=17, d_kind="identity")
    path = tmp_path / "sys.sfl"
    lds.save_system(sys, str(path))
    back = lds.load_system(str(path))
    assert np.array_equal(back.eigenvalues, sys.eigenvalues)
    assert np.array_equal(back.B, sys.B)
    assert np.array_equal(back.C, sys.C)
    assert np.array_equal(back.D, sys.D)
    first = path.read_text().splitlines()[0]
    assert first == "sf-lds v1 d_hidden=6 d_in=3 d_out=2"


@pytest.mark.parametrize(
    "content",
    [
        "",
        "sf-lds v2 d_hidden=1 d_in=1 d_out=1\n",
        "sf-lds v1 d_hidden=1 d_in=1\n",
        "sf-lds v1 d_hidden=1 d_in=1 d_out=1\neigs=0.5\nB=1\nC=1\n",  # missing D
        "sf-lds v1 d_hidden=2 d_in=1 d_out=1\neigs=0.5\nB=1,1\nC=1,1\nD=0\n",
        "sf-lds v1 d_hidden=1 d_in=1 d_out=1\neigs=x\nB=1\nC=1\nD=0\n",
    ],
)
def test_system_load_malformed(tmp_path, content):
    path = tmp_path / "bad.sfl"
    path.write_text(content)
    with pytest.raises(ValueError):
        lds.load_system(str(path))
