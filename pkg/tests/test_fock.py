import numpy as np
import pytest

from schottky_dimer.curve import Curve
from schottky_dimer.errors import PoleCollisionError
from schottky_dimer.fock import FockWeights, fock_weight, write_weights_csv
from schottky_dimer.minimal_graph import (
    MinimalGraph,
    Track,
    build_honeycomb_patch,
    build_square_patch,
)
from schottky_dimer.schottky import SchottkyGroup


@pytest.fixture(scope="module")
def square6():
    return build_square_patch(6, 6)


@pytest.fixture(scope="module")
def curve_g0():
    return Curve(None)


@pytest.fixture(scope="module")
def curve_g1():
    return Curve(SchottkyGroup([3.0 + 1.0j], [0.05]), word_length=8)


@pytest.fixture(scope="module")
def curve_g2():
    return Curve(
        SchottkyGroup([-1.0 + 1.0j, 13.0 + 1.1j], [0.08, 0.06]), word_length=6
    )


@pytest.fixture(scope="module")
def fw_g0(curve_g0, square6):
    return FockWeights(curve_g0, square6)


@pytest.fixture(scope="module")
def fw_g1(curve_g1, square6):
    return FockWeights(curve_g1, square6)


@pytest.fixture(scope="module")
def fw_g2(curve_g2, square6):
    return FockWeights(curve_g2, square6)


class TestGenusZeroOracles:
    def test_weights_are_angle_differences(self, fw_g0, square6):
        for e in square6.edges:
            expected = fw_g0.angle(e.minus_track) - fw_g0.angle(e.plus_track)
            assert fw_g0.weights[e.index] == pytest.approx(expected)

    def test_face_to_white_step_oracle(self):
        patch = build_square_patch(2, 2, vertical_angles=[0.0, 2.0],
                                   horizontal_angles=[1.0, 3.0])
        fw = FockWeights(Curve(None), patch)
        e = patch.edges[0]
        val = fw.transport(("F", e.left_face), ("W", e.white), 2j)
        assert val == pytest.approx((-1 - 2j) / 5)

    def test_kernel_rows_vanish_exactly(self, fw_g0):
        rng = np.random.default_rng(5)
        for _ in range(4):
            u = complex(rng.uniform(-20, 20), rng.uniform(0.5, 3.0))
            right, left = fw_g0.kernel_residuals(u)
            assert max(right.values()) < 1e-12
            assert max(left.values()) < 1e-12

    def test_local_identity_is_partial_fractions(self, fw_g0, square6):
        e = square6.edges[9]
        u = 1.7 + 2.3j
        lhs, rhs = fw_g0.identity_sides(e, u)
        beta = fw_g0.angle(e.minus_track)
        alpha = fw_g0.angle(e.plus_track)
        assert rhs == pytest.approx(1 / (u - beta) - 1 / (u - alpha))
        assert lhs == pytest.approx(rhs)

    def test_honeycomb_kernel_rows_vanish(self):
        patch = build_honeycomb_patch(3, 3)
        fw = FockWeights(Curve(None), patch)
        right, left = fw.kernel_residuals(0.8 + 1.9j)
        assert max(right.values()) < 1e-12
        assert max(left.values()) < 1e-12

    def test_inverse_rows_hit_identity(self, fw_g0, square6):
        whites = square6.interior_whites()
        worst, product = fw_g0.inverse_residual(cols=whites[:2])
        assert worst < 1e-9
        assert product[(whites[0], whites[0])].real == pytest.approx(1.0)


class TestReality:
    def test_face_vectors_real(self, curve_g1, fw_g1, square6):
        for f in square6.faces:
            div = fw_g1.ledger.divisor(fw_g1.ledger.face_counter(f.index))
            vec = curve_g1.abel(div)
            assert np.max(np.abs(vec.imag)) < 1e-10

    def test_weights_real(self, fw_g1):
        scale = max(abs(k) for k in fw_g1.weights.values())
        assert max(abs(k.imag) for k in fw_g1.weights.values()) < 1e-10 * scale

    def test_inverse_entry_real(self, fw_g1):
        val = fw_g1.inverse_entry("b3_3", "w2_2")
        assert abs(val.imag) < 1e-10


class TestKernelIdentities:
    def test_genus1_kernel_rows(self, fw_g1):
        rng = np.random.default_rng(17)
        for _ in range(3):
            u = complex(rng.uniform(-15, 25), rng.uniform(0.8, 3.0))
            right, left = fw_g1.kernel_residuals(u)
            assert max(right.values()) < 1e-8
            assert max(left.values()) < 1e-8

    def test_genus2_kernel_rows(self, fw_g2):
        right, left = fw_g2.kernel_residuals(4.3 + 1.8j)
        assert max(right.values()) < 1e-6
        assert max(left.values()) < 1e-6

    def test_genus1_local_identity(self, fw_g1, square6):
        rng = np.random.default_rng(23)
        for _ in range(6):
            e = square6.edges[int(rng.integers(len(square6.edges)))]
            u = complex(rng.uniform(-15, 25), rng.uniform(0.8, 3.0))
            assert fw_g1.identity_residual(e, u) < 1e-8

    def test_genus2_local_identity(self, fw_g2, square6):
        assert fw_g2.identity_residual(square6.edges[17], 6.0 + 1.9j) < 1e-6

    def test_path_independence_through_anchors(self, fw_g1, square6):
        rng = np.random.default_rng(31)
        u = 2.6 + 1.4j
        blacks = square6.blacks
        whites = square6.whites
        faces = square6.faces
        for _ in range(10):
            b = blacks[int(rng.integers(len(blacks)))]
            w = whites[int(rng.integers(len(whites)))]
            mid = ("F", int(rng.integers(len(faces))))
            direct = fw_g1.transport(("B", b), ("W", w), u)
            split = fw_g1.transport(("B", b), mid, u) * fw_g1.transport(
                mid, ("W", w), u
            )
            assert abs(direct - split) < 1e-10 * abs(direct)


class TestInverse:
    def test_genus1_inverse_single_column(self, fw_g1, square6):
        whites = square6.interior_whites()
        worst, product = fw_g1.inverse_residual(cols=[whites[0]])
        assert worst < 1e-5
        assert product[(whites[0], whites[0])].real == pytest.approx(1.0, abs=1e-6)

    def test_alternate_u0_still_inverts(self, fw_g1, square6):
        w = square6.interior_whites()[0]
        worst, _ = fw_g1.inverse_residual(rows=[w], cols=[w], u0=-2.0 + 9j, tol=1e-8)
        assert worst < 1e-5

    def test_path_into_disc_rejected(self, fw_g1, square6):
        # lower polyline leg from conj(5 + 9j) clips the disc around 3 - 1j
        w = square6.interior_whites()[0]
        with pytest.raises(PoleCollisionError, match="disc"):
            fw_g1.inverse_residual(rows=[w], cols=[w], u0=5.0 + 9j, tol=1e-8)

    def test_default_crossing_points(self, fw_g0):
        # direction up-right wraps through infinity, down-right hits gap (8, 9)
        assert fw_g0.default_crossing("b3_3", "w2_2") == pytest.approx(12.0)
        assert fw_g0.default_crossing("b3_1", "w2_2") == pytest.approx(8.5)

    def test_crossing_on_angle_rejected(self, fw_g0):
        with pytest.raises(PoleCollisionError, match="angle"):
            fw_g0.inverse_entry("b3_3", "w2_2", u_c=4.0 + 1e-9)

    def test_missing_embedding_needs_explicit_crossing(self, curve_g0):
        patch = build_square_patch(4, 4)
        bare = MinimalGraph(
            patch.whites,
            patch.blacks,
            [(e.white, e.black, e.plus_track, e.minus_track) for e in patch.edges],
            {k: Track(t.angle, t.lift) for k, t in patch.tracks.items()},
        )
        fw = FockWeights(curve_g0, bare)
        with pytest.raises(ValueError, match="u_c"):
            fw.inverse_entry("b1_1", "w0_0")


class TestGaugeChoices:
    def test_relifting_angles_leaves_weights_unchanged(self, curve_g1, square6):
        base = FockWeights(curve_g1, square6)
        relift = {
            k: Track(t.angle, t.lift + 7.0, t.direction, t.offset)
            for k, t in square6.tracks.items()
        }
        other_graph = MinimalGraph(
            square6.whites,
            square6.blacks,
            [(e.white, e.black, e.plus_track, e.minus_track) for e in square6.edges],
            relift,
            square6.positions,
        )
        other = FockWeights(curve_g1, other_graph)
        assert other.weights == base.weights

    def test_integer_t_shift_invisible(self, curve_g1, square6):
        a = FockWeights(curve_g1, square6, t=[0.3])
        b = FockWeights(curve_g1, square6, t=[1.3])
        for k in a.weights:
            assert abs(a.weights[k] - b.weights[k]) < 1e-10 * abs(a.weights[k])

    def test_rebasing_face_rescales_kernel(self, curve_g1, square6):
        # moving the ledger base multiplies the weights by a gauge factor
        # constant along each face pair; kernel identities must survive
        interiors = square6.interior_faces()
        moved = FockWeights(curve_g1, square6, base_face=interiors[1].index)
        right, left = moved.kernel_residuals(1.9 + 2.1j)
        assert max(right.values()) < 1e-8
        assert max(left.values()) < 1e-8


class TestGuards:
    def test_pole_collision_names_track(self, fw_g1):
        with pytest.raises(PoleCollisionError, match="track"):
            fw_g1.kernel_form("b1_1", "w0_0", fw_g1.angle("v0") + 1e-8j)

    def test_kasteleyn_phases_match_reference(self, fw_g1, fw_g2):
        for fw in (fw_g1, fw_g2):
            report = fw.kasteleyn_report()
            assert report["ok"]
            assert report["max_phase_mismatch"] < 1e-8

    def test_csv_dump(self, fw_g1, square6, tmp_path):
        path = tmp_path / "weights.csv"
        write_weights_csv(fw_g1, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "w_id,b_id,re,im,alpha,beta,face,face_prime"
        assert len(lines) == 1 + len(square6.edges)

    def test_fock_weight_helper(self, curve_g0, square6):
        e = square6.edges[0]
        val = fock_weight(curve_g0, square6, e.index)
        assert val == pytest.approx(
            square6.tracks[e.minus_track].angle - square6.tracks[e.plus_track].angle
        )
