import pytest

from seqcs.analysis import gowers_norm, gowers_norm_direct, lambda_average, tensor_product_table
from seqcs.complexity import verify_witness
from seqcs.covering import AffineCover, verify_cover
from seqcs.phi_km import (
    PhiDescriptor,
    binomial_product_table,
    counterexample_family,
    default_weight,
    gray_code_check,
    phase_polynomial_table,
    phi_system,
    phi_witness,
    phi_witness_certificate,
    s_km_points,
)
from seqcs.systems import associated_set


def s_km_size_recurrence(p, k, M):
    """|S_{k,M}| via the slice recurrence, as an independent size oracle."""
    if k < 1:
        return 0
    if M == 0:
        return 1
    return sum(s_km_size_recurrence(p, k - j, M - 1) for j in range(p))


def test_s_km_examples():
    pts = s_km_points(3, 4, 2)
    assert len(pts) == 8 and (2, 2) not in pts
    assert s_km_points(5, 3, 1) == [(0,), (1,), (2,)]
    assert s_km_points(3, 99, 2) == s_km_points(3, 2 * 2 + 1, 2)
    assert len(s_km_points(3, 99, 2)) == 9


def test_s_km_lexicographic():
    pts = s_km_points(5, 6, 2)
    assert pts == sorted(pts)
    assert len(pts) == 19


def test_s_km_size_recurrence():
    for p in (2, 3, 5):
        for M in (1, 2, 3):
            for k in range(1, min(M * (p - 1) + 1, 7) + 1):
                assert len(s_km_points(p, k, M)) == s_km_size_recurrence(p, k, M)


def test_descriptor_clamps():
    desc = PhiDescriptor.make(3, 99, 2)
    assert desc.k == 5
    assert desc.size == 9
    with pytest.raises(ValueError):
        PhiDescriptor.make(4, 3, 2)


def test_phi_system_progression():
    assert phi_system(5, 3, 1).forms == ((1, 0), (1, 1), (1, 2))


def test_phi_system_shapes_and_points():
    sys_ = phi_system(3, 4, 2)
    assert sys_.r == 8 and sys_.d == 3
    assert associated_set(sys_).points == tuple(s_km_points(3, 4, 2))
    assert phi_system(5, 6, 2).r == 19


def test_phi_witness_base_case():
    seq, covers = phi_witness(3, 3, 1)
    assert seq == [(2,), (1,), (0,)]
    assert [len(c) for c in covers] == [2, 1, 0]
    assert all(sub.dim == 0 for cover in covers for sub in cover)


def test_phi_witness_f3_m2_k4():
    seq, covers = phi_witness(3, 4, 2)
    assert len(seq) == 8 and seq[-1] == (0, 0)
    for i in range(1, 9):
        assert len(covers[i - 1]) <= 3
        rest = [z for z in s_km_points(3, 4, 2) if z not in set(seq[:i])]
        report = verify_cover(AffineCover(3, 2, tuple(covers[i - 1]), tuple(rest), tuple(seq[:i])))
        assert report["passed"]


def test_phi_witness_f5_m2_k6():
    seq, covers = phi_witness(5, 6, 2)
    assert len(seq) == 19 and seq[-1] == (0, 0)
    assert max(len(c) for c in covers) <= 5


def test_phi_witness_prefix_truncation_gives_witness_everywhere():
    # the certificate bridge verifies at every truncation point of a small grid
    for p, k, M in [(3, 4, 2), (2, 3, 2), (5, 6, 2)]:
        seq, _ = phi_witness(p, k, M)
        system = phi_system(p, k, M)
        for z in (seq[0], seq[len(seq) // 2], (0,) * M):
            cert = phi_witness_certificate(p, k, M, at=z)
            assert cert.k == k - 2
            assert verify_witness(system, cert).passed


def test_phi_certificate_full_length():
    cert = phi_witness_certificate(3, 4, 2)
    assert cert.length == 8
    assert verify_witness(phi_system(3, 4, 2), cert).passed


def test_phi_certificate_needs_k_at_least_two():
    with pytest.raises(ValueError):
        phi_witness_certificate(3, 1, 2)


def test_default_weight():
    assert default_weight(3, 4, 2) == (2, 1)
    assert default_weight(5, 6, 2) == (4, 1)
    assert default_weight(2, 4, 3) == (1, 1, 1)
    with pytest.raises(ValueError, match="exceeds"):
        default_weight(3, 7, 1)


def test_weight_validation_messages():
    with pytest.raises(ValueError, match="sum to k-1"):
        counterexample_family(3, 4, 2, (1, 1))
    with pytest.raises(ValueError, match="first weight entry"):
        counterexample_family(3, 3, 2, (0, 2))
    with pytest.raises(ValueError, match="length M"):
        counterexample_family(3, 4, 2, (2, 1, 0))


def test_family_is_unimodular():
    for f in counterexample_family(3, 4, 2, (2, 1)):
        assert f.is_one_bounded()
        assert abs(abs(f.values) - 1).max() < 1e-12


def test_family_average_is_one_grid():
    cases = [(3, 4, 2, (2, 1)), (3, 3, 2, (2, 0)), (2, 3, 2, (1, 1)), (5, 3, 1, (2,)), (7, 4, 1, (3,))]
    for p, k, M, w in cases:
        fam = counterexample_family(p, k, M, w)
        value = lambda_average(phi_system(p, k, M), fam)
        assert abs(value - 1) <= 1e-12, (p, k, M, w, value)


def test_family_origin_norm_strictly_below_one():
    fam = counterexample_family(3, 4, 2, (2, 1))
    f0 = fam[s_km_points(3, 4, 2).index((0, 0))]
    u2 = gowers_norm(f0, 2)
    assert u2 <= 1 - 1e-3
    assert u2 == pytest.approx(3 ** (-1 / 2), abs=1e-12)


def test_family_tensor_level_multiplies_norm():
    fam1 = counterexample_family(3, 4, 2, (2, 1), ell=1)
    fam2 = counterexample_family(3, 4, 2, (2, 1), ell=2)
    f1 = fam1[0]
    f2 = fam2[0]
    assert f2.n == 2 * f1.n
    assert gowers_norm(f2, 2) == pytest.approx(gowers_norm(f1, 2) ** 2, abs=1e-10)
    # the tensor construction agrees with the generic product helper
    assert gowers_norm_direct(tensor_product_table(f1, 2), 2) == pytest.approx(
        gowers_norm(f2, 2), abs=1e-10
    )


def test_gray_code_vanishes():
    assert gray_code_check(3, 4, 2, (2, 1), trials=300, seed=0) == 0
    assert gray_code_check(5, 3, 1, (2,), trials=200, seed=1) == 0
    # weight (1, 0): the polynomial is constant, so the sum telescopes to zero
    assert gray_code_check(3, 2, 2, (1, 0), trials=100, seed=2) == 0


def test_gray_code_detects_degree_bump():
    # raising the first exponent from w_1 - 1 to w_1 makes the degree match the
    # cube dimension and the alternating sum no longer vanishes
    mutated = binomial_product_table(3, 2, (2, 1))
    assert gray_code_check(3, 4, 2, (2, 1), trials=300, seed=0, polynomial=mutated) != 0


def test_phase_polynomial_degrees():
    table = phase_polynomial_table(3, 4, 2, (2, 1))
    # C(x,1)·C(y,1) = x·y as residues
    expected = [(x * y) % 3 for y in range(3) for x in range(3)]
    assert list(table) == expected
