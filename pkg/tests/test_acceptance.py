"""Acceptance criteria, each at its stated tolerance.

Every test tags itself with a criterion number; the conftest prints one
PASS/FAIL line per criterion at the end of the run.
"""

import math
import time

import numpy as np
import pytest

from linksim.cli import main, resolve_config
from linksim.config import load_config, parse_config
from linksim.correlation import periodic_acf_profile
from linksim.metrics import run_point
from linksim.modem import Scheme, constellation
from linksim.pn_codes import (
    assign_user_codes,
    generate_msequence,
    msequence_period,
    primitive_polynomials,
    to_bipolar,
)
from linksim.receiver import receive_user
from linksim.spreading import build_downlink
from linksim.sweep import run_sweep
from linksim.theory import ber_awgn, ber_rayleigh_qpsk, db_to_linear, q_function, semianalytic_ber

PUBLISHED_COUNTS = {0: 15615, 1: 11334, 2: 7520, 3: 4481, 4: 2489}
PUBLISHED_BER_4DB = 1.444e-2
TABLE_BITS = 200_000


@pytest.fixture
def criterion(request):
    def tag(number, title):
        request.node.user_properties.append(("criterion", number))
        request.node.user_properties.append(("title", title))

    def detail(text):
        request.node.user_properties.append(("detail", text))

    tag.detail = detail
    return tag


def _sigma(n, p):
    return math.sqrt(n * p * (1 - p))


def _z(errors, n, p):
    return (errors - n * p) / _sigma(n, p)


def _gap_sigmas(a, b):
    """Separation of two BER estimates in units of their combined standard error."""
    pa, pb = a.ber, b.ber
    se = math.sqrt(pa * (1 - pa) / a.bits_sent + pb * (1 - pb) / b.bits_sent)
    return (pb - pa) / se


def test_criterion_1_table1_reproduction(criterion):
    criterion("1", "QPSK/AWGN/SF=1, 200000 bits, 0-4 dB within 3 sigma")
    start = time.perf_counter()
    records = run_sweep(load_config(resolve_config("examples/table1")))
    elapsed = time.perf_counter() - start
    zs = []
    for rec in records:
        p = ber_awgn("qpsk", db_to_linear(rec.ebn0_db)).ber
        assert rec.bits_sent == TABLE_BITS
        zs.append(_z(rec.bit_errors, TABLE_BITS, p))
        # the published counts sit inside the same band
        assert abs(_z(PUBLISHED_COUNTS[int(rec.ebn0_db)], TABLE_BITS, p)) <= 3
    # the 4 dB BER cell disagrees with its own count; the count-derived value is the target
    count_ber = PUBLISHED_COUNTS[4] / TABLE_BITS
    assert math.isclose(count_ber, 1.2445e-2)
    p4 = ber_awgn("qpsk", db_to_linear(4)).ber
    assert abs(count_ber - p4) <= 3 * math.sqrt(p4 * (1 - p4) / TABLE_BITS)
    assert abs(PUBLISHED_BER_4DB - p4) > 3 * math.sqrt(p4 * (1 - p4) / TABLE_BITS)
    criterion.detail("z = " + ", ".join(f"{z:+.2f}" for z in zs) + f"; {elapsed:.1f} s")
    assert all(abs(z) <= 3 for z in zs)
    assert elapsed < 30


def test_criterion_2_awgn_theory_agreement(criterion):
    criterion("2", "QPSK/16-QAM/8PSK AWGN 0-8 dB within 3 sigma, min_errors 200")
    cfg = load_config(resolve_config("awgn_schemes"))
    assert cfg.stopping.min_errors == 200 and cfg.ebn0_db == tuple(float(d) for d in range(9))
    start = time.perf_counter()
    records = run_sweep(cfg)
    elapsed = time.perf_counter() - start
    worst = 0.0
    by_point = {}
    for rec in records:
        p = ber_awgn(rec.scheme, db_to_linear(rec.ebn0_db)).ber
        worst = max(worst, abs(_z(rec.bit_errors, rec.bits_sent, p)))
        by_point[(rec.scheme, rec.ebn0_db)] = rec.ber
    criterion.detail(f"worst |z| = {worst:.2f} over {len(records)} points; {elapsed:.1f} s")
    assert worst <= 3
    assert elapsed < 300
    # QPSK is the best of the three from 3 dB up, as the closed forms say
    for d in range(3, 9):
        assert by_point[("qpsk", d)] < min(by_point[("qam16", d)], by_point[("psk8", d)])


def test_criterion_3_semianalytic_degeneracy(criterion):
    criterion("3", "semianalytic BER on undistorted frames vs closed form")
    worst_qpsk = worst_qam = 0.0
    for db in range(0, 13):
        g = db_to_linear(db)
        qpsk = constellation("qpsk").points
        worst_qpsk = max(worst_qpsk, abs(semianalytic_ber(qpsk, "qpsk", g) - ber_awgn("qpsk", g).ber))
        qam = constellation("qam16").points
        sa = semianalytic_ber(qam, "qam16", g)
        worst_qam = max(worst_qam, abs(sa - ber_awgn("qam16", g).ber) / sa)
    criterion.detail(f"QPSK max abs diff {worst_qpsk:.1e}; 16-QAM max rel gap {worst_qam:.2%}")
    assert worst_qpsk < 1e-9
    assert worst_qam < 0.05


def test_criterion_4_rayleigh_closed_form(criterion):
    criterion("4", "perfect-CSI Rayleigh QPSK at 0/5/10 dB within 3 sigma")
    cfg = load_config(resolve_config("rayleigh_perfect"))
    records = run_sweep(cfg)
    assert [r.ebn0_db for r in records] == [0.0, 5.0, 10.0]
    expected = [0.14645, 0.064183, 0.02327]
    zs = []
    for rec, ref in zip(records, expected):
        p = ber_rayleigh_qpsk(db_to_linear(rec.ebn0_db))
        assert abs(p - ref) < 5e-6
        zs.append(_z(rec.bit_errors, rec.bits_sent, p))
    criterion.detail("z = " + ", ".join(f"{z:+.2f}" for z in zs))
    assert all(abs(z) <= 3 for z in zs)


def test_criterion_5_mobility_degradation(criterion):
    criterion("5", "block CSI: BER(222 Hz) > BER(111 Hz) > BER(0 Hz), gaps >= 3 sigma")
    cfg = load_config(resolve_config("mobility"))
    assert str(cfg.csi) == "block:64" and cfg.ebn0_db == (10.0,)
    still, slow, fast = run_sweep(cfg)
    assert [round(r.doppler_hz) for r in (still, slow, fast)] == [0, 111, 222]
    assert min(r.bits_sent for r in (still, slow, fast)) >= 1_000_000
    g1, g2 = _gap_sigmas(still, slow), _gap_sigmas(slow, fast)
    criterion.detail(f"BER {still.ber:.4f} < {slow.ber:.4f} < {fast.ber:.4f}; gaps {g1:.1f}, {g2:.1f} sigma")
    assert g1 >= 3 and g2 >= 3


def test_criterion_6_code_algebra(criterion):
    criterion("6", "period, balance, two-valued ACF for degree 3-10; x^5+x^2+1 period 31")
    checked = 0
    for n in range(3, 11):
        for poly in primitive_polynomials(n):
            seq = generate_msequence(poly)
            assert seq.size == msequence_period(poly) == 2**n - 1
            assert int(seq.sum()) == 2 ** (n - 1)
            acf = periodic_acf_profile(to_bipolar(seq)).raw
            assert acf[0] == 2**n - 1 and set(acf[1:]) == {-1}
            checked += 1
    assert msequence_period("x^5+x^2+1") == 31
    criterion.detail(f"{checked} primitive polynomials")


def test_criterion_7a_noiseless_identity(criterion):
    criterion("7a", "noiseless identity, all schemes x SF {1,4,7} x K {1,7}")
    rng = np.random.default_rng(7)
    base = to_bipolar(generate_msequence("x^3+x+1"))
    failures = []
    total = 0
    for scheme in Scheme:
        for sf in (1, 4, 7):
            for k_users in (1, 7):
                codes = assign_user_codes(base, k_users)
                bits = rng.integers(0, 2, (k_users, 84 * scheme.bits_per_symbol), dtype=np.uint8)
                frame = build_downlink(bits, codes, sf, scheme)
                wrong = sum(
                    int(np.count_nonzero(receive_user(frame.composite, u, codes, sf, scheme) != bits[u]))
                    for u in range(k_users)
                )
                total += 1
                if wrong:
                    failures.append(f"{scheme.value}/SF{sf}/K{k_users}")
    criterion.detail(f"{total - len(failures)}/{total} exact; not exact: {', '.join(failures) or 'none'}")
    assert not failures


def test_criterion_7b_sf_invariance(criterion):
    criterion("7b", "single-user QPSK AWGN BER equal across SF {1,4,7} within 3 sigma")
    recs = []
    for sf in (1, 4, 7):
        cfg = parse_config({"scheme": "qpsk", "channel": "awgn", "ebn0_db": 4, "spreading_factor": sf,
                            "min_errors": None, "max_bits": 1_000_000, "frame_bits": 1000, "seed": 0})
        recs.append(run_point(cfg, 4.0))
    gaps = [abs(_gap_sigmas(a, b)) for i, a in enumerate(recs) for b in recs[i + 1:]]
    criterion.detail("BER " + ", ".join(f"{r.ber:.5f}" for r in recs) + f"; max gap {max(gaps):.2f} sigma")
    assert max(gaps) <= 3


def test_criterion_7c_mai_monotone(criterion):
    criterion("7c", "MAI: BER non-decreasing in K {1,4,7}, K=1 vs 7 gap >= 3 sigma")
    cfg = parse_config({"scheme": "qpsk", "channel": "awgn", "ebn0_db": 6, "spreading_factor": 7,
                        "num_users": [1, 4, 7], "min_errors": None, "max_bits": 1_000_000,
                        "frame_bits": 1000, "seed": 0})
    recs = run_sweep(cfg)
    assert [r.users for r in recs] == [1, 4, 7]
    gap = _gap_sigmas(recs[0], recs[2])
    criterion.detail("BER " + ", ".join(f"{r.ber:.5f}" for r in recs) + f"; K=1 vs 7 gap {gap:.1f} sigma")
    assert recs[0].ber <= recs[1].ber <= recs[2].ber
    assert gap >= 3


DETERMINISM = """\
scheme: [qpsk, qam16, psk8]
channel: rayleigh
ebn0_db: "0:6:3"
speed_kmph: [60, 120]
csi: "block:32"
spreading_factor: 7
num_users: [1, 3]
min_errors: 100
max_bits: 50000
frame_bits: 168
seed: 42
theory: true
"""


def test_criterion_8_determinism(criterion, tmp_path):
    criterion("8", "byte-identical CSV across runs and --jobs 1 vs 8")
    cfg = tmp_path / "det.yaml"
    cfg.write_text(DETERMINISM)
    outs = []
    for i, jobs in enumerate((1, 1, 8, 8)):
        out = tmp_path / f"run{i}.csv"
        assert main(["simulate", str(cfg), "--out", str(out), "--jobs", str(jobs)]) == 0
        outs.append(out.read_bytes())
    table = []
    for jobs in (1, 8):
        out = tmp_path / f"table1_{jobs}.csv"
        assert main(["simulate", "examples/table1", "--out", str(out), "--jobs", str(jobs)]) == 0
        table.append(out.read_bytes())
    rows = outs[0].decode().count("\n") - 1
    criterion.detail(f"{rows} rows, 4 runs identical; table1 jobs 1 vs 8 identical")
    assert len(set(outs)) == 1
    assert table[0] == table[1]
