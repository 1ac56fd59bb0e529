#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "angval/errors.hpp"
#include "angval/matrix_io.hpp"
#include "angval/optimize.hpp"
#include "angval/rng.hpp"
#include "angval/trajectory.hpp"

using namespace angval;

namespace {

Frame line(double theta) {
    Eigen::Vector2d v(std::cos(theta), std::sin(theta));
    return Frame(v);
}

void check_diagram1(const AngularEstimates& e, double tol = 1e-6) {
    // rows
    CHECK(e.uniform_outer_lower <= e.outer_lower + tol);
    CHECK(e.outer_lower <= e.outer_upper + tol);
    CHECK(e.outer_upper <= e.uniform_outer_upper + tol);
    CHECK(e.uniform_inner_lower <= e.inner_lower + tol);
    CHECK(e.inner_lower <= e.inner_upper + tol);
    CHECK(e.inner_upper <= e.uniform_inner_upper + tol);
    // columns: outer below inner
    CHECK(e.uniform_outer_lower <= e.uniform_inner_lower + tol);
    CHECK(e.outer_lower <= e.inner_lower + tol);
    CHECK(e.outer_upper <= e.inner_upper + tol);
    CHECK(e.uniform_outer_upper <= e.uniform_inner_upper + tol);
}

}  // namespace

TEST_CASE("builtin sequence patterns match the published constructions") {
    auto ex1 = example1_sequence(0.3, 1.2);
    // expected: phi0, phi1, phi0, phi0, phi1, phi1, phi1, phi1, phi0
    std::vector<double> expect1 = {0.3, 1.2, 0.3, 0.3, 1.2, 1.2, 1.2, 1.2, 0.3};
    for (std::size_t n = 0; n < expect1.size(); ++n) {
        CHECK(ex1.at(n)(1, 0) == doctest::Approx(std::sin(expect1[n])));
    }
    CHECK(ex1.at(15)(1, 0) == doctest::Approx(std::sin(0.3)));
    CHECK(ex1.at(16)(1, 0) == doctest::Approx(std::sin(1.2)));

    auto ex2 = example2_sequence();
    // expected: R R C C R R R R C C C C R and boundary checks at 19/20
    std::string expect2 = "RRCCRRRRCCCCR";
    for (std::size_t n = 0; n < expect2.size(); ++n) {
        double first = ex2.at(n)(0, 0);
        CHECK(first == (expect2[n] == 'R' ? -1.0 : 1.0));
    }
    CHECK(ex2.at(19)(0, 0) == -1.0);
    CHECK(ex2.at(20)(0, 0) == 1.0);

    Eigen::Matrix2d a;
    a << 2, 1, -1, 3;
    auto cst = constant_sequence(a);
    CHECK(cst.at(0) == cst.at(999));

    CHECK_THROWS_AS(example1_sequence(1.0, 0.5), ParamRange);
}

TEST_CASE("orbit angles: rotations, invariant lines, example1 pattern") {
    auto rotseq = rotation_sequence(0.7);
    auto b = orbit_angles(rotseq, line(0.2), 50);
    for (double x : b) CHECK(x == doctest::Approx(0.7).epsilon(1e-12));

    Eigen::Matrix2d d;
    d << 1, 0, 0, 4;
    auto ds = constant_sequence(d);
    auto zeros = orbit_angles(ds, line(0.0), 20);
    for (double x : zeros) CHECK(x == 0.0);

    auto ex1 = example1_sequence(0.25, 0.9);
    auto pat = orbit_angles(ex1, line(1.0), 9);
    std::vector<double> expect = {0.25, 0.9, 0.25, 0.25, 0.9, 0.9, 0.9, 0.9, 0.25};
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(pat[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
}

TEST_CASE("orbit propagation flags singular sequence members") {
    Eigen::Matrix2d sing;
    sing << 1, 0, 0, 0;
    MatrixSequence bad(2, [sing](long n) -> Eigen::MatrixXd {
        if (n == 5) return sing;
        return Eigen::Matrix2d::Identity();
    }, "bad");
    CHECK_THROWS_AS(orbit_angles(bad, line(kPi / 2.0), 10), SequenceSingular);
}

TEST_CASE("frame entries stay bounded under extreme growth") {
    Eigen::Matrix2d grow;
    grow << 1e8, 0, 1, 0.5;
    auto seq = constant_sequence(grow);
    Eigen::MatrixXd f = line(0.77).columns();
    std::vector<double> b = orbit_angles(seq, Frame(f), 1000000);
    CHECK(std::isfinite(b.back()));
    for (int i = 0; i < 5; ++i) CHECK(std::abs(b[b.size() - 1 - i]) <= kPi / 2.0);
}

TEST_CASE("subadditive split of the angle sums is exact") {
    auto ex2 = example2_sequence();
    Frame v = line(0.3);
    auto b = orbit_angles(ex2, v, 300);
    double total = 0.0, first = 0.0, second = 0.0;
    for (int j = 0; j < 300; ++j) {
        total += b[j];
        (j < 120 ? first : second) += b[j];
    }
    CHECK(total == doctest::Approx(first + second).epsilon(1e-15));
}

TEST_CASE("rotation sequence: all eight estimates equal the folded angle") {
    for (double phi : {0.4, 1.2}) {
        EstimatorConfig cfg;
        cfg.s = 1;
        cfg.n_ladder = {16, 64, 256};
        cfg.k_window = 64;
        cfg.search.angle_grid = 16;
        cfg.search.refine = false;
        auto est = estimate_angular_values(rotation_sequence(phi), cfg);
        double want = std::min(phi, kPi - phi);
        for (double v : {est.inner_upper, est.inner_lower, est.outer_upper, est.outer_lower,
                         est.uniform_inner_upper, est.uniform_inner_lower,
                         est.uniform_outer_upper, est.uniform_outer_lower}) {
            CHECK(v == doctest::Approx(want).epsilon(1e-9));
        }
        check_diagram1(est);
    }
}

TEST_CASE("example1 reproduces its published value diagram") {
    const double phi0 = 0.3, phi1 = 1.2;
    EstimatorConfig cfg;
    cfg.s = 1;
    cfg.n_ladder.clear();
    for (long n = 4; n <= (1L << 12); n *= 2) cfg.n_ladder.push_back(n);
    cfg.k_window = 4096;
    cfg.search.angle_grid = 8;  // the sequence is V-independent
    cfg.search.refine = false;
    auto est = estimate_angular_values(example1_sequence(phi0, phi1), cfg);

    CHECK(std::abs(est.uniform_inner_lower - phi0) < 0.02);
    CHECK(std::abs(est.inner_lower - (2 * phi0 + phi1) / 3) < 0.02);
    CHECK(std::abs(est.outer_lower - (2 * phi0 + phi1) / 3) < 0.02);
    CHECK(std::abs(est.inner_upper - (phi0 + 2 * phi1) / 3) < 0.02);
    CHECK(std::abs(est.outer_upper - (phi0 + 2 * phi1) / 3) < 0.02);
    CHECK(std::abs(est.uniform_inner_upper - phi1) < 0.02);
    check_diagram1(est);
}

TEST_CASE("example2 witnesses and estimates") {
    Frame w4 = example2_witness(4);
    CHECK(w4.columns()(0, 0) == doctest::Approx(std::ldexp(1.0, -14)).epsilon(1e-8));
    CHECK_THROWS_AS(example2_witness(11), ParamRange);

    // the witness line reaches span(1,1) exactly when its reflection run starts
    auto seq = example2_sequence();
    long run_start = 4 * (1L << 9) - 4;  // ell = 10
    Frame w10 = example2_witness(10);
    Eigen::MatrixXd f = w10.columns();
    MatrixSequence s2 = seq;
    std::vector<double> b = orbit_angles(s2, w10, run_start + 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(b[run_start + i] == doctest::Approx(kPi / 2.0).epsilon(1e-9));
    }
}

TEST_CASE("diagram ordering holds on every builtin") {
    EstimatorConfig cfg;
    cfg.s = 1;
    cfg.n_ladder = {50, 100, 200};
    cfg.k_window = 100;
    cfg.search.angle_grid = 24;
    cfg.search.refine = false;

    check_diagram1(estimate_angular_values(rotation_sequence(0.9), cfg));
    check_diagram1(estimate_angular_values(example1_sequence(0.2, 1.0), cfg));
    check_diagram1(estimate_angular_values(example2_sequence(), cfg));
    check_diagram1(estimate_angular_values(henon_sequence(), cfg));
    Eigen::Matrix2d a;
    a << 2, 1, -49, 3;
    check_diagram1(estimate_angular_values(constant_sequence(a), cfg));
}

TEST_CASE("kinematic invariance: scaled orthogonal conjugation") {
    auto base = henon_sequence();
    Eigen::MatrixXd q = random_frame(2, 2, rng::derive(101, 0)).columns();
    MatrixSequence tilted(2, [base, q](long n) -> Eigen::MatrixXd {
        double r = 1.0 + 0.5 * ((n * 2654435761u) % 97) / 97.0;  // nonzero scalars
        return r * q * base.at(n) * q.transpose();
    }, "tilted");

    Frame v0 = line(0.37);
    Eigen::MatrixXd qv = q * v0.columns();
    auto b0 = orbit_angles(base, v0, 400);
    auto b1 = orbit_angles(tilted, Frame(qv), 400);
    for (int j = 0; j < 400; ++j) CHECK(std::abs(b0[j] - b1[j]) < 1e-10);
}

TEST_CASE("3d motivating system: geometric decay of mixed subspaces") {
    const double phi = 0.8;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a << std::cos(phi), -std::sin(phi), 0, std::sin(phi), std::cos(phi), 0, 0, 0, 2;
    auto seq = constant_sequence(a);

    // s = 1: mixed lines settle onto e3, the average decays like C/n
    Eigen::Vector3d mixed(1.0, 0.3, 0.7);
    Frame v1 = orthonormalize(mixed);
    std::vector<double> want_g, got;
    for (long n : {100L, 400L, 1600L, 6400L}) {
        auto b = orbit_angles(seq, v1, n);
        double s = 0.0;
        for (double x : b) s += x;
        got.push_back(s / n);
        want_g.push_back(1.0 / n);
    }
    PowerFit fit1 = fit_through_origin(want_g, got);
    CHECK(fit1.r_squared >= 0.99);

    // s = 2: mixed planes converge to phi with C/n error
    Eigen::MatrixXd plane(3, 2);
    plane << 1, 0.2, 0, 0.4, 0.3, 1.0;
    Frame v2 = orthonormalize(plane);
    std::vector<double> err;
    for (long n : {100L, 400L, 1600L, 6400L}) {
        auto b = orbit_angles(seq, v2, n);
        double s = 0.0;
        for (double x : b) s += x;
        err.push_back(std::abs(s / n - phi));
    }
    PowerFit fit2 = fit_through_origin(want_g, err);
    CHECK(fit2.r_squared >= 0.99);
}

TEST_CASE("shift maximizer equivariance checks") {
    EstimatorConfig cfg;
    cfg.s = 1;
    cfg.n_ladder = {64, 256};
    cfg.k_window = 0;
    cfg.search.angle_grid = 180;
    cfg.search.refine = false;

    auto rot_rep = shift_maximizer_check(rotation_sequence(0.6), 1, 3, cfg);
    CHECK(rot_rep.max_angle_discrepancy < 1e-12);

    auto hen_rep = shift_maximizer_check(henon_sequence(), 1, 4, cfg);
    CHECK(hen_rep.max_angle_discrepancy <= 2.0 * kPi / 180);
}

TEST_CASE("from_file sequences") {
    std::string path = "test_seq_tmp.txt";
    {
        Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
        Eigen::Matrix2d b;
        b << 0, -1, 1, 0;
        std::ofstream f(path);
        write_matrix(f, a);
        write_matrix(f, b);
    }
    auto seq = from_file_sequence(path);
    CHECK(seq.at(1)(0, 1) == -1.0);
    CHECK_THROWS_AS(seq.at(2), SequenceExhausted);
    auto per = from_file_sequence(path, true);
    CHECK(per.at(2)(0, 0) == 1.0);
    std::remove(path.c_str());
}
