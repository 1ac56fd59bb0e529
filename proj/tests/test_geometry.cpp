#include <doctest.h>

#include <cmath>

#include "angval/errors.hpp"
#include "angval/geometry.hpp"
#include "angval/rng.hpp"

using namespace angval;

namespace {
Frame span_of(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double e : v) x(i++) = e;
    return orthonormalize(x);
}
}  // namespace

TEST_CASE("orthonormalize basics") {
    Eigen::MatrixXd e12(3, 2);
    e12 << 1, 0, 0, 1, 0, 0;
    Frame f = orthonormalize(e12);
    CHECK(max_angle(f, Frame(e12)) == 0.0);

    Frame g = span_of({1.0, 1.0});
    CHECK(std::abs(std::abs(g.columns()(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-15);

    Eigen::MatrixXd scaled(2, 2);
    scaled << 2, 0, 0, 3;
    Frame h = orthonormalize(scaled);
    CHECK(h.orthonormality_defect() <= 1e-12);
    CHECK(max_angle(h, Frame(Eigen::MatrixXd::Identity(2, 2))) == 0.0);

    Eigen::MatrixXd rank1(3, 2);
    rank1 << 1, 2, 1, 2, 1, 2;
    CHECK_THROWS_AS(orthonormalize(rank1), RankDeficient);
}

TEST_CASE("principal angles on known pairs") {
    Frame e1 = span_of({1, 0});
    Frame e2 = span_of({0, 1});
    auto set = principal_angles(e1, e2);
    REQUIRE(set.angles.size() == 1);
    CHECK(set.angles[0] == doctest::Approx(kPi / 2).epsilon(1e-14));

    auto same = principal_angles(e1, e1);
    CHECK(same.angles[0] == 0.0);

    Eigen::MatrixXd p(3, 2), q(3, 2);
    p << 1, 0, 0, 1, 0, 0;
    q << 1, 0, 0, 1.0 / std::sqrt(2.0), 0, 1.0 / std::sqrt(2.0);
    auto r3 = principal_angles(orthonormalize(p), orthonormalize(q));
    CHECK(r3.angles[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r3.angles[1] == doctest::Approx(kPi / 4).epsilon(1e-12));
    CHECK(max_angle(orthonormalize(p), orthonormalize(q)) ==
          doctest::Approx(kPi / 4).epsilon(1e-12));

    CHECK(max_angle(span_of({1, 0}), span_of({1, 1})) ==
          doctest::Approx(kPi / 4).epsilon(1e-13));

    CHECK_THROWS_AS(principal_angles(e1, span_of({1, 0, 0})), DimensionMismatch);
}

TEST_CASE("principal angle symmetry and defining relation") {
    for (int t = 0; t < 40; ++t) {
        int d = 3 + t % 4;
        int s = 1 + t % std::min(3, d - 1);
        Frame p = random_frame(d, s, rng::derive(11, 1, t));
        Frame q = random_frame(d, s, rng::derive(11, 2, t));
        auto pq = principal_angles(p, q);
        auto qp = principal_angles(q, p);
        for (int j = 0; j < s; ++j) {
            CHECK(std::abs(pq.angles[j] - qp.angles[j]) < 1e-10);
            // cos(phi_j) = v_j . w_j
            double c = pq.left_vectors.col(j).dot(pq.right_vectors.col(j));
            CHECK(std::abs(std::cos(pq.angles[j]) - c) < 1e-10);
        }
        for (int j = 1; j < s; ++j) CHECK(pq.angles[j] >= pq.angles[j - 1]);
    }
}

TEST_CASE("angle sum estimate for v+w (norm inequality)") {
    for (int t = 0; t < 60; ++t) {
        rng::Stream st(rng::derive(13, 0, t));
        int d = 2 + t % 4;
        Eigen::VectorXd v(d), w(d);
        for (int i = 0; i < d; ++i) {
            v(i) = st.next_normal();
            w(i) = st.next_normal();
        }
        if (v.norm() >= w.norm()) v *= 0.5 * w.norm() / v.norm();
        if (v.norm() == 0.0) continue;
        double ang = max_angle(orthonormalize(Eigen::MatrixXd(v + w)),
                               orthonormalize(Eigen::MatrixXd(w)));
        double t2 = std::tan(ang) * std::tan(ang);
        double c2 = std::cos(ang) * std::cos(ang);
        double vv = v.squaredNorm(), ww = w.squaredNorm();
        CHECK(t2 <= vv / (ww - vv) + 1e-12);
        CHECK(c2 >= (ww - vv) / ww - 1e-12);
    }
}

TEST_CASE("condition-number angle bound for invertible maps") {
    for (int t = 0; t < 40; ++t) {
        rng::Stream st(rng::derive(17, 0, t));
        int d = 2 + t % 3;
        int s = 1 + t % d;
        if (s == d) s = d - 1;
        if (s < 1) s = 1;
        Eigen::MatrixXd m(d, d);
        do {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) m(i, j) = st.next_normal();
        } while (std::abs(m.determinant()) < 1e-3);
        Frame v = random_frame(d, s, rng::derive(17, 1, t));
        Frame w = random_frame(d, s, rng::derive(17, 2, t));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        double kappa = svd.singularValues()(0) / svd.singularValues()(d - 1);
        double lhs = max_angle(orthonormalize(m * v.columns()),
                               orthonormalize(m * w.columns()));
        double rhs = kPi * kappa * (1.0 + kappa) * max_angle(v, w);
        CHECK(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("orthogonal-scaling invariance of angles") {
    for (int t = 0; t < 30; ++t) {
        int d = 3 + t % 3;
        int s = 1 + t % 2;
        Frame v = random_frame(d, s, rng::derive(19, 1, t));
        Frame w = random_frame(d, s, rng::derive(19, 2, t));
        Frame qf = random_frame(d, d, rng::derive(19, 3, t));
        double r = 0.25 + 3.0 * (t % 7) / 7.0;
        Eigen::MatrixXd q = r * qf.columns();
        double a0 = max_angle(v, w);
        double a1 = max_angle(orthonormalize(q * v.columns()),
                              orthonormalize(q * w.columns()));
        CHECK(std::abs(a0 - a1) < 1e-10);
    }
}

TEST_CASE("min-max oracle agrees with the SVD route") {
    Frame a = span_of({1, 0});
    Frame b = span_of({0.36, -0.93});
    CHECK(std::abs(minmax_angle_oracle(a, b, 10000) - max_angle(a, b)) < 1e-3);
    CHECK(minmax_angle_oracle(a, a, 100) == 0.0);

    for (int t = 0; t < 5; ++t) {
        Frame p = random_frame(4, 2, rng::derive(23, 1, t));
        Frame q = random_frame(4, 2, rng::derive(23, 2, t));
        CHECK(std::abs(minmax_angle_oracle(p, q, 200) - max_angle(p, q)) < 2e-2);
    }

    Frame p4 = random_frame(6, 3, rng::derive(23, 3, 0));
    CHECK_THROWS_AS(minmax_angle_oracle(p4, p4, 1000), OracleTooLarge);
}

TEST_CASE("oracle error shrinks with the grid") {
    Frame p = random_frame(3, 2, rng::derive(29, 1, 7));
    Frame q = random_frame(3, 2, rng::derive(29, 2, 7));
    double exact = max_angle(p, q);
    double prev = 1e9;
    for (int grid : {25, 100, 400}) {
        double err = std::abs(minmax_angle_oracle(p, q, grid) - exact);
        CHECK(err <= prev + 1e-12);
        CHECK(err <= 2.0 * kPi / grid);
        prev = err;
    }
}

TEST_CASE("grassmann distance identities") {
    Frame e1 = span_of({1, 0});
    Frame e2 = span_of({0, 1});
    CHECK(grassmann_distance(e1, e1) == 0.0);
    CHECK(grassmann_distance(e1, e2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(grassmann_distance(e1, span_of({1, 1})) ==
          doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-13));

    for (int t = 0; t < 60; ++t) {
        int d = 2 + t % 5;
        int s = 1 + t % d;
        if (s == d) s = 1;
        Frame p = random_frame(d, s, rng::derive(31, 1, t));
        Frame q = random_frame(d, s, rng::derive(31, 2, t));
        double dist = grassmann_distance(p, q);
        double ang = max_angle(p, q);
        CHECK(std::abs(dist - std::sin(ang)) < 1e-10);
        CHECK(dist <= ang + 1e-12);
        CHECK(2.0 / kPi * ang <= dist + 1e-12);
    }
}

TEST_CASE("chi folds into [0, pi/2]") {
    CHECK(chi(0.0) == 0.0);
    CHECK(chi(kPi) == doctest::Approx(0.0));
    CHECK(chi(3.0 * kPi / 4.0) == doctest::Approx(kPi / 4.0));
    for (double x : {0.1, 0.7, 1.4, 2.0, 3.0}) {
        CHECK(chi(x) == doctest::Approx(chi(-x)));
        CHECK(chi(x) == doctest::Approx(chi(kPi - x)));
        CHECK(chi(x) >= 0.0);
        CHECK(chi(x) <= kPi / 2.0);
    }
}
